"""Turn processing times into concrete timelines."""
from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple

from .core import Instance, Ordering, Q, SpeedProfile
from .errors import OrderingSizeMismatch, TargetOutOfRange
from .metrics import Schedule, Segment

__all__ = ["realize_two_speed", "allocation_energy", "dispatch_ordering", "srpt_schedule"]


def realize_two_speed(volume, target_x, profile: SpeedProfile) -> Tuple[Fraction, ...]:
    """Cheapest mix of speeds that processes ``volume`` in exactly ``target_x``.

    Only the two levels bracketing the target are used (a single level when
    the target hits one exactly). Returns the fraction ``lambda_i`` of the
    volume processed at each level.
    """
    v, x = Q(volume), Q(target_x)
    times = [v / s for s in profile.speeds]
    k = profile.k
    if x > times[0] or x < times[-1]:
        raise TargetOutOfRange(f"processing time {x} outside [{times[-1]}, {times[0]}]")
    lam = [Fraction(0)] * k
    for i, t in enumerate(times):
        if x == t:
            lam[i] = Fraction(1)
            return tuple(lam)
    i = max(i for i in range(k) if times[i] > x)
    lo = (x - times[i + 1]) / (times[i] - times[i + 1])
    lam[i], lam[i + 1] = lo, 1 - lo
    return tuple(lam)


def allocation_energy(volume, lam: Sequence[Fraction], profile: SpeedProfile) -> Fraction:
    return sum((l * profile.energy(Q(volume), i) for i, l in enumerate(lam)), Fraction(0))


def _append(segs: List[Segment], start, end, job, level) -> None:
    if segs and segs[-1].job == job and segs[-1].level == level and segs[-1].end == start:
        segs[-1] = Segment(segs[-1].start, end, job, level)
    else:
        segs.append(Segment(start, end, job, level))


def dispatch_ordering(instance: Instance, ordering: Ordering, x: Sequence) -> Schedule:
    """Non-idling list schedule that runs each job for exactly ``x_j``.

    At every moment the released, unfinished job that comes first in
    ``ordering`` runs. Each job's time is split over at most two adjacent
    speed levels, faster level first.
    """
    n = instance.n
    if len(ordering) != n or len(x) != n:
        raise OrderingSizeMismatch(f"ordering/x sizes {len(ordering)}/{len(x)} for {n} jobs")
    prof = instance.profile
    pieces = []
    for j, job in enumerate(instance.jobs):
        lam = realize_two_speed(job.volume, x[j], prof)
        pieces.append([
            [i, lam[i] * prof.time(job.volume, i)]
            for i in reversed(range(prof.k)) if lam[i] > 0
        ])
    pos = ordering.position
    releases = instance.releases
    pending = sorted(range(n), key=lambda j: (releases[j], pos[j]))
    active: List[int] = []
    segs: List[Segment] = []
    t = Fraction(0)
    nxt = 0
    while nxt < n or active:
        while nxt < n and releases[pending[nxt]] <= t:
            active.append(pending[nxt])
            nxt += 1
        if not active:
            t = releases[pending[nxt]]
            continue
        j = min(active, key=pos.__getitem__)
        horizon = releases[pending[nxt]] if nxt < n else None
        piece = pieces[j][0]
        end = t + piece[1]
        if horizon is not None and horizon < end:
            end = horizon
        _append(segs, t, end, j, piece[0])
        piece[1] -= end - t
        t = end
        if piece[1] == 0:
            pieces[j].pop(0)
            if not pieces[j]:
                active.remove(j)
    return Schedule(tuple(segs))


def srpt_schedule(instance: Instance, level: int) -> Tuple[Schedule, Fraction, Fraction]:
    """Preemptive shortest-remaining-processing-time at one fixed speed.

    Ties go to the job already running, then to the lowest index. Returns
    ``(schedule, makespan, idle)`` with ``idle = makespan - V / s``.
    """
    n = instance.n
    s = instance.profile.speeds[level]
    releases = instance.releases
    remaining = [job.volume for job in instance.jobs]
    pending = sorted(range(n), key=lambda j: (releases[j], j))
    active: List[int] = []
    segs: List[Segment] = []
    t = Fraction(0)
    nxt = 0
    running = None
    while nxt < n or active:
        while nxt < n and releases[pending[nxt]] <= t:
            active.append(pending[nxt])
            nxt += 1
        if not active:
            t = releases[pending[nxt]]
            running = None
            continue
        j = min(active, key=lambda a: (remaining[a], a != running, a))
        end = t + remaining[j] / s
        if nxt < n and releases[pending[nxt]] < end:
            end = releases[pending[nxt]]
        _append(segs, t, end, j, level)
        remaining[j] -= (end - t) * s
        running = j
        t = end
        if remaining[j] == 0:
            active.remove(j)
            running = None
    makespan = t
    idle = makespan - instance.total_volume / s
    return Schedule(tuple(segs)), makespan, idle
