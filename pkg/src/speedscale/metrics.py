"""Schedule evaluation: completions, flow, energy, affection and witnesses."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .core import INF, NEG_INF, Instance, Ordering, Q, SpeedProfile
from .errors import (
    EpsilonTooLarge,
    InfeasibleSchedule,
    NotFifoSchedule,
    NotUnitInstance,
    PreconditionViolated,
    SpeedOutOfRange,
)

__all__ = [
    "Segment", "Schedule", "ScheduleMetrics", "OptimalityWitness", "evaluate",
    "affection", "affection_sets", "affection_chains", "shrink_expand_energies",
    "optimality_witness", "perturb_processing_time", "extended_completions",
]


@dataclass(frozen=True)
class Segment:
    """``[start, end)`` running ``job`` at speed ``level``; both None means idle."""

    start: Fraction
    end: Fraction
    job: Optional[int] = None
    level: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "start", Q(self.start))
        object.__setattr__(self, "end", Q(self.end))
        if (self.job is None) != (self.level is None):
            raise ValueError("a segment is either idle or (job, level)")

    @property
    def idle(self) -> bool:
        return self.job is None

    @property
    def length(self) -> Fraction:
        return self.end - self.start


@dataclass(frozen=True)
class Schedule:
    segments: Tuple[Segment, ...]

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    def busy(self):
        return (s for s in self.segments if not s.idle)

    def jobs(self) -> List[int]:
        return sorted({s.job for s in self.busy()})

    def completions(self) -> dict:
        out = {}
        for s in self.busy():
            if s.end > out.get(s.job, s.end - 1):
                out[s.job] = s.end
        return out

    def processing_times(self) -> dict:
        out = defaultdict(Fraction)
        for s in self.busy():
            out[s.job] += s.length
        return dict(out)

    def volumes(self, profile: SpeedProfile) -> dict:
        out = defaultdict(Fraction)
        for s in self.busy():
            out[s.job] += s.length * profile.speeds[s.level]
        return dict(out)


@dataclass(frozen=True)
class ScheduleMetrics:
    completion: Tuple[Fraction, ...]
    processing: Tuple[Fraction, ...]
    speed: Tuple[Fraction, ...]
    flow: Fraction
    energy: Fraction
    objective: Fraction
    extended: Optional[Tuple[Fraction, ...]] = None
    extended_flow: Optional[Fraction] = None

    @property
    def extended_objective(self) -> Optional[Fraction]:
        """Extended flow plus energy (the quantity the ordering LP optimizes)."""
        if self.extended_flow is None:
            return None
        return self.extended_flow + self.energy


def extended_completions(completion: Sequence[Fraction], ordering: Ordering) -> Tuple[Fraction, ...]:
    ext = [Fraction(0)] * len(completion)
    running = None
    for j in ordering.perm:
        running = completion[j] if running is None else max(running, completion[j])
        ext[j] = running
    return tuple(ext)


def _check(schedule: Schedule, instance: Instance) -> None:
    n, k = instance.n, instance.profile.k
    prev_end = None
    for seg in schedule.segments:
        if not seg.start < seg.end:
            raise InfeasibleSchedule(f"empty or reversed segment [{seg.start}, {seg.end})")
        if prev_end is not None and seg.start < prev_end:
            raise InfeasibleSchedule(f"segment at {seg.start} overlaps the previous one")
        prev_end = seg.end
        if seg.idle:
            continue
        if not 0 <= seg.job < n:
            raise InfeasibleSchedule(f"unknown job {seg.job}")
        if not 0 <= seg.level < k:
            raise InfeasibleSchedule(f"unknown speed level {seg.level}")
        if seg.start < instance.jobs[seg.job].release:
            raise InfeasibleSchedule(f"job {seg.job} runs at {seg.start} before its release")
    done = schedule.volumes(instance.profile)
    for j, job in enumerate(instance.jobs):
        if done.get(j, 0) != job.volume:
            raise InfeasibleSchedule(f"job {j} receives volume {done.get(j, 0)}, needs {job.volume}")


def evaluate(schedule: Schedule, instance: Instance, ordering: Optional[Ordering] = None) -> ScheduleMetrics:
    """Exact metrics of a feasible schedule.

    With a completion ``ordering`` the extended completions (running maxima
    along the ordering) and the extended flow are filled in too.
    """
    _check(schedule, instance)
    prof = instance.profile
    comp = schedule.completions()
    proc = schedule.processing_times()
    C = tuple(comp[j] for j in range(instance.n))
    x = tuple(proc[j] for j in range(instance.n))
    speed = tuple(job.volume / xj for job, xj in zip(instance.jobs, x))
    flow = sum((job.weight * (c - job.release) for job, c in zip(instance.jobs, C)), Fraction(0))
    energy = sum((s.length * prof.powers[s.level] for s in schedule.busy()), Fraction(0))
    if not instance.is_fe and energy > instance.budget:
        raise InfeasibleSchedule(f"energy {energy} exceeds budget {instance.budget}")
    objective = flow + energy if instance.is_fe else flow
    ext = ext_flow = None
    if ordering is not None:
        if ordering.kind != "completion":
            raise PreconditionViolated("extended completions need a completion ordering")
        if len(ordering) != instance.n:
            raise PreconditionViolated("ordering size does not match the instance")
        ext = extended_completions(C, ordering)
        ext_flow = sum((job.weight * (c - job.release) for job, c in zip(instance.jobs, ext)), Fraction(0))
    return ScheduleMetrics(C, x, speed, flow, energy, objective, ext, ext_flow)


# -- affection ---------------------------------------------------------------

def affection_sets(completion: Sequence[Fraction], release: Sequence[Fraction], lower: bool = False):
    """Transitive affection sets from completion and release times.

    ``j`` directly affects ``j'`` when ``C_j <= C_j'`` and ``C_j > r_j'``
    (``>=`` for the lower variant). Every job affects itself.
    """
    n = len(completion)
    order = sorted(range(n), key=lambda j: completion[j])
    direct = []
    for j in range(n):
        cj = completion[j]
        direct.append([
            b for b in order
            if cj <= completion[b] and (cj >= release[b] if lower else cj > release[b])
        ])
    sets = []
    for j in range(n):
        seen = {j}
        stack = [j]
        while stack:
            a = stack.pop()
            for b in direct[a]:
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
        sets.append(frozenset(seen))
    return sets


@dataclass(frozen=True)
class OptimalityWitness:
    kappa: Tuple[Fraction, ...]
    kappa_plus: Tuple[Fraction, ...]
    K: Tuple[frozenset, ...]
    K_plus: Tuple[frozenset, ...]
    delta: tuple = ()
    delta_plus: tuple = ()
    violations: Tuple[Tuple[int, str], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def affection(schedule: Schedule, instance: Instance) -> OptimalityWitness:
    """Affection sets ``K``/``K+`` and their weights; energies left empty."""
    m = evaluate(schedule, instance)
    return _affection_from(m.completion, instance)


def _affection_from(completion, instance: Instance) -> OptimalityWitness:
    r, w = instance.releases, instance.weights
    K = affection_sets(completion, r)
    Kp = affection_sets(completion, r, lower=True)
    kappa = tuple(sum((w[b] for b in s), Fraction(0)) for s in K)
    kappa_p = tuple(sum((w[b] for b in s), Fraction(0)) for s in Kp)
    return OptimalityWitness(kappa, kappa_p, tuple(K), tuple(Kp))


def affection_chains(schedule: Schedule, instance: Instance) -> List[Tuple[int, ...]]:
    """Maximal runs of consecutive FIFO jobs where each affects the next."""
    if not instance.unit_size or instance.weighted:
        raise NotUnitInstance("affection chains need unit-size, unit-weight jobs")
    r = instance.releases
    if any(r[j] > r[j + 1] for j in range(len(r) - 1)):
        raise NotFifoSchedule("jobs must be indexed by nondecreasing release")
    C = evaluate(schedule, instance).completion
    if any(C[j] >= C[j + 1] for j in range(len(C) - 1)):
        raise NotFifoSchedule("jobs must complete in index order")
    chains, cur = [], [0]
    for j in range(1, instance.n):
        if C[j - 1] > r[j]:
            cur.append(j)
        else:
            chains.append(tuple(cur))
            cur = [j]
    if instance.n:
        chains.append(tuple(cur))
    return chains


# -- shrinking / expanding energies -------------------------------------------

def bracket_energies(speed: Fraction, profile: SpeedProfile, job: int = -1):
    """``(Delta_j, Delta+_j)`` for a job running at average ``speed``."""
    s = profile.speeds
    if speed < s[0] or speed > s[-1]:
        raise SpeedOutOfRange(job, speed)
    k = profile.k
    # shrink: s in [s_i, s_{i+1})
    i = max(i for i in range(k) if s[i] <= speed)
    shrink = INF if i == k - 1 else profile.delta(i)
    # expand: s in (s_i, s_{i+1}]
    i = min(i for i in range(k) if speed <= s[i])
    expand = NEG_INF if i == 0 else profile.delta(i - 1)
    return shrink, expand


def shrink_expand_energies(schedule: Schedule, profile: SpeedProfile) -> dict:
    """Per-job ``(Delta_j, Delta+_j)`` keyed by job index."""
    vol = schedule.volumes(profile)
    proc = schedule.processing_times()
    return {j: bracket_energies(vol[j] / proc[j], profile, j) for j in sorted(vol)}


def optimality_witness(schedule: Schedule, instance: Instance) -> OptimalityWitness:
    """Affection weights against shrink/expand energies for every job.

    A job is listed as ``"shrink"`` when ``kappa - Delta > 0`` and as
    ``"expand"`` when ``Delta+ - kappa+ > 0``. An empty list is necessary for
    optimality, not sufficient.
    """
    if not instance.is_fe:
        raise PreconditionViolated("optimality witness is defined for flow plus energy")
    m = evaluate(schedule, instance)
    base = _affection_from(m.completion, instance)
    energies = [bracket_energies(s, instance.profile, j) for j, s in enumerate(m.speed)]
    delta = tuple(e[0] for e in energies)
    delta_p = tuple(e[1] for e in energies)
    bad = []
    for j in range(instance.n):
        if base.kappa[j] - delta[j] > 0:
            bad.append((j, "shrink"))
        if delta_p[j] - base.kappa_plus[j] > 0:
            bad.append((j, "expand"))
    return OptimalityWitness(base.kappa, base.kappa_plus, base.K, base.K_plus, delta, delta_p, tuple(bad))


def perturb_processing_time(schedule: Schedule, instance: Instance, j: int, eps) -> Tuple[Fraction, Fraction]:
    """Predicted ``(dF, dE)`` when job ``j``'s processing time changes by ``eps``.

    ``eps > 0`` shrinks ``x_j`` by ``eps``; ``eps < 0`` expands it by ``|eps|``.
    The prediction is exact for the compact (non-idling, completion-order
    priority) schedule with the same processing times, provided ``x_j`` stays
    inside its speed bracket, no moving completion crosses a release, and no
    moving completion reaches a completion of a job that stays put.
    Otherwise :class:`EpsilonTooLarge`.
    """
    eps = Q(eps)
    if eps == 0:
        return Fraction(0), Fraction(0)
    m = evaluate(schedule, instance)
    prof = instance.profile
    v, x = instance.jobs[j].volume, m.processing[j]
    levels = [v / s for s in prof.speeds]  # decreasing in the level index
    shrink_e, expand_e = bracket_energies(m.speed[j], prof, j)
    base = _affection_from(m.completion, instance)
    C, r = m.completion, instance.releases
    if eps > 0:
        if shrink_e == INF:
            raise EpsilonTooLarge(f"job {j} already runs at the top speed")
        floor = max(t for t in levels if t < x)
        if x - eps < floor:
            raise EpsilonTooLarge(f"shrinking job {j} by {eps} crosses speed level at x={floor}")
        moving = base.K[j]
        stay = [C[b] for b in range(instance.n) if b not in moving]
        for a in moving:
            # reaching a release is fine; reaching a completion of a job that
            # stays put may make a preempted tail vanish, so that is excluded
            room = min((C[a] - e for e in r if e < C[a]), default=None)
            tight = min((C[a] - e for e in stay if e < C[a]), default=None)
            if (room is not None and eps > room) or (tight is not None and eps >= tight):
                raise EpsilonTooLarge(f"job {a} would cross an event earlier")
        return -eps * base.kappa[j], eps * shrink_e
    d = -eps
    if expand_e == NEG_INF:
        raise EpsilonTooLarge(f"job {j} already runs at the slowest speed")
    ceil = min(t for t in levels if t > x)
    if x + d > ceil:
        raise EpsilonTooLarge(f"expanding job {j} by {d} crosses speed level at x={ceil}")
    moving = base.K_plus[j]
    stay = [C[b] for b in range(instance.n) if b not in moving]
    for a in moving:
        room = min((e - C[a] for e in r if e > C[a]), default=None)
        tight = min((e - C[a] for e in stay if e > C[a]), default=None)
        if (room is not None and d > room) or (tight is not None and d >= tight):
            raise EpsilonTooLarge(f"job {a} would cross an event later")
    return d * base.kappa_plus[j], -d * expand_e
