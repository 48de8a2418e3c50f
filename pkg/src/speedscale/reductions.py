"""Instance generators for the hardness constructions, plus their audits."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence

from .core import Instance, Job, Ordering, Q, SpeedProfile
from .dispatch import srpt_schedule
from .errors import (
    AlphaOutOfRange,
    AuditFailed,
    BudgetOutOfRange,
    NotTwoSpeeds,
    PreconditionViolated,
)
from .metrics import Schedule, Segment

__all__ = [
    "Reduction", "budget_to_fe", "subsetsum_to_feidwu", "subsetsum_to_bidua",
    "counterexample_instance", "restrict_schedule", "check_feidwu", "is_subset_sum",
    "base_schedule_flow",
]


@dataclass
class Reduction:
    """A generated instance with the constants used to build it."""

    instance: Instance
    provenance: Dict[str, object] = field(default_factory=dict)
    ordering: Optional[Ordering] = None


def _normalize_slow_speed(inst: Instance):
    """Divide speeds and volumes by ``s_1`` so the slowest speed is 1.

    Processing times, releases, powers and energies are unchanged.
    """
    s1 = inst.profile.speeds[0]
    if s1 == 1:
        return inst, Fraction(1)
    prof = SpeedProfile(tuple(s / s1 for s in inst.profile.speeds), inst.profile.powers)
    jobs = [Job(j.release, j.volume / s1, j.weight) for j in inst.templates]
    return Instance(jobs, prof, inst.budget, counts=inst.counts), s1


def budget_to_fe(inst: Instance) -> Reduction:
    """Flow-plus-energy instance whose optimum solves the budget instance.

    Appends one long job released at 0 and ``n + 1`` jobs released late, and
    raises the fast power so that exactly the budgeted speed-up pays off.
    Jobs ``0..n-1`` of the output are the input jobs.
    """
    if inst.profile.k != 2:
        raise NotTwoSpeeds(f"needs exactly two speeds, got {inst.profile.k}")
    if inst.is_fe:
        raise PreconditionViolated("source instance needs an energy budget")
    if inst.weighted:
        raise PreconditionViolated("source jobs must have unit weight")
    src, scale = _normalize_slow_speed(inst)
    prof = src.profile
    (_, s2), (p1, p2) = prof.speeds, prof.powers
    n, V, B = src.n, src.total_volume, src.budget
    if not p1 * V < B < p2 * V / s2:
        raise BudgetOutOfRange(f"budget {B} outside ({p1 * V}, {p2 * V / s2})")
    Y = (B - p1 * V) / prof.deltas[0]
    _, cmax, idle = srpt_schedule(src, 0)
    big = Job(0, idle + (s2 + 1) * V + Y)
    late = Job(cmax + (s2 + 1) * V, Y + 1)
    new_p2 = (n + Fraction(3, 2)) * (s2 - 1) + p1 * s2
    new_prof = SpeedProfile(prof.speeds, (p1, new_p2))
    d1 = new_prof.deltas[0]
    if not n + 1 < d1 < n + 2:
        raise AuditFailed(f"shrinking energy {d1} not strictly between {n + 1} and {n + 2}")
    out = Instance(list(src.templates) + [big, late], new_prof, None, counts=list(src.counts) + [1, n + 1])
    prov = {
        "source": "budget_to_fe",
        "n": n, "V": V, "B": B, "Y": Y, "makespan": cmax, "idle": idle,
        "delta1": d1, "speed_scale": scale,
    }
    return Reduction(out, prov)


def _check_subsetsum(elements: Sequence, A) -> tuple:
    a = sorted((Q(x) for x in elements), reverse=True)
    A = Q(A)
    if not a or any(x <= 0 or x.denominator != 1 for x in a) or A.denominator != 1:
        raise PreconditionViolated("elements and target must be positive integers")
    if not a[0] < A < sum(a):
        raise PreconditionViolated(f"target {A} must lie strictly between {a[0]} and {sum(a)}")
    if a[0] > 2 * a[-1]:
        raise PreconditionViolated("every element must be at most twice every other element")
    return tuple(a), A


def subsetsum_to_feidwu(elements: Sequence, A) -> Reduction:
    """Weighted unit-job instance built from a SubsetSum instance.

    Groups of identical jobs are stored once with a count, so the instance
    stays small even though it represents ``99 m^8 a_1^3`` late jobs.
    """
    a, A = _check_subsetsum(elements, A)
    m = len(a)
    a1 = a[0]
    shortfall = Fraction(m * m, 2) + A / (2 * a1 * a1)
    K = math.ceil(shortfall)
    K_late = 99 * m ** 8 * int(a1) ** 3
    w0 = Fraction(1, 32 * m ** 5)
    w_late = Fraction(1, 33 * m ** 5)
    heavy = 2 * m * a1 ** 3
    templates: List[Job] = [Job(0, 1, w0)]
    counts = [K]
    releases = {}
    for i, ai in enumerate(a, start=1):
        r0 = Fraction((i - 1) * (m + 1))
        ri = r0 + 1 - ai / (2 * a1 * a1)
        templates += [Job(r0, 1, ai / m), Job(ri, 1, heavy)]
        counts += [1, m]
        releases[i] = (r0, ri)
    r_late = m * (m + 1) + K - shortfall
    templates.append(Job(r_late, 1, w_late))
    counts.append(K_late)
    p2 = 3 * m ** 3 * a1 ** 3 + w_late + 2
    prof = SpeedProfile((1, 2), (1, p2))
    d1 = 3 * m ** 3 * a1 ** 3 + w_late
    if prof.deltas[0] != d1:
        raise AuditFailed(f"shrinking energy {prof.deltas[0]} != {d1}")
    prov = {
        "source": "subsetsum_to_feidwu", "elements": a, "target": A, "m": m,
        "K": K, "K_late": K_late, "w0": w0, "w_late": w_late, "w_heavy": heavy,
        "r_late": r_late, "P2": p2, "delta1": d1, "Y": shortfall,
    }
    return Reduction(Instance(templates, prof, None, counts=counts), prov)


def check_feidwu(red: Reduction) -> List[str]:
    """Structural checks on a generated weighted instance; returns what was checked.

    Raises :class:`AuditFailed` when the late group is not both strictly
    lighter and strictly later than every other job.
    """
    inst, prov = red.instance, red.provenance
    late = inst.templates[-1]
    checked = []
    for t in inst.templates[:-1]:
        if not (late.weight < t.weight and late.release > t.release):
            raise AuditFailed(f"late job {late} does not dominate {t}")
    checked.append("late jobs are lighter and released later than all others")
    m = prov["m"]
    if late.release - (m * (m + 1) + prov["K"]) != -prov["Y"]:
        raise AuditFailed("late release offset mismatch")
    checked.append("late release offset equals minus the shortfall")
    if inst.profile.deltas[0] != prov["delta1"]:
        raise AuditFailed("shrinking energy mismatch")
    checked.append("shrinking energy matches")
    return checked


def subsetsum_to_bidua(elements: Sequence, A) -> Reduction:
    """Unit-weight budget instance built from a SubsetSum instance.

    Package ``i`` has a long job (volume ``a_i``) and a short job (volume
    ``2 delta a_i``) released halfway through the long one. Packages are
    spaced so they cannot interact even at the slow speed. The returned
    priority ordering puts each short job before its long partner.
    """
    a, A = _check_subsetsum(elements, A)
    m = len(a)
    delta = 1 / (a[0] * m * m)
    jobs: List[Job] = []
    shift = Fraction(0)
    shifts = []
    for ai in a:
        shifts.append(shift)
        jobs += [Job(shift, ai), Job(shift + ai / 2, 2 * delta * ai)]
        shift = shift + ai + 2 * delta * ai + 1
    B = (1 + 4 * delta) * sum(a) + A
    prof = SpeedProfile((1, 2), (1, 4))
    prio = []
    for i in range(m):
        prio += [2 * i + 1, 2 * i]
    prov = {
        "source": "subsetsum_to_bidua", "elements": a, "target": A, "m": m,
        "delta": delta, "B": B, "shifts": tuple(shifts),
        "base_flow": base_schedule_flow(a, delta),
        "threshold": base_schedule_flow(a, delta) - (Fraction(1, 2) + delta) * A,
    }
    return Reduction(Instance(jobs, prof, B), prov, Ordering(tuple(prio), "priority"))


def base_schedule_flow(elements: Iterable, delta) -> Fraction:
    """Total flow when each long job runs slow and each short job runs fast."""
    return sum((Q(x) + 2 * delta * Q(x) for x in elements), Fraction(0))


def is_subset_sum(elements: Sequence[int], A) -> bool:
    """Exhaustive check (fine for the tiny instances used here)."""
    sums = {Fraction(0)}
    for x in elements:
        sums |= {s + Q(x) for s in sums}
    return Q(A) in sums


def counterexample_instance(alpha) -> Instance:
    """Three unit jobs on which both naive generalizations fail for some alpha."""
    alpha = Q(alpha)
    if not 0 <= alpha < 1:
        raise AlphaOutOfRange(f"alpha must lie in [0, 1), got {alpha}")
    prof = SpeedProfile((1, 2, 3), (1, 3 + alpha, 6 + alpha))
    return Instance([Job(0, 1), Job(Fraction(1, 3), 1), Job(Fraction(4, 3), 1)], prof)


def restrict_schedule(schedule: Schedule, jobs: Iterable[int]) -> Schedule:
    """Keep only segments of ``jobs``; everything else becomes idle time."""
    keep = set(jobs)
    out: List[Segment] = []
    for seg in schedule.segments:
        if not seg.idle and seg.job in keep:
            out.append(seg)
            continue
        if out and out[-1].idle and out[-1].end == seg.start:
            out[-1] = Segment(out[-1].start, seg.end)
        else:
            out.append(Segment(seg.start, seg.end))
    return Schedule(tuple(out))
