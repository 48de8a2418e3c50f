"""Greedy speed-up algorithms driven by affection versus shrinking energy.

All variants start with every job at the slowest speed and repeatedly shrink
one job's processing time. A single step never crosses an event: it stops
exactly when the job reaches the next speed level or when a completion in
its affection chain lands on the next job's release.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .core import INF, Instance, Ordering
from .dispatch import dispatch_ordering
from .errors import NotUnitInstance, PreconditionViolated
from .metrics import Schedule, affection_sets, bracket_energies, evaluate, extended_completions

__all__ = [
    "Step", "ConstructionTrace", "RuleReport", "ExtendedAffectionReport", "fifo_ordering",
    "kappa_delta", "naive_two_speed_sweep", "naive_per_level_sweep", "extended_affection",
    "kappa_delta_c", "validate_kd_rule",
]

LEVEL_HIT = "SpeedLevelHit"
AFFECTION_BREAK = "AffectionBreak"
BALANCED = "Balanced"  # level hit and affection break at the same instant


@dataclass(frozen=True)
class Step:
    job: int
    x_before: Fraction
    x_after: Fraction
    kappa: Fraction
    delta: object
    reason: str


@dataclass
class ConstructionTrace:
    ordering: Ordering
    steps: List[Step] = field(default_factory=list)
    capped: bool = False

    def to_text(self) -> str:
        lines = []
        for s in self.steps:
            lines.append(
                f"job={s.job + 1} x=[{s.x_before} -> {s.x_after}] kappa={s.kappa} delta={s.delta} reason={s.reason}"
            )
        return "\n".join(lines) + ("\n" if lines else "")

    def final_x(self, instance: Instance) -> List[Fraction]:
        x = [instance.x(j, 0) for j in range(instance.n)]
        for s in self.steps:
            x[s.job] = s.x_after
        return x


def _require_unit(instance: Instance) -> None:
    if not instance.unit_size or instance.weighted:
        raise NotUnitInstance("needs unit-size, unit-weight jobs")
    if not instance.is_fe:
        raise PreconditionViolated("greedy algorithms solve flow plus energy only")


def fifo_ordering(instance: Instance) -> Ordering:
    """Jobs by release time, ties by index."""
    _require_unit(instance)
    r = instance.releases
    return Ordering(tuple(sorted(range(instance.n), key=lambda j: (r[j], j))))


class _UnitState:
    """Unit jobs run non-preemptively in FIFO order, indexed by position."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self.profile = instance.profile
        self.ordering = fifo_ordering(instance)
        self.jobs = self.ordering.perm
        self.rel = [instance.jobs[j].release for j in self.jobs]
        self.times = [1 / s for s in self.profile.speeds]
        self.x = [self.times[0]] * len(self.jobs)

    def completions(self) -> List[Fraction]:
        C, t = [], None
        for r, x in zip(self.rel, self.x):
            t = (r if t is None else max(t, r)) + x
            C.append(t)
        return C

    def chain_ends(self, C) -> List[int]:
        n = len(C)
        ends = [0] * n
        end = n - 1
        for p in reversed(range(n)):
            if p == n - 1 or not C[p] > self.rel[p + 1]:
                end = p
            ends[p] = end
        return ends

    def delta(self, p: int):
        return bracket_energies(1 / self.x[p], self.profile, self.jobs[p])[0]

    def snapshot(self):
        C = self.completions()
        ends = self.chain_ends(C)
        kappa = [Fraction(ends[p] - p + 1) for p in range(len(C))]
        delta = [self.delta(p) for p in range(len(C))]
        return C, ends, kappa, delta

    def shrink(self, p: int, C, ends, kappa, delta) -> Step:
        below = max(t for t in self.times if t < self.x[p])
        e_lvl = self.x[p] - below
        e_aff = min((C[a] - self.rel[a + 1] for a in range(p, ends[p])), default=None)
        if e_aff is None or e_lvl < e_aff:
            eps, reason = e_lvl, LEVEL_HIT
        elif e_aff < e_lvl:
            eps, reason = e_aff, AFFECTION_BREAK
        else:
            eps, reason = e_lvl, BALANCED
        before = self.x[p]
        self.x[p] = before - eps
        return Step(self.jobs[p], before, self.x[p], kappa[p], delta[p], reason)

    def x_by_job(self) -> List[Fraction]:
        out = [Fraction(0)] * len(self.jobs)
        for p, j in enumerate(self.jobs):
            out[j] = self.x[p]
        return out

    def schedule(self) -> Schedule:
        return dispatch_ordering(self.instance, self.ordering, self.x_by_job())


def kappa_delta(instance: Instance, strict: bool = False) -> Tuple[Schedule, ConstructionTrace]:
    """Optimal flow plus energy for unit jobs.

    While some job has ``kappa >= Delta``, shrink a job maximizing
    ``kappa - Delta`` (lowest index on ties) up to the next event. With
    ``strict=True`` the guard is ``kappa > Delta``, which leaves no job
    whose expansion is exactly break-even.
    """
    st = _UnitState(instance)
    trace = ConstructionTrace(st.ordering)
    n = len(st.jobs)
    while True:
        C, ends, kappa, delta = st.snapshot()
        best = None
        for p in range(n):
            if delta[p] == INF:
                continue
            gap = kappa[p] - delta[p]
            if gap < 0 or (strict and gap == 0):
                continue
            key = (-gap, st.jobs[p])
            if best is None or key < best[0]:
                best = (key, p)
        if best is None:
            break
        trace.steps.append(st.shrink(best[1], C, ends, kappa, delta))
    return st.schedule(), trace


def naive_two_speed_sweep(instance: Instance) -> Tuple[Schedule, ConstructionTrace]:
    """One FIFO pass; each job is sped up while ``kappa_j >= Delta_j``."""
    st = _UnitState(instance)
    trace = ConstructionTrace(st.ordering)
    for p in range(len(st.jobs)):
        while True:
            C, ends, kappa, delta = st.snapshot()
            if delta[p] == INF or kappa[p] < delta[p]:
                break
            trace.steps.append(st.shrink(p, C, ends, kappa, delta))
    return st.schedule(), trace


def naive_per_level_sweep(instance: Instance) -> Tuple[Schedule, ConstructionTrace]:
    """For each level ``i``, sweep jobs and speed them up while
    ``kappa_j >= Delta_i`` and ``Delta_j <= Delta_i``."""
    st = _UnitState(instance)
    trace = ConstructionTrace(st.ordering)
    prof = st.profile
    for i in range(prof.k - 1):
        d_i = prof.delta(i)
        for p in range(len(st.jobs)):
            while True:
                C, ends, kappa, delta = st.snapshot()
                if not (kappa[p] >= d_i and delta[p] <= d_i):
                    break
                trace.steps.append(st.shrink(p, C, ends, kappa, delta))
    return st.schedule(), trace


# -- extended affection and the ordered variant --------------------------------

@dataclass(frozen=True)
class ExtendedAffectionReport:
    sets: Tuple[frozenset, ...]
    kappa: Tuple[Fraction, ...]


def _extended_sets(C, chat, release, ordering: Ordering):
    perm = ordering.perm
    n = len(perm)
    pc = [chat[j] for j in perm]
    rises = [p == 0 or pc[p] > pc[p - 1] for p in range(n)]
    direct = [[] for _ in range(n)]
    for p in range(n):
        cj = C[perm[p]]
        for q in range(p, n):
            if (cj > release[perm[q]] and rises[q]) or (rises[p] and pc[p] == pc[q]):
                direct[p].append(q)
    sets = [frozenset()] * n
    for p in range(n):
        seen, stack = set(direct[p]), list(direct[p])
        while stack:
            a = stack.pop()
            for b in direct[a]:
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
        sets[perm[p]] = frozenset(perm[q] for q in seen)
    return sets


def extended_affection(schedule: Schedule, instance: Instance, ordering: Ordering) -> ExtendedAffectionReport:
    """Affection measured on extended completions for a fixed completion ordering."""
    m = evaluate(schedule, instance, ordering)
    sets = _extended_sets(m.completion, m.extended, instance.releases, ordering)
    w = instance.weights
    return ExtendedAffectionReport(tuple(sets), tuple(sum((w[b] for b in s), Fraction(0)) for s in sets))


def kappa_delta_c(instance: Instance, ordering: Ordering, max_steps: int = 10000
                  ) -> Tuple[Schedule, ConstructionTrace]:
    """Experimental: the greedy rule with extended affection, any ordered FE instance.

    Nothing guarantees optimality here; compare against the ordering LP.
    Each step shrinks the chosen job up to the nearest point where a speed
    level is reached or a moving completion meets a release or another
    completion; the schedule is re-dispatched after every step.
    """
    if not instance.is_fe:
        raise PreconditionViolated("greedy algorithms solve flow plus energy only")
    n, prof = instance.n, instance.profile
    x = [instance.x(j, 0) for j in range(n)]
    trace = ConstructionTrace(ordering)
    r = instance.releases
    while len(trace.steps) < max_steps:
        sched = dispatch_ordering(instance, ordering, x)
        C = sched.completions()
        C = tuple(C[j] for j in range(n))
        chat = extended_completions(C, ordering)
        khat = _extended_sets(C, chat, r, ordering)
        kap = [sum((instance.jobs[b].weight for b in s), Fraction(0)) for s in khat]
        delta = [bracket_energies(instance.jobs[j].volume / x[j], prof, j)[0] for j in range(n)]
        best = None
        for j in range(n):
            if delta[j] == INF or kap[j] < delta[j]:
                continue
            key = (-(kap[j] - delta[j]), j)
            if best is None or key < best[0]:
                best = (key, j)
        if best is None:
            return sched, trace
        j = best[1]
        levels = [instance.x(j, i) for i in range(prof.k)]
        e_lvl = x[j] - max(t for t in levels if t < x[j])
        moving = affection_sets(C, r)[j]
        cands = [e_lvl]
        for a in moving:
            cands += [C[a] - r[b] for b in range(n) if C[a] > r[b]]
            cands += [C[a] - C[b] for b in range(n) if b not in moving and C[a] > C[b]]
        eps = min(c for c in cands if c > 0)
        reason = LEVEL_HIT if eps == e_lvl else AFFECTION_BREAK
        trace.steps.append(Step(j, x[j], x[j] - eps, kap[j], delta[j], reason))
        x[j] -= eps
    trace.capped = True
    return dispatch_ordering(instance, ordering, x), trace


# -- construction audit ----------------------------------------------------------

@dataclass(frozen=True)
class RuleReport:
    ok: bool
    step: Optional[int] = None
    condition: Optional[str] = None
    detail: str = ""


def _state(instance: Instance, ordering: Ordering, x: Sequence[Fraction]):
    sched = dispatch_ordering(instance, ordering, x)
    C = sched.completions()
    C = tuple(C[j] for j in range(instance.n))
    r, w = instance.releases, instance.weights
    K = affection_sets(C, r)
    Kp = affection_sets(C, r, lower=True)
    prof = instance.profile
    energies = [bracket_energies(instance.jobs[j].volume / x[j], prof, j) for j in range(instance.n)]
    kap = [sum((w[b] for b in s), Fraction(0)) for s in K]
    kap_p = [sum((w[b] for b in s), Fraction(0)) for s in Kp]
    return kap, kap_p, [e[0] for e in energies], [e[1] for e in energies]


def validate_kd_rule(trace: ConstructionTrace, instance: Instance) -> RuleReport:
    """Replay a trace and check it is a construction obeying the greedy rule.

    Checked per step: exactly one job is strictly sped up ("one-job"), its
    affection and shrinking energy are unchanged across the step
    ("no-change"), and it has maximum ``kappa - Delta`` among jobs not yet at
    their final speed ("order") and among all jobs ("rule").
    """
    n = instance.n
    x = [instance.x(j, 0) for j in range(n)]
    final = trace.final_x(instance)
    for t, step in enumerate(trace.steps):
        j = step.job
        if not 0 <= j < n or x[j] != step.x_before or not step.x_after < step.x_before:
            return RuleReport(False, t, "one-job", f"step does not strictly shrink job {j + 1} from the replayed state")
        kap, _, delta, _ = _state(instance, trace.ordering, x)
        gaps = [kap[i] - delta[i] for i in range(n)]
        unfinished = [i for i in range(n) if x[i] > final[i]]
        if any(gaps[i] > gaps[j] for i in unfinished):
            i = max(unfinished, key=lambda a: gaps[a])
            return RuleReport(False, t, "order", f"job {i + 1} has kappa-Delta {gaps[i]} > {gaps[j]} of job {j + 1}")
        if any(g > gaps[j] for g in gaps):
            i = max(range(n), key=lambda a: gaps[a])
            return RuleReport(False, t, "rule", f"job {i + 1} has kappa-Delta {gaps[i]} > {gaps[j]} of job {j + 1}")
        x[j] = step.x_after
        _, kap_p, _, delta_p = _state(instance, trace.ordering, x)
        if kap_p[j] != kap[j] or delta_p[j] != delta[j]:
            return RuleReport(False, t, "no-change",
                              f"job {j + 1}: kappa {kap[j]} -> kappa+ {kap_p[j]}, Delta {delta[j]} -> Delta+ {delta_p[j]}")
    return RuleReport(True)
