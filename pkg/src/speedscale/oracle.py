"""Brute-force ground truth: best ordering LP over all completion orderings.

Every schedule is feasible for the LP of its own completion order with the
same objective, so the minimum over orderings is the true optimum.

Pruning: among jobs with equal volume and weight, some optimal schedule
completes them in release order (swap the two jobs' volumes along the
timeline; releases stay valid because the earlier-released job takes the
earlier completion). Only orderings that respect this are enumerated.
With ``prune=False`` only fully identical jobs are merged.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple

from .core import Instance, Ordering
from .errors import AuditFailed, Infeasible, TooLarge
from .lp import LpSolution, build_lp, reconstruct, solve
from .metrics import Schedule, evaluate, optimality_witness

__all__ = ["OracleResult", "AuditReport", "exact_optimum", "audit_optimum", "candidate_orderings", "default_cap"]

DEFAULT_MAX_N = 8


def default_cap() -> int:
    env = os.environ.get("SPEEDSCALE_MAX_N")
    return int(env) if env else DEFAULT_MAX_N


def _multiset_perms(counts: List[int]) -> Iterator[Tuple[int, ...]]:
    """Distinct arrangements of labels ``0..len(counts)-1`` in lexicographic order."""
    total = sum(counts)
    out: List[int] = []

    def rec():
        if len(out) == total:
            yield tuple(out)
            return
        for label, c in enumerate(counts):
            if c:
                counts[label] -= 1
                out.append(label)
                yield from rec()
                out.pop()
                counts[label] += 1

    yield from rec()


def candidate_orderings(instance: Instance, prune: bool = True) -> Iterator[Ordering]:
    jobs = instance.jobs
    if prune:
        key = lambda j: (jobs[j].volume, jobs[j].weight)
        within = lambda j: (jobs[j].release, j)
    else:
        key = lambda j: (jobs[j].release, jobs[j].volume, jobs[j].weight)
        within = lambda j: j
    classes = {}
    for j in range(instance.n):
        classes.setdefault(key(j), []).append(j)
    groups = [sorted(members, key=within) for members in classes.values()]
    groups.sort(key=lambda g: g[0])
    for labels in _multiset_perms([len(g) for g in groups]):
        cursor = [0] * len(groups)
        perm = []
        for lab in labels:
            perm.append(groups[lab][cursor[lab]])
            cursor[lab] += 1
        yield Ordering(tuple(perm))


@dataclass
class OracleResult:
    schedule: Schedule
    ordering: Ordering
    objective: Fraction
    solution: LpSolution
    orderings_tried: int = 0
    orderings_infeasible: int = 0


def exact_optimum(instance: Instance, max_n: Optional[int] = None, prune: bool = True) -> OracleResult:
    """Global optimum by enumerating completion orderings.

    ``objective`` is flow plus energy (FE) or flow (budget). Ties between
    orderings go to the lexicographically smallest permutation.
    """
    cap = default_cap() if max_n is None else max_n
    if instance.n > cap:
        raise TooLarge(f"{instance.n} jobs exceeds the oracle cap of {cap}")
    best = None
    tried = infeasible = 0
    for ordering in candidate_orderings(instance, prune):
        tried += 1
        try:
            sol = solve(build_lp(instance, ordering))
        except Infeasible:
            infeasible += 1
            continue
        key = (sol.flow_objective, ordering.perm)
        if best is None or key < best[0]:
            best = (key, sol, ordering)
    if best is None:
        raise Infeasible("no completion ordering admits a feasible schedule")
    _, sol, ordering = best
    schedule = reconstruct(sol, instance, ordering)
    return OracleResult(schedule, ordering, sol.flow_objective, sol, tried, infeasible)


@dataclass
class AuditReport:
    objective: Fraction
    ordering: Ordering
    checks: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)


def budget_slack_identity(instance: Instance, total_time: Fraction):
    """For two speeds and a binding budget, total processing time is fixed.

    Returns ``(applies, expected)``. With ``s_1 = 1`` the expected value is
    ``V - (B - P_1 V) / Delta_1``.
    """
    prof = instance.profile
    if instance.is_fe or prof.k != 2:
        return False, None
    V = instance.total_volume
    (s1, s2), (p1, p2) = prof.speeds, prof.powers
    slow_energy = p1 * V / s1
    if not (slow_energy < instance.budget < p2 * V / s2):
        return False, None
    return True, V / s1 - (instance.budget - slow_energy) / prof.deltas[0]


def audit_optimum(instance: Instance, max_n: Optional[int] = None) -> AuditReport:
    """Solve with the oracle and check the optimum's necessary conditions."""
    res = exact_optimum(instance, max_n)
    report = AuditReport(res.objective, res.ordering)
    m = evaluate(res.schedule, instance)
    if m.objective != res.objective:
        raise AuditFailed(f"schedule objective {m.objective} != oracle objective {res.objective}")
    report.checks.append("schedule objective matches the ordering LP")
    if instance.is_fe:
        w = optimality_witness(res.schedule, instance)
        if w.violations:
            raise AuditFailed(f"optimal schedule has profitable local moves: {w.violations}")
        report.checks.append("no job gains by shrinking or expanding")
    else:
        applies, expected = budget_slack_identity(instance, sum(m.processing, Fraction(0)))
        if applies:
            chi = sum(m.processing, Fraction(0))
            if chi != expected:
                raise AuditFailed(f"total processing time {chi} != {expected}")
            report.checks.append(f"total processing time equals {expected}")
        else:
            report.notes.append("budget outside the open two-speed range; processing-time identity skipped")
    return report
