"""Linear program for a fixed completion ordering.

Variables are the extended completion times ``Chat_j`` and, per job, the
fraction ``lambda_j^i`` of its volume run at each speed level. Given the
ordering, a job's extended completion is bounded below by every release
time ``t`` it could have waited for plus all work of earlier-ordered jobs
released at or after ``t``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .core import Instance, Ordering
from .dispatch import dispatch_ordering
from .errors import OrderingSizeMismatch, PreconditionViolated, ReconstructionMismatch
from .metrics import Schedule, evaluate
from . import simplex

__all__ = ["LpRow", "LpModel", "LpSolution", "build_fe_lp", "build_budget_lp", "solve",
           "reconstruct", "solve_ordering", "export_lp"]


@dataclass(frozen=True)
class LpRow:
    """One constraint. ``tag`` names its origin, e.g. ``("Completion", j, jp)``."""

    tag: tuple
    coeffs: Dict[int, Fraction]
    sense: str
    rhs: Fraction


@dataclass
class LpModel:
    instance: Instance
    ordering: Ordering
    objective: Dict[int, Fraction]
    rows: List[LpRow]
    budget: bool = False

    @property
    def n(self) -> int:
        return self.instance.n

    @property
    def k(self) -> int:
        return self.instance.profile.k

    @property
    def num_vars(self) -> int:
        return self.n * (1 + self.k)

    def chat(self, j: int) -> int:
        return j

    def lam(self, j: int, i: int) -> int:
        return self.n + j * self.k + i

    def var_name(self, v: int) -> str:
        if v < self.n:
            return f"C{v + 1}"
        j, i = divmod(v - self.n, self.k)
        return f"l{j + 1}_{i + 1}"

    def count(self, kind: str) -> int:
        return sum(1 for r in self.rows if r.tag[0] == kind)


@dataclass(frozen=True)
class LpSolution:
    chat: Tuple[Fraction, ...]
    lam: Tuple[Tuple[Fraction, ...], ...]
    objective: Fraction
    flow_objective: Fraction
    energy: Fraction
    status: str = "optimal"

    def processing_times(self, instance: Instance) -> Tuple[Fraction, ...]:
        prof = instance.profile
        return tuple(
            sum((l * prof.time(job.volume, i) for i, l in enumerate(lam)), Fraction(0))
            for job, lam in zip(instance.jobs, self.lam)
        )


def _build(instance: Instance, ordering: Ordering, with_energy: bool) -> LpModel:
    n, prof = instance.n, instance.profile
    if len(ordering) != n:
        raise OrderingSizeMismatch(f"ordering has {len(ordering)} jobs, instance has {n}")
    model = LpModel(instance, ordering, {}, [])
    jobs = instance.jobs
    for j, job in enumerate(jobs):
        model.objective[model.chat(j)] = job.weight
        if with_energy:
            for i in range(prof.k):
                model.objective[model.lam(j, i)] = prof.energy(job.volume, i)
    perm = ordering.perm
    for p, j in enumerate(perm):
        if p > 0:
            prev = perm[p - 1]
            model.rows.append(LpRow(("Ordering", j), {model.chat(j): Fraction(1), model.chat(prev): Fraction(-1)},
                                    simplex.GE, Fraction(0)))
        prefix = perm[:p + 1]
        # one row per distinct release value among earlier-ordered jobs released no later than j
        seen = {}
        for jp in prefix:
            t = jobs[jp].release
            if t <= jobs[j].release and t not in seen:
                seen[t] = jp
        for t, jp in sorted(seen.items()):
            coeffs = {model.chat(j): Fraction(1)}
            for jpp in prefix:
                if jobs[jpp].release >= t:
                    for i in range(prof.k):
                        coeffs[model.lam(jpp, i)] = -prof.time(jobs[jpp].volume, i)
            model.rows.append(LpRow(("Completion", j, jp), coeffs, simplex.GE, t))
    for j in range(n):
        model.rows.append(LpRow(("ConvexSum", j), {model.lam(j, i): Fraction(1) for i in range(prof.k)},
                                simplex.EQ, Fraction(1)))
    for j in range(n):
        for i in range(prof.k):
            model.rows.append(LpRow(("NonNeg", j, i), {model.lam(j, i): Fraction(1)}, simplex.GE, Fraction(0)))
    return model


def build_fe_lp(instance: Instance, ordering: Ordering) -> LpModel:
    """Minimize weighted extended completion plus energy."""
    return _build(instance, ordering, with_energy=True)


def build_budget_lp(instance: Instance, ordering: Ordering) -> LpModel:
    """Minimize weighted extended completion with total energy capped."""
    if instance.is_fe:
        raise PreconditionViolated("budget LP needs an instance with a budget")
    model = _build(instance, ordering, with_energy=False)
    prof = instance.profile
    coeffs = {
        model.lam(j, i): prof.energy(job.volume, i)
        for j, job in enumerate(instance.jobs) for i in range(prof.k)
    }
    model.rows.append(LpRow(("BudgetCap",), coeffs, simplex.LE, instance.budget))
    model.budget = True
    return model


def build_lp(instance: Instance, ordering: Ordering) -> LpModel:
    return build_fe_lp(instance, ordering) if instance.is_fe else build_budget_lp(instance, ordering)


def solve(model: LpModel) -> LpSolution:
    """Exact optimum. Raises :class:`Infeasible` when the budget is too small."""
    lp = simplex.LinearProgram(model.num_vars)
    lp.objective = dict(model.objective)
    for row in model.rows:
        if row.tag[0] == "NonNeg":
            continue  # variables are nonnegative already
        lp.add_row(row.coeffs, row.sense, row.rhs)
    res = simplex.solve(lp)
    n, k = model.n, model.k
    inst = model.instance
    chat = tuple(res.x[:n])
    lam = tuple(tuple(res.x[model.lam(j, i)] for i in range(k)) for j in range(n))
    energy = sum(
        (l * inst.profile.energy(job.volume, i) for job, ls in zip(inst.jobs, lam) for i, l in enumerate(ls)),
        Fraction(0),
    )
    offset = sum((job.weight * job.release for job in inst.jobs), Fraction(0))
    return LpSolution(chat, lam, res.value, res.value - offset, energy)


def reconstruct(solution: LpSolution, instance: Instance, ordering: Ordering) -> Schedule:
    """Dispatch the LP's processing times and check the LP values are met."""
    x = solution.processing_times(instance)
    schedule = dispatch_ordering(instance, ordering, x)
    m = evaluate(schedule, instance, ordering)
    if m.extended != solution.chat:
        raise ReconstructionMismatch(f"extended completions {m.extended} != LP {solution.chat}")
    weighted = sum((job.weight * c for job, c in zip(instance.jobs, m.extended)), Fraction(0))
    value = weighted + m.energy if instance.is_fe else weighted
    if value != solution.objective:
        raise ReconstructionMismatch(f"schedule objective {value} != LP objective {solution.objective}")
    return schedule


def solve_ordering(instance: Instance, ordering: Ordering) -> Tuple[LpSolution, Schedule]:
    """Build, solve and reconstruct in one go."""
    sol = solve(build_lp(instance, ordering))
    return sol, reconstruct(sol, instance, ordering)


def _term(coef: Fraction, name: str, first: bool) -> str:
    val = float(coef)
    sign = "-" if val < 0 else ("" if first else "+")
    return f"{sign} {abs(val):.17g} {name}".strip()


def export_lp(model: LpModel, ordering_note: Optional[str] = None) -> str:
    """CPLEX-style LP text. Coefficients are decimal approximations."""
    lines = ["\\ speedscale ordering LP" + (f" ({ordering_note})" if ordering_note else ""), "Minimize"]
    terms = [_term(c, model.var_name(v), i == 0) for i, (v, c) in enumerate(sorted(model.objective.items()))]
    lines.append(" obj: " + " ".join(terms))
    lines.append("Subject To")
    ops = {simplex.GE: ">=", simplex.LE: "<=", simplex.EQ: "="}
    for row in model.rows:
        if row.tag[0] == "NonNeg":
            continue
        name = "_".join(str(t + 1) if isinstance(t, int) else t for t in row.tag)
        items = sorted(row.coeffs.items())
        body = " ".join(_term(c, model.var_name(v), i == 0) for i, (v, c) in enumerate(items))
        lines.append(f" {name}: {body} {ops[row.sense]} {float(row.rhs):.17g}")
    lines.append("Bounds")
    for v in range(model.num_vars):
        lines.append(f" {model.var_name(v)} >= 0")
    lines.append("End")
    return "\n".join(lines) + "\n"
