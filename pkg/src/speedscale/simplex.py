"""Exact two-phase primal simplex over the rationals.

Each tableau row is kept as a list of Python ints plus one positive row
denominator, so the only arithmetic in the inner loop is integer multiply /
subtract and a single ``gcd`` per touched row. Rows whose entry in the
pivot column is zero are left alone, which matters because the scheduling
LPs are sparse. Bland's rule guarantees termination.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Dict, List, Sequence, Tuple

from .errors import Infeasible, Unbounded

LE, GE, EQ = "<=", ">=", "=="


class LinearProgram:
    """``min c.x`` subject to sparse rows and ``x >= 0``."""

    def __init__(self, num_vars: int):
        self.num_vars = num_vars
        self.objective: Dict[int, Fraction] = {}
        self.rows: List[Tuple[Dict[int, Fraction], str, Fraction]] = []

    def add_row(self, coeffs: Dict[int, Fraction], sense: str, rhs) -> int:
        if sense not in (LE, GE, EQ):
            raise ValueError(sense)
        self.rows.append(({j: Fraction(a) for j, a in coeffs.items() if a != 0}, sense, Fraction(rhs)))
        return len(self.rows) - 1


class Result:
    def __init__(self, x: Tuple[Fraction, ...], value: Fraction, pivots: int):
        self.x = x
        self.value = value
        self.pivots = pivots


def _scale(values: Sequence[Fraction]) -> Tuple[List[int], int]:
    den = 1
    for v in values:
        den = lcm(den, v.denominator)
    return [int(v * den) for v in values], den


def _normalize(row: List[int], den: int) -> Tuple[List[int], int]:
    g = gcd(den, *row)
    if g > 1:
        return [a // g for a in row], den // g
    return row, den


class _Tableau:
    def __init__(self, rows, dens, basis, ncols):
        self.rows = rows
        self.dens = dens
        self.basis = basis
        self.ncols = ncols
        self.pivots = 0

    def pivot(self, r: int, c: int, objectives) -> None:
        prow = self.rows[r]
        p = prow[c]
        if p < 0:
            prow = [-a for a in prow]
            p = -p
        prow, pden = _normalize(prow, p)
        # after scaling the pivot entry equals pden, i.e. the actual value is 1
        self.rows[r], self.dens[r] = prow, pden
        p = prow[c]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[c]
            if f == 0:
                continue
            new = [a * p - f * b for a, b in zip(row, prow)]
            self.rows[i], self.dens[i] = _normalize(new, self.dens[i] * p)
        for obj in objectives:
            f = obj[0][c]
            if f == 0:
                continue
            new = [a * p - f * b for a, b in zip(obj[0], prow)]
            obj[0], obj[1] = _normalize(new, obj[1] * p)
        self.basis[r] = c
        self.pivots += 1

    def entering(self, obj, banned) -> int:
        row = obj[0]
        for j in range(self.ncols):
            if row[j] < 0 and j not in banned:
                return j
        return -1

    def leaving(self, c: int) -> int:
        best = -1
        for i, row in enumerate(self.rows):
            a = row[c]
            if a <= 0:
                continue
            if best < 0:
                best = i
                continue
            # ratio rhs_i / a_i versus rhs_best / a_best (row denominators cancel)
            lhs = row[-1] * self.rows[best][c]
            rhs = self.rows[best][-1] * a
            if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[best]):
                best = i
        return best

    def run(self, obj, banned, others) -> None:
        while True:
            c = self.entering(obj, banned)
            if c < 0:
                return
            r = self.leaving(c)
            if r < 0:
                raise Unbounded("objective unbounded below")
            self.pivot(r, c, [obj] + others)


def solve(lp: LinearProgram) -> Result:
    """Return an optimal basic solution, exactly.

    Raises :class:`Infeasible` if no feasible point exists.
    """
    nv = lp.num_vars
    prepared = []
    n_slack = 0
    n_art = 0
    for coeffs, sense, rhs in lp.rows:
        if rhs < 0:
            coeffs = {j: -a for j, a in coeffs.items()}
            rhs = -rhs
            sense = {LE: GE, GE: LE, EQ: EQ}[sense]
        prepared.append((coeffs, sense, rhs))
        if sense != EQ:
            n_slack += 1
        if sense != LE:
            n_art += 1
    ncols = nv + n_slack + n_art
    art_start = nv + n_slack
    rows, dens, basis = [], [], []
    s_idx, a_idx = nv, art_start
    for coeffs, sense, rhs in prepared:
        keys = sorted(coeffs)
        ints, _ = _scale([coeffs[j] for j in keys] + [rhs])
        row = [0] * (ncols + 1)
        for j, a in zip(keys, ints):
            row[j] = a
        row[-1] = ints[-1]
        if sense == LE:
            row[s_idx] = 1
            basis.append(s_idx)
            s_idx += 1
        else:
            if sense == GE:
                row[s_idx] = -1
                s_idx += 1
            row[a_idx] = 1
            basis.append(a_idx)
            a_idx += 1
        rows.append(row)
        dens.append(1)
    tab = _Tableau(rows, dens, basis, ncols)

    cost = [Fraction(0)] * (ncols + 1)
    for j, a in lp.objective.items():
        cost[j] = Fraction(a)
    c_ints, c_den = _scale(cost)
    phase2 = [c_ints, c_den]

    artificial = set(range(art_start, ncols))
    if artificial:
        p1 = [0] * (ncols + 1)
        for row, b in zip(rows, basis):
            if b in artificial:
                for j in range(ncols + 1):
                    p1[j] -= row[j]
        for j in artificial:
            p1[j] = 0
        phase1 = [p1, 1]
        tab.run(phase1, set(), [phase2])
        if phase1[0][-1] != 0:
            raise Infeasible("linear program has no feasible point")
        # drive zero-valued artificials out of the basis; drop redundant rows
        i = 0
        while i < len(tab.rows):
            if tab.basis[i] in artificial:
                row = tab.rows[i]
                col = next((j for j in range(art_start) if row[j] != 0), -1)
                if col < 0:
                    del tab.rows[i], tab.dens[i], tab.basis[i]
                    continue
                tab.pivot(i, col, [phase2])
            i += 1
    tab.run(phase2, artificial, [])

    x = [Fraction(0)] * nv
    for row, den, b in zip(tab.rows, tab.dens, tab.basis):
        if b < nv:
            x[b] = Fraction(row[-1], den)
    value = sum((lp.objective.get(j, 0) * x[j] for j in range(nv)), Fraction(0))
    return Result(tuple(x), value, tab.pivots)
