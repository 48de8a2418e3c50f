"""Domain types and exact-arithmetic policy.

Every quantity (release, volume, weight, speed, power, budget) is a
:class:`fractions.Fraction`. Floats are rejected at the boundary so that the
solvers can rely on exact equalities such as ``C_j == r_j'``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import (
    EmptyProfile,
    NegativeRelease,
    NonMonotoneSpeeds,
    NonPositiveVolume,
    NonPositiveWeight,
    OrderingError,
    SuperfluousSpeed,
)

__all__ = [
    "Q", "INF", "NEG_INF", "Infinity", "SpeedProfile", "Job", "Instance",
    "Ordering", "validate_profile", "validate_instance", "shrinking_energies",
]


def Q(value) -> Fraction:
    """Coerce ``value`` to an exact rational.

    Accepts ints, Fractions and strings such as ``"1/3"`` or ``"0.25"``.
    Floats are refused: a binary float is almost never the number the caller
    meant.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError(f"refusing float {value!r}; pass a string or Fraction")
    # numbers.Rational implementations (e.g. gmpy2.mpq)
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot interpret {value!r} as a rational")


@functools.total_ordering
class Infinity:
    """Signed infinity that compares exactly against rationals.

    Used for the sentinel shrinking energies at both ends of the speed range.
    """

    __slots__ = ("sign",)

    def __init__(self, sign: int):
        self.sign = 1 if sign > 0 else -1

    def __repr__(self):
        return "+inf" if self.sign > 0 else "-inf"

    __str__ = __repr__

    def __hash__(self):
        return hash(("Infinity", self.sign))

    def __eq__(self, other):
        return isinstance(other, Infinity) and other.sign == self.sign

    def __lt__(self, other):
        if isinstance(other, Infinity):
            return self.sign < other.sign
        return self.sign < 0

    def __neg__(self):
        return NEG_INF if self.sign > 0 else INF

    def __add__(self, other):
        if isinstance(other, Infinity) and other.sign != self.sign:
            raise ArithmeticError("inf - inf is undefined")
        return self

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Infinity):
            return INF if self.sign == other.sign else NEG_INF
        if other == 0:
            raise ArithmeticError("0 * inf is undefined")
        return self if other > 0 else -self

    __rmul__ = __mul__


INF = Infinity(1)
NEG_INF = Infinity(-1)


def shrinking_energies(speeds: Sequence[Fraction], powers: Sequence[Fraction]) -> tuple:
    """Marginal energy per unit of processing time saved between adjacent levels."""
    return tuple(
        (powers[i + 1] * speeds[i] - powers[i] * speeds[i + 1]) / (speeds[i + 1] - speeds[i])
        for i in range(len(speeds) - 1)
    )


def validate_profile(speeds, powers) -> tuple:
    """Check a speed/power table and return its shrinking-energy table.

    Raises :class:`EmptyProfile`, :class:`NonMonotoneSpeeds` (listing every
    offending 1-based index) or :class:`SuperfluousSpeed` (listing every
    interior level whose neighbours dominate it).
    """
    speeds = tuple(Q(s) for s in speeds)
    powers = tuple(Q(p) for p in powers)
    if not speeds or not powers:
        raise EmptyProfile("profile needs at least one speed")
    if len(speeds) != len(powers):
        raise NonMonotoneSpeeds((), f"{len(speeds)} speeds but {len(powers)} powers")
    bad = [i + 1 for i, (s, p) in enumerate(zip(speeds, powers)) if s <= 0 or p <= 0]
    bad += [
        i + 1 for i in range(1, len(speeds))
        if speeds[i] <= speeds[i - 1] or powers[i] <= powers[i - 1]
    ]
    if bad:
        raise NonMonotoneSpeeds(sorted(set(bad)))
    deltas = shrinking_energies(speeds, powers)
    # level i+1 (1-based) is superfluous when delta_{i} >= delta_{i+1}
    superfluous = [i + 2 for i in range(len(deltas) - 1) if deltas[i] >= deltas[i + 1]]
    if superfluous:
        raise SuperfluousSpeed(superfluous)
    return deltas


@dataclass(frozen=True)
class SpeedProfile:
    """Allowed speeds ``s_1 < ... < s_k`` with powers ``P_1 < ... < P_k``.

    Levels are indexed from 0 in code. ``delta(i)`` is the shrinking energy
    between level ``i`` and ``i + 1``; ``delta(-1)`` and ``delta(k - 1)`` are
    the ``-inf`` / ``+inf`` sentinels.
    """

    speeds: tuple
    powers: tuple
    deltas: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        speeds = tuple(Q(s) for s in self.speeds)
        powers = tuple(Q(p) for p in self.powers)
        object.__setattr__(self, "speeds", speeds)
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "deltas", validate_profile(speeds, powers))

    @property
    def k(self) -> int:
        return len(self.speeds)

    def delta(self, i: int):
        if i < 0:
            return NEG_INF
        if i >= self.k - 1:
            return INF
        return self.deltas[i]

    def time(self, volume, level: int) -> Fraction:
        """Processing time of ``volume`` run entirely at ``level``."""
        return volume / self.speeds[level]

    def energy(self, volume, level: int) -> Fraction:
        return volume * self.powers[level] / self.speeds[level]


@dataclass(frozen=True)
class Job:
    release: Fraction
    volume: Fraction
    weight: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "release", Q(self.release))
        object.__setattr__(self, "volume", Q(self.volume))
        object.__setattr__(self, "weight", Q(self.weight))


class Instance:
    """Jobs, a speed profile and a variant (flow+energy, or flow under a budget).

    Jobs may be given with multiplicities: ``Instance(templates, profile,
    counts=[1, 5000])`` stores two templates but represents 5001 jobs. The
    expanded job list is built on first access to :attr:`jobs`.
    """

    def __init__(self, jobs: Iterable[Job], profile: SpeedProfile, budget=None,
                 counts: Optional[Iterable[int]] = None):
        self.templates = tuple(j if isinstance(j, Job) else Job(*j) for j in jobs)
        self.counts = tuple(int(c) for c in counts) if counts is not None else (1,) * len(self.templates)
        if len(self.counts) != len(self.templates) or any(c < 1 for c in self.counts):
            raise ValueError("counts must be positive and match the job templates")
        self.profile = profile
        self.budget = None if budget is None else Q(budget)

    def __repr__(self):
        variant = "FE" if self.budget is None else f"B({self.budget})"
        return f"Instance(n={self.n}, k={self.profile.k}, {variant})"

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.templates, self.counts, self.profile, self.budget) == (
            other.templates, other.counts, other.profile, other.budget)

    def __hash__(self):
        return hash((self.templates, self.counts, self.profile, self.budget))

    @functools.cached_property
    def jobs(self) -> tuple:
        if all(c == 1 for c in self.counts):
            return self.templates
        return tuple(j for j, c in zip(self.templates, self.counts) for _ in range(c))

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def is_fe(self) -> bool:
        return self.budget is None

    @property
    def releases(self) -> tuple:
        return tuple(j.release for j in self.jobs)

    @property
    def volumes(self) -> tuple:
        return tuple(j.volume for j in self.jobs)

    @property
    def weights(self) -> tuple:
        return tuple(j.weight for j in self.jobs)

    @property
    def total_volume(self) -> Fraction:
        return sum((j.volume * c for j, c in zip(self.templates, self.counts)), Fraction(0))

    @property
    def unit_size(self) -> bool:
        return all(j.volume == 1 for j in self.templates)

    @property
    def weighted(self) -> bool:
        return any(j.weight != 1 for j in self.templates)

    def x(self, j: int, level: int) -> Fraction:
        """Processing time of job ``j`` run entirely at ``level``."""
        return self.jobs[j].volume / self.profile.speeds[level]

    def e(self, j: int, level: int) -> Fraction:
        """Energy of job ``j`` run entirely at ``level``."""
        return self.profile.energy(self.jobs[j].volume, level)

    def replace(self, jobs=None, profile=None, budget="keep", counts="keep") -> "Instance":
        return Instance(
            self.templates if jobs is None else jobs,
            self.profile if profile is None else profile,
            self.budget if budget == "keep" else budget,
            counts=(self.counts if jobs is None else None) if counts == "keep" else counts,
        )

    def with_budget(self, budget) -> "Instance":
        return self.replace(budget=budget)


def validate_instance(instance: Instance) -> tuple:
    """Check job invariants and normalize releases so the earliest is 0.

    Returns ``(normalized_instance, shift)`` where ``shift`` was added to
    every release (so it is ``-min r_j``). Validation is idempotent.
    """
    # the profile validated itself on construction; re-run for clarity of errors
    validate_profile(instance.profile.speeds, instance.profile.powers)
    offset = 0
    for t, c in zip(instance.templates, instance.counts):
        if t.volume <= 0:
            raise NonPositiveVolume(offset)
        if t.weight <= 0:
            raise NonPositiveWeight(offset)
        if t.release < 0:
            raise NegativeRelease(offset)
        offset += c
    if not instance.templates:
        return instance, Fraction(0)
    shift = -min(t.release for t in instance.templates)
    if shift == 0:
        return instance, Fraction(0)
    jobs = [Job(t.release + shift, t.volume, t.weight) for t in instance.templates]
    return Instance(jobs, instance.profile, instance.budget, counts=instance.counts), shift


@dataclass(frozen=True)
class Ordering:
    """A bijection over job indices, read as a completion or priority order.

    ``perm[p]`` is the job at position ``p`` (0-based, earliest first).
    """

    perm: tuple
    kind: str = "completion"

    def __post_init__(self):
        perm = tuple(int(j) for j in self.perm)
        object.__setattr__(self, "perm", perm)
        if self.kind not in ("completion", "priority"):
            raise OrderingError(f"unknown ordering kind {self.kind!r}")
        if sorted(perm) != list(range(len(perm))):
            raise OrderingError(f"{perm} is not a permutation of 0..{len(perm) - 1}")

    def __len__(self):
        return len(self.perm)

    def __iter__(self):
        return iter(self.perm)

    @functools.cached_property
    def position(self) -> tuple:
        pos = [0] * len(self.perm)
        for p, j in enumerate(self.perm):
            pos[j] = p
        return tuple(pos)

    @classmethod
    def identity(cls, n: int, kind: str = "completion") -> "Ordering":
        return cls(tuple(range(n)), kind)
