"""Seeded random instance generators shared by the test modules."""
import random
from fractions import Fraction

from speedscale.core import Instance, Job, SpeedProfile
from speedscale.errors import ProfileError


def random_profile(rng: random.Random, k: int, max_speed: int = 8, max_power: int = 60,
                   slowest=None) -> SpeedProfile:
    while True:
        speeds = sorted(rng.sample(range(1, max_speed + 1), k))
        if slowest is not None:
            speeds = [Fraction(s, speeds[0]) * slowest for s in speeds]
        powers = sorted(rng.sample(range(1, max_power), k))
        try:
            return SpeedProfile(tuple(Fraction(s) for s in speeds), tuple(Fraction(p) for p in powers))
        except ProfileError:
            continue


def random_unit_fe(rng: random.Random, n: int, k: int, grid: int = 12, span: int = 3) -> Instance:
    jobs = [Job(Fraction(rng.randint(0, span * grid), grid), 1) for _ in range(n)]
    return Instance(jobs, random_profile(rng, k))


def random_fe(rng: random.Random, n: int, k: int, weighted: bool = True) -> Instance:
    jobs = [
        Job(Fraction(rng.randint(0, 12), 4), Fraction(rng.randint(1, 8), 4),
            Fraction(rng.randint(1, 4), 2) if weighted else 1)
        for _ in range(n)
    ]
    return Instance(jobs, random_profile(rng, k))


def random_two_speed_budget(rng: random.Random, n: int, volumes=(1, 2), slowest=1) -> Instance:
    """Unit-weight two-speed instance with ``P1 V/s1 < B < P2 V/s2``."""
    while True:
        prof = random_profile(rng, 2, max_speed=4, max_power=20, slowest=slowest)
        if prof.powers[0] / prof.speeds[0] < prof.powers[1] / prof.speeds[1]:
            break
    jobs = [Job(Fraction(rng.randint(0, 8), 4), Fraction(rng.choice(volumes))) for _ in range(n)]
    V = sum(j.volume for j in jobs)
    lo = prof.powers[0] * V / prof.speeds[0]
    hi = prof.powers[1] * V / prof.speeds[1]
    t = Fraction(rng.randint(1, 9), 10)
    return Instance(jobs, prof, budget=lo + t * (hi - lo))


# acceptance criteria outcomes, printed in the terminal summary by conftest
ACCEPTANCE = []


class criterion:
    """Context manager that records one PASS/FAIL line for an acceptance criterion."""

    def __init__(self, number, title):
        self.number, self.title, self.detail = number, title, ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        line = f"{status} criterion {self.number}: {self.title}"
        if self.detail:
            line += f" [{self.detail}]"
        if exc_type is not None and exc is not None and str(exc):
            line += f" -- {str(exc).splitlines()[0]}"
        ACCEPTANCE.append(line)
        print(line)
        return False
