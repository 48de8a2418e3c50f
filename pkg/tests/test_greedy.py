import random
from fractions import Fraction

import pytest

from helpers import random_fe, random_unit_fe
from speedscale.core import Instance, Job, Ordering, SpeedProfile
from speedscale.errors import NotUnitInstance, PreconditionViolated
from speedscale.greedy import (
    AFFECTION_BREAK,
    LEVEL_HIT,
    ConstructionTrace,
    extended_affection,
    fifo_ordering,
    kappa_delta,
    kappa_delta_c,
    naive_per_level_sweep,
    naive_two_speed_sweep,
    validate_kd_rule,
)
from speedscale.lp import build_lp, solve
from speedscale.metrics import affection_sets, evaluate, optimality_witness
from speedscale.oracle import exact_optimum
from speedscale.reductions import counterexample_instance

F = Fraction
P12 = SpeedProfile((1, 2), (1, 4))


def obj(fn, inst):
    return evaluate(fn(inst)[0], inst).objective


def test_fifo_ordering():
    assert fifo_ordering(counterexample_instance(F(1, 4))).perm == (0, 1, 2)
    assert fifo_ordering(Instance([Job(5, 1), Job(0, 1)], P12)).perm == (1, 0)
    assert fifo_ordering(Instance([Job(0, 1), Job(0, 1)], P12)).perm == (0, 1)


def test_preconditions():
    with pytest.raises(NotUnitInstance):
        kappa_delta(Instance([Job(0, 2)], P12))
    with pytest.raises(NotUnitInstance):
        kappa_delta(Instance([Job(0, 1, 2)], P12))
    with pytest.raises(PreconditionViolated):
        kappa_delta(Instance([Job(0, 1)], P12, budget=5))


@pytest.mark.parametrize("alpha, kd, naive2, naive_k", [
    (F(1, 4), F(19, 3), F(77, 12), F(19, 3)),
    (F(3, 4), F(79, 12), F(79, 12), F(20, 3)),
])
def test_counterexample_objectives(alpha, kd, naive2, naive_k):
    inst = counterexample_instance(alpha)
    assert obj(kappa_delta, inst) == kd
    assert obj(naive_two_speed_sweep, inst) == naive2 == 6 + (2 + 2 * alpha) / 6
    assert obj(naive_per_level_sweep, inst) == naive_k == 6 + (1 + 4 * alpha) / 6


def test_counterexample_trace():
    sched, trace = kappa_delta(counterexample_instance(F(1, 4)))
    assert trace.to_text().splitlines() == [
        "job=1 x=[1 -> 1/2] kappa=3 delta=5/4 reason=SpeedLevelHit",
        "job=2 x=[1 -> 5/6] kappa=2 delta=5/4 reason=AffectionBreak",
    ]
    assert [s.reason for s in trace.steps] == [LEVEL_HIT, AFFECTION_BREAK]


def test_single_job_no_step():
    sched, trace = kappa_delta(Instance([Job(0, 1)], P12))
    assert trace.steps == []
    assert evaluate(sched, Instance([Job(0, 1)], P12)).speed == (1,)


def test_rule_validation():
    inst = counterexample_instance(F(1, 4))
    assert validate_kd_rule(kappa_delta(inst)[1], inst).ok
    report = validate_kd_rule(naive_two_speed_sweep(inst)[1], inst)
    assert not report.ok and report.condition == "rule" and report.step == 1
    report = validate_kd_rule(naive_per_level_sweep(counterexample_instance(F(3, 4)))[1],
                              counterexample_instance(F(3, 4)))
    assert not report.ok
    assert validate_kd_rule(ConstructionTrace(fifo_ordering(inst)), inst).ok


def test_greedy_matches_oracle_and_witness():
    rng = random.Random(31)
    for _ in range(60):
        inst = random_unit_fe(rng, rng.randint(1, 6), rng.randint(1, 4))
        sched, trace = kappa_delta(inst)
        value = evaluate(sched, inst).objective
        assert value == exact_optimum(inst).objective
        assert optimality_witness(sched, inst).ok
        assert validate_kd_rule(trace, inst).ok
        strict_sched, _ = kappa_delta(inst, strict=True)
        assert evaluate(strict_sched, inst).objective == value
        w = optimality_witness(strict_sched, inst)
        assert all(w.kappa_plus[j] - w.delta_plus[j] > 0 for j in range(inst.n))


def test_naive_variants_agree_for_two_speeds():
    rng = random.Random(32)
    for _ in range(60):
        inst = random_unit_fe(rng, rng.randint(1, 6), 2)
        value = obj(kappa_delta, inst)
        assert obj(naive_two_speed_sweep, inst) == value
        assert obj(naive_per_level_sweep, inst) == value


def test_extended_affection_cases():
    inst = Instance([Job(0, 1), Job(5, 1)], P12)
    sched = kappa_delta(inst)[0]
    rep = extended_affection(sched, inst, Ordering((0, 1)))
    assert rep.sets == (frozenset({0}), frozenset({1}))
    # equal extended completions: job 1 finishes early but waits for job 0
    inst = Instance([Job(0, 2), Job(0, 1)], SpeedProfile((1,), (1,)))
    from speedscale.dispatch import dispatch_ordering
    sched = dispatch_ordering(inst, Ordering((1, 0)), (2, 1))
    rep = extended_affection(sched, inst, Ordering((0, 1)))
    assert 1 in rep.sets[0]


def test_extended_equals_plain_on_fifo_unit():
    rng = random.Random(33)
    for _ in range(40):
        inst = random_unit_fe(rng, rng.randint(1, 5), 2)
        sched = kappa_delta(inst)[0]
        order = fifo_ordering(inst)
        m = evaluate(sched, inst, order)
        if len(set(m.completion)) < inst.n:
            continue
        rep = extended_affection(sched, inst, order)
        assert rep.sets == tuple(affection_sets(m.completion, inst.releases))


def test_kappa_delta_c_on_unit_fifo():
    rng = random.Random(34)
    for _ in range(40):
        inst = random_unit_fe(rng, rng.randint(1, 5), rng.randint(1, 3))
        sched, trace = kappa_delta_c(inst, fifo_ordering(inst))
        assert not trace.capped
        assert evaluate(sched, inst).objective == obj(kappa_delta, inst)


def test_kappa_delta_c_single_job():
    inst = Instance([Job(0, 3, 2)], P12)
    sched, _ = kappa_delta_c(inst, Ordering((0,)))
    assert evaluate(sched, inst).objective == solve(build_lp(inst, Ordering((0,)))).flow_objective


def test_kappa_delta_c_cap():
    rng = random.Random(35)
    inst = random_fe(rng, 4, 3)
    _, trace = kappa_delta_c(inst, Ordering.identity(4), max_steps=0)
    assert trace.capped
