"""
Why the simple greedy sweeps break with three speeds
=====================================================

Three unit jobs, speeds 1, 2, 3. Two natural generalizations of the
two-speed greedy each lose on one side of alpha = 1/2; the kappa-Delta rule
picks the better one every time.
"""
from fractions import Fraction
from pathlib import Path

from speedscale import counterexample_instance, evaluate, exact_optimum, kappa_delta
from speedscale import naive_per_level_sweep, naive_two_speed_sweep, validate_kd_rule
from speedscale.gantt import emit_gantt

out = Path(__file__).with_name("output")
out.mkdir(exist_ok=True)

for alpha in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
    inst = counterexample_instance(alpha)
    print(f"alpha = {alpha}: shrinking energies {[str(d) for d in inst.profile.deltas]}")
    for name, fn in [("one sweep", naive_two_speed_sweep), ("per level", naive_per_level_sweep),
                     ("kappa-Delta", kappa_delta)]:
        sched, trace = fn(inst)
        report = validate_kd_rule(trace, inst)
        verdict = "follows the rule" if report.ok else f"breaks '{report.condition}' at step {report.step}"
        print(f"  {name:12s} objective {evaluate(sched, inst).objective}  ({verdict})")
    print(f"  {'oracle':12s} objective {exact_optimum(inst).objective}")

# The step log explains the choice: job 1 goes straight to speed 2, then job 2
# shrinks only until its completion meets job 3's release.
inst = counterexample_instance(Fraction(1, 4))
sched, trace = kappa_delta(inst)
print()
print(trace.to_text(), end="")

emit_gantt(sched, inst, out / "counterexample.svg", "kappa-Delta schedule, alpha = 1/4")
print(f"wrote {out / 'counterexample.svg'}")
