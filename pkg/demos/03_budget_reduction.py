"""
From an energy budget to flow plus energy
=========================================

One job of volume 2, speeds 1 and 2, powers 1 and 4, budget 3. The
generator appends a long job and a group of late jobs and raises the fast
power just enough that the flow-plus-energy optimum spends exactly the
budgeted speed-up on the original job.
"""
from speedscale import Instance, Job, SpeedProfile, budget_to_fe, evaluate, exact_optimum
from speedscale.reductions import restrict_schedule

src = Instance([Job(0, 2)], SpeedProfile((1, 2), (1, 4)), budget=3)
red = budget_to_fe(src)
for key in ("Y", "makespan", "idle", "delta1"):
    print(f"{key:9s}= {red.provenance[key]}")
for t, c in zip(red.instance.templates, red.instance.counts):
    print(f"  {c} x job(r={t.release}, v={t.volume})")

res = exact_optimum(red.instance)
m = evaluate(res.schedule, red.instance)
print("completions", [str(c) for c in m.completion])
print("speeds     ", [str(s) for s in m.speed])

# Dropping the added jobs leaves a schedule for the budget instance.
mine = evaluate(restrict_schedule(res.schedule, [0]), src)
print(f"restricted flow {mine.flow} with energy {mine.energy}; budget optimum {exact_optimum(src).objective}")
