"""
The SubsetSum gap at toy size
=============================

Each element becomes a long job plus a short job released halfway through
it. A YES answer should let the optimum's flow drop to a threshold. With
three elements the threshold separates YES from NO; with two elements the
margin built into the construction is too thin and NO instances reach it.
"""
from speedscale import exact_optimum, subsetsum_to_bidua
from speedscale.reductions import is_subset_sum

cases = [((2, 2, 2), A) for A in (3, 4, 5)] + [((2, 2), 3), ((3, 3), 4), ((4, 4), 7)]
for elems, A in cases:
    red = subsetsum_to_bidua(elems, A)
    flow = exact_optimum(red.instance).objective
    threshold = red.provenance["threshold"]
    yes = is_subset_sum(elems, A)
    below = flow <= threshold
    mark = "ok" if below == yes else "MISMATCH"
    print(f"{elems} A={A}: {'YES' if yes else 'NO ':3s} flow {str(flow):6s} threshold {str(threshold):6s} {mark}")
