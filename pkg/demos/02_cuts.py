# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Cuts and bisections
#
# Exact values come from vectorised enumeration of balanced splits; the
# annealing heuristic takes over on larger graphs.

# %%
import time

from bisectlimit import LocalSearchParams, MultiGraph, SignedGraph, max_bisection, max_cut, min_bisection
from bisectlimit.config_model import random_regular_multigraph
from bisectlimit.cuts import constrained_max_bisection, local_search_bisection, signed_max_bisection

# %%
c4 = MultiGraph(4, ((1, 2), (2, 3), (3, 4), (1, 4)))
print("C4  MC", max_cut(c4).value, "MB", max_bisection(c4).value, "mB", min_bisection(c4).value)

p4 = SignedGraph.uniform(MultiGraph(4, ((1, 2), (2, 3), (3, 4))))
res = constrained_max_bisection(p4, {1, 2}, {3, 4})
print("P4 constrained to split {1,2} and {3,4}:", res.value, sorted(res.witness.parts()[0]))

# %% [markdown]
# Heuristic against exact on a signed random 3-regular graph.

# %%
g = random_regular_multigraph(22, 3, seed=5)
sg = SignedGraph(g, tuple(1 if i % 3 else -1 for i in range(g.m)))
t0 = time.perf_counter()
exact = signed_max_bisection(sg).value
t1 = time.perf_counter()
heur = local_search_bisection(sg, params=LocalSearchParams(restarts=10), seed=1).value
t2 = time.perf_counter()
print(f"exact {exact} in {t1 - t0:.2f}s, heuristic {heur} in {t2 - t1:.2f}s")

# %%
big = SignedGraph.uniform(random_regular_multigraph(200, 3, seed=7))
print("n=200 max-bisection lower bound:", local_search_bisection(big, seed=2).value, "of", big.graph.m, "edges")
