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
# # Degree sequences and the configuration model
#
# A multigraph is drawn by pairing half-edges uniformly at random.
# Restricting the pairing to a class M(alpha, beta, gamma) fixes how many
# edges fall inside A, inside B and across.

# %%
from collections import Counter

from bisectlimit import DegreeSequence, sample_complete_matching, truncated_poisson, wasserstein
from bisectlimit.config_model import EdgeTypeCounts, enumerate_class, feasible_triples, graph_of_matching, sample_in_class
from bisectlimit.degrees import empirical_distribution, sample_iid_degrees

# %%
mu = truncated_poisson(2.0, 10)
d = sample_iid_degrees(mu, 2000, seed=1)
print("mean degree", mu.mean, "sample W1 to mu", wasserstein(empirical_distribution(d), mu))

# %% [markdown]
# A uniform complete matching on a small sequence, and the graph it induces.

# %%
d = DegreeSequence((2, 2, 1, 1))
m = sample_complete_matching(d, seed=3)
print(m.to_json())
print(graph_of_matching(m).edges)

# %% [markdown]
# Feasible edge-type classes for the split A = {1, 3}, B = {2, 4}, their
# sizes, and a sampling histogram over the largest one.

# %%
A, B = {1, 3}, {2, 4}
for t in feasible_triples(d, A, B):
    print(tuple(t), len(enumerate_class(d, A, B, t)))

t = EdgeTypeCounts(1, 1, 1)
hist = Counter(tuple(sorted(graph_of_matching(sample_in_class(d, A, B, t, s)).edges)) for s in range(900))
for edges, k in sorted(hist.items()):
    print(edges, k)
