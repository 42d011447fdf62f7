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
# # Hybrid bisection values
#
# HB_p averages the signed max-bisection over i.i.d. edge labels that are
# +1 with probability p. Exactly, it is a polynomial in p.

# %%
from fractions import Fraction

import numpy as np

from bisectlimit import MultiGraph, hybrid_exact, hybrid_mc
from bisectlimit.config_model import random_regular_multigraph
from bisectlimit.hybrid import hybrid_exact_fraction, hybrid_polynomial

# %%
k3 = MultiGraph(3, ((1, 2), (2, 3), (1, 3)))
print("K3 coefficients by number of +1 labels:", hybrid_polynomial(k3))
for p in (0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1):
    print(p, hybrid_exact_fraction(k3, p))

# %% [markdown]
# The curve p -> HB_p / n for a 12-vertex 3-regular graph, exact and sampled.

# %%
g = random_regular_multigraph(12, 3, seed=2)
for p in np.linspace(0, 1, 6):
    ex = hybrid_exact(g, p).value
    mc = hybrid_mc(g, p, 500, seed=1)
    print(f"p={p:.1f}  exact {ex / g.n:.4f}  mc {mc.value / g.n:.4f} +- {mc.stderr / g.n:.4f}")
