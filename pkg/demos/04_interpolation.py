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
# # Interpolation checks
#
# F averages a graph parameter over one edge-type class. The checks below
# compare neighbouring classes, closed-form increments and the averaged
# subadditivity bound.

# %%
from fractions import Fraction

from bisectlimit import DegreeSequence
from bisectlimit.config_model import Matching
from bisectlimit.hybrid import ConstrainedHybridParam
from bisectlimit.interpolation import (
    F_value,
    adjacent_pairs,
    check_desired_inequality,
    check_interpolation_inequality,
    check_lipschitz_F,
    check_subadditivity,
    enumerable_instances,
    half_edge_classes,
    increment_bruteforce,
    increment_formula,
    interpolation_sweep,
)

# %%
d, A, B = DegreeSequence((2, 2, 1, 1)), {1, 3}, {2, 4}
hb = ConstrainedHybridParam(A, B, Fraction(3, 4))
for t in ((1, 1, 1), (1, 1, 0), (0, 0, 3)):
    print(t, F_value(hb, d, A, B, t))
print(check_lipschitz_F(hb, d, A, B, adjacent_pairs(d, A, B)).to_json())
print(check_interpolation_inequality(hb, d, A, B, 1).to_json())

# %% [markdown]
# Adding one random edge inside A to the empty matching on four
# single-half-edge vertices: re-solving gives 2p - 1. The closed form with
# unordered-pair normalisation agrees; the squared normalisation does not.

# %%
four = DegreeSequence((1, 1, 1, 1))
m = Matching((), four)
dec = half_edge_classes(m, (), {1, 2}, {3, 4})
print("classes", [tuple(c[:4]) for c in dec.pairs])
print("brute force", increment_bruteforce(m, (), {1, 2}, {3, 4}, 0.75, "A"))
print("exact form ", increment_formula(dec, 0.75, "A"))
print("a^2 form   ", increment_formula(dec, 0.75, "A", "paper"))
print(check_desired_inequality(dec, 1).to_json())

# %%
print(check_subadditivity(four, {1, 2}, {3, 4}, 0.75).to_json())

# %% [markdown]
# A small exhaustive sweep.

# %%
worst = min(
    interpolation_sweep(d, A, B, (Fraction(1, 2), 1)).min_superadd_slack
    for d, A, B in enumerable_instances(8) if A and B
)
print("smallest local super-additivity slack up to 8 half-edges:", worst)
