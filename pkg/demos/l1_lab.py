# %% [markdown]
# # Step functions in L1
#
# Sign averages against the square function, a linear-programming
# estimate of the l1 lower constant, and exact disjointification.

# %%
from fractions import Fraction

from lebesguelab.l1lab import StepFunction, dor_disjointify, khintchine_check, theta_lower_estimate

one = StepFunction.constant(1)
rep = khintchine_check([one, one])
print("lhs", rep.lhs, "rhs", rep.rhs, "ratio", rep.ratio)

# %% [markdown]
# Two copies of the constant 1 attain the constant 1/sqrt(2) exactly.

# %%
rad = StepFunction(1, (1, -1))
print(theta_lower_estimate([one, rad]))
print(theta_lower_estimate([StepFunction.indicator(2, [0], 4), StepFunction.indicator(2, [3], 4)]))

# %%
fs = [StepFunction(2, (Fraction(3), 1, 0, 0)), StepFunction(2, (1, 1, 1, 1))]
for mode in ("greedy", "exact"):
    res = dor_disjointify(fs, Fraction(1, 2), mode)
    print(mode, res.min_mass, res.assignment.owners, res.success)
