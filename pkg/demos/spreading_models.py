# %% [markdown]
# # Spreading and asymptotic-array profiles
#
# Norms of a fixed coefficient pattern placed on windows
# n <= i_1 < ... < i_n, and of diagonals through the rows of a Haar array.

# %%
from lebesguelab.experiments import asymptotic_array_profile, spreading_window_profile
from lebesguelab.haar import canonical_haar
from lebesguelab.norms import C0Norm, LpNorm, SchreierNorm, TsirelsonNorm

for oracle in (LpNorm(2), SchreierNorm(), TsirelsonNorm()):
    prof = spreading_window_profile(oracle, [1, 1, 1, 1], max_index=16)
    print(oracle.identifier, prof.minimum, prof.maximum, prof.windows)

# %%
can = canonical_haar()
for oracle in (C0Norm(), TsirelsonNorm()):
    prof = asymptotic_array_profile(oracle, can, 4)
    print(oracle.identifier, prof.minimum, prof.argmin)
