# %% [markdown]
# # Haar-l1 witnesses
#
# For a Haar system, choose one index at least 2^m from each level-m cell
# and average.  The witness value at n is the best such average over
# levels m >= n.

# %%
from lebesguelab.experiments import check_haar_witness, haar_witness_profile
from lebesguelab.haar import canonical_haar, sigma
from lebesguelab.norms import C0Norm, TsirelsonNorm

can = canonical_haar()
print("sigma(1/2) =", sigma("1/2", can), " sigma(3/4) =", sigma("3/4", can))

# %%
for oracle in (C0Norm(), TsirelsonNorm()):
    print(oracle.identifier)
    for rep in haar_witness_profile(oracle, can, range(0, 9), 9):
        w = rep.witness
        assert check_haar_witness(oracle, can, w["m"], w["indices"]) == rep.value
        print(f"  n={rep.level} m={w['m']} value={rep.value}")

# %% [markdown]
# c0 decays like 2^-n.  Tsirelson stays at 1/2, and each witness
# re-evaluates from its index list alone.
