# %% [markdown]
# # Riemann sums at dyadic meshes
#
# The standard function sends the k-th dyadic rational to e_k and every
# other point to 0.  Tagging each level-m cell with a dyadic point picks
# 2^m distinct unit vectors; the worst Riemann sum is then the norm of
# their sum divided by 2^m.

# %%
from lebesguelab.experiments import build_f_from_haar, riemann_sup, standard_function
from lebesguelab.haar import canonical_haar
from lebesguelab.norms import C0Norm, L1Norm, TsirelsonNorm

f = standard_function()
for m in range(1, 9):
    c0 = riemann_sup(f, m, C0Norm()).value
    l1 = riemann_sup(f, m, L1Norm()).value
    print(f"m={m:2d}  c0 {str(c0):>8}  l1 {l1}")

# %% [markdown]
# In c0 the sup is 2^-m and goes to zero; in l1 it stays at 1, so the
# function is not Riemann integrable there.
#
# Routing the dyadics through a Haar system instead changes which unit
# vectors appear.  Tsirelson's norm keeps the sup at 1/2 or more.

# %%
fh = build_f_from_haar(canonical_haar())
for m in range(1, 7):
    rep = riemann_sup(fh, m, TsirelsonNorm())
    print(m, rep.value, "exact" if rep.exact_sup else "search")
