# %% [markdown]
# # Norming functionals for the weighted Tsirelson-type space
#
# Functionals are trees: leaves are signed coordinate functionals, nodes
# carry a weight index tuple and an admissible, very fast growing list of
# children.  A valid functional evaluated on x is a certified lower bound
# for the norm of x.

# %%
from fractions import Fraction

from lebesguelab.core import FinVec
from lebesguelab.wiw import (
    WeightSchedule,
    build_case1_instance,
    build_case2_instance,
    case1_functional,
    case2_functional,
    parse_functional,
    validate_functional,
    wiw_lower_bound,
)

sched = WeightSchedule()
print(validate_functional(parse_functional("(w 1 (leaf + 4) (leaf + 5))"), sched))
print(validate_functional(parse_functional("(w 1 (leaf + 1) (leaf + 2))"), sched))

# %%
x = FinVec.parse("3:1 4:1 5:1 6:1")
cert = wiw_lower_bound(x, sched)
print(cert.value, cert.witness.encoding)

# %% [markdown]
# Averages of 2^n successive normalized blocks: combining their norming
# functionals under the first weight gives exactly one half.

# %%
for n in range(0, 7):
    blocks, funcs = build_case2_instance(n, sched, weighted=True)
    cert = case2_functional(blocks, funcs, sched)
    print(n, cert.value / len(blocks))

# %% [markdown]
# Blocks normed by functionals of a common weight: dropping each first
# child costs at most 1/w per block.

# %%
blocks, funcs = build_case1_instance([2, 3, 4, 2], 16, sched, nested=True)
res = case1_functional(blocks, funcs, (1,), sched)
print(res.value, res.per_block, res.chain_holds)
assert all(p >= Fraction(1, 2) for p in res.per_block)
