# %% [markdown]
# # The signed scaling function
#
# For a dual address a = ... r_2 r_1 r_0 the signed scale of a truncation
# w_n is the signed length ratio of I_{w_n} to its parent.  The scaling
# function is the limit as n grows.

# %%
import numpy as np

from scalefn import maps
from scalefn.scaling import scale_sequence, scaling_function
from scalefn.symbolic import DualAddress, periodic_addresses

f = maps.example1()

# %% [markdown]
# For Example 1 the value depends only on the last two symbols, and the
# seven admissible pairs give seven values.

# %%
for a in periodic_addresses(f, 2):
    est = scaling_function(f, a)
    last_two = ",".join(str(a.symbol(j)) for j in (1, 0))
    print(f"{str(a):10s} [{last_two}]  {est.value:+.6f}  depth {est.depth}")

# %% [markdown]
# On the quadratic map the truncations converge geometrically.

# %%
q = maps.quadratic()
a = DualAddress.parse("|+0,-1")
ns, vals, lens = scale_sequence(q, a, 36)
gaps = np.abs(np.diff(vals))
for n, v, g in list(zip(ns[1:], vals[1:], gaps))[::5]:
    print(f"n={n:2d}  s={v:+.12f}  gap={g:.2e}")
est = scaling_function(q, a, tol=1e-9)
print("value", est.value, "depth", est.depth, "error bound", est.error_bound)

# %% [markdown]
# C1 conjugation leaves the scaling function unchanged.

# %%
g = maps.example1(conjugacy={"kind": "sin", "epsilon": 0.03, "k": 1})
for a in periodic_addresses(f, 2)[:4]:
    print(str(a), scaling_function(f, a).value, scaling_function(g, a, tol=1e-11, max_depth=120).value)
