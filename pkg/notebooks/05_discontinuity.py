# %% [markdown]
# # Where the scaling function jumps
#
# For the quadratic map the scaling function is not continuous.  Addresses
# approaching (+0)^inf through the critical windows converge to a value
# twice s_f((+0)^inf); addresses approaching (-1)^inf while avoiding them
# converge to s_f((-1)^inf) itself.

# %%
from scalefn import maps
from scalefn.scaling import agreement_length, cauchy_rate, discontinuity_probe, routed_family
from scalefn.invariants import default_addresses
from scalefn.partition import critical_windows
from scalefn.symbolic import DualAddress

q = maps.quadratic()
print("critical windows at level 3:", sorted(critical_windows(q, 3)))

# %%
a0 = DualAddress.parse("|+0")
fam = routed_family(q, a0, range(4, 15), through="U", n1=3)
res = discontinuity_probe(q, a0, fam)
for b, v in zip(fam, res.values):
    print(f"agree {agreement_length(a0, b):2d}  {str(b):40s} {v:+.8f}")
print("s_f(a0) =", res.base_value, " ratio =", res.jump_ratio)

# %%
a1 = DualAddress.parse("|-1")
res = discontinuity_probe(q, a1, routed_family(q, a1, range(4, 15), through="V", n1=3))
print("V-routed ratio:", res.jump_ratio)

# %% [markdown]
# Cauchy rate of the truncations: gaps bounded by C |I_w|^alpha.

# %%
fit = cauchy_rate(q, default_addresses(q, 30))
print(f"alpha={fit.alpha:.3f} C={fit.C:.3g} window maxima={[round(r, 2) for r in fit.residuals]}")
