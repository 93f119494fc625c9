# %% [markdown]
# # Markov maps
#
# A map is described by JSON: an ambient interval and a list of branches,
# each with a domain and an analytic model.  Building it checks that the
# domains tile the interval and that every image is a union of domains.

# %%
from pathlib import Path

import numpy as np

from scalefn import maps
from scalefn.map_model import asymmetry, critical_orbit, evaluate, is_geometrically_finite, load_map

HERE = Path(__file__).resolve().parent if "__file__" in globals() else Path.cwd()
MAPS = HERE / "maps"

# %%
f = load_map(MAPS / "example1.json")
print(f)
print("partition points:", f.points)
print("incidence:\n", f.incidence)
print("orientations:", f.orientations)

# %% [markdown]
# Three affine branches with slopes 4, -10/3 and 1.6.  Evaluate on a grid:

# %%
xs = np.linspace(0, 1, 11)
print(np.round([evaluate(f, x) for x in xs], 4))

# %% [markdown]
# The quadratic map 2 - x^2 on [-2, 2] has one critical point at 0 whose
# orbit 0 -> 2 -> -2 lands on a fixed point.

# %%
q = load_map(MAPS / "quadratic.json")
for orb in critical_orbit(q):
    print("orbit of", orb.c, ":", orb.points, "preperiod", orb.preperiod, "period", orb.period)
print("geometrically finite:", is_geometrically_finite(q))
print("asymmetry at 0:", asymmetry(q, 0.0))

# %% [markdown]
# A fold with different coefficients on the two sides of its critical point:

# %%
fold = maps.asymmetric_fold(left=3.0, right=1.0)
c = fold.critical_points[0].c
print("critical point", round(c, 6), "asymmetry", asymmetry(fold, c))

# %% [markdown]
# Conjugating by a diffeomorphism moves the partition points but keeps
# the incidence matrix.

# %%
g = load_map(MAPS / "example1_conjugated.json")
print("conjugated points:", np.round(g.points, 6))
print("same incidence:", np.array_equal(g.incidence, f.incidence))
