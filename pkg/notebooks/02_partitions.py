# %% [markdown]
# # Partitions and their decay
#
# The n-th partition consists of the intervals I_w for admissible words w
# of length n.  Counts grow like the leading eigenvalue of the incidence
# matrix; the largest interval shrinks exponentially.

# %%
import numpy as np

from scalefn import maps
from scalefn.partition import decay_fit, parse_word, partition_levels, word_interval

f = maps.example1()
q = maps.quadratic()

# %%
iv = word_interval(f, parse_word("+0,-1"))
print("I_(+0)(-1) =", (iv.lo, iv.hi), "length", iv.length)

# %%
lead = max(abs(np.linalg.eigvals(f.incidence.astype(float))))
print(" n  count  lambda_n   sum")
for lvl in partition_levels(f, 10):
    print(f"{lvl.n:2d} {lvl.count:6d}  {lvl.lambda_:.6f}  {lvl.lengths.sum():.12f}")
print("leading eigenvalue of the incidence matrix:", round(lead, 6))

# %% [markdown]
# Fit lambda_n <= K mu^n.  Both maps decay with mu close to 1/2.

# %%
for name, m in (("example1", f), ("quadratic", q)):
    fit = decay_fit(m, 14)
    print(f"{name:10s} K={fit.K:.4f} mu={fit.mu:.4f}")

# %% [markdown]
# Near the critical point of the quadratic map intervals are longer than
# average at the same depth, since f' vanishes there and the pullbacks
# contract least.

# %%
lvl = list(partition_levels(q, 12))[-1]
mid = lvl.lo + lvl.lengths / 2
order = np.argsort(mid)
near = np.abs(mid[order]) < 0.05
print("mean log length near 0:", lvl.log_lengths[order][near].mean())
print("mean log length overall:", lvl.log_lengths.mean())
