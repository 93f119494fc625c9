# %% [markdown]
# # Invariants recovered from the scaling function
#
# Eigenvalues of periodic orbits are products of scaling values around the
# cycle; exponents of critical points come from scales of the intervals
# adjacent to them.

# %%
from scalefn import maps
from scalefn.invariants import compare_invariants, default_addresses, eigenvalue_record, exponent_estimate
from scalefn.symbolic import periodic_addresses

# %%
f = maps.example1()
for a in periodic_addresses(f, 2):
    r = eigenvalue_record(f, a)
    print(f"{str(a):10s} p={r.p:.6f} direct={r.direct:+.6f} from scales={r.via_scaling:+.6f}")

# %%
for name, m in (("quadratic", maps.quadratic()), ("cubic", maps.cubic())):
    for side in (-1, 1):
        e = exponent_estimate(m, 0.0, depth=18, side=side)
        print(f"{name:9s} side {side:+d}: gamma={e.gamma:.10f} error={e.error:.1e} ({e.case})")

# %% [markdown]
# Two critical points in a chain: the first one's exponent is read off
# against the second, the second one's against a periodic cycle.

# %%
ch = maps.chain()
for c, side in ((0.25, -1), (0.5, 1)):
    e = exponent_estimate(ch, c, side=side)
    print(f"c={c}: gamma={e.gamma:.10f} case={e.case} next critical={e.chain}")

# %% [markdown]
# Comparing two maps with the same combinatorics.

# %%
addrs = default_addresses(f, 30)
same = compare_invariants(f, maps.example1(conjugacy={"kind": "sin", "epsilon": 0.03, "k": 1}), addrs)
diff = compare_invariants(f, maps.example1(0.3, 0.3, 0.4), addrs)
print("conjugate:", same.verdict, max(r["diff"] for r in same.scaling))
print("other lengths:", diff.verdict, len(diff.disagreements), "disagreements")
