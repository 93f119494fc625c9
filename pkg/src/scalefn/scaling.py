"""Signed scales and the signed scaling function on the dual space.

For a dual address ``a = ... r_2 r_1 r_0`` the truncation ``w_n`` is the
word of its rightmost ``n`` symbols and ``v_{n-1}`` is ``w_n`` without
``r_0``.  The signed scale ``s(w_n)`` is the ratio of ``|I_{w_n}|`` to
``|I_{v_{n-1}}|`` carrying the orientation of ``r_0``; the scaling function
is its limit as ``n`` grows.

Both interval chains are pulled back incrementally in arbitrary precision
(``I_{r w} = g_r(I_w)``) and the working precision is raised whenever the
intervals get too short for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import FamilyNotConvergent, NotConverged, NotDecaying, NotGoodMarkov, UnsuitableWord
from .map_model import MarkovMap
from .partition import check_word, critical_level, critical_windows, decay_fit, pull_back, sign_of_word, word_from_indices
from .partition import working_dps, word_interval_mp
from .symbolic import DEFAULT_SEED, DualAddress, check_address, random_addresses, truncate

START_DPS = 50
GUARD_DIGITS = 25
SAFETY_FACTOR = 10.0
ACCEPT_RUN = 3


@dataclass(frozen=True)
class SignedScale:
    value: float
    word: tuple


@dataclass(frozen=True)
class ScalingEstimate:
    value: float
    depth: int
    error_bound: float
    converged: bool
    address: DualAddress | None = None


def signed_scale(fmap: MarkovMap, w) -> SignedScale:
    """Signed length ratio of ``I_w`` to its parent (``w`` minus its rightmost symbol)."""
    w = tuple(w)
    if len(w) < 2:
        raise ValueError("signed_scale needs a word of length >= 2")
    check_word(fmap, w)
    dps = working_dps(1e-15, len(w))
    while True:
        with mpmath.workdps(dps):
            lo, hi = word_interval_mp(fmap, w)
            plo, phi = word_interval_mp(fmap, w[:-1])
            num, den = hi - lo, phi - plo
            if num > mpmath.mpf(10) ** (GUARD_DIGITS - dps) or dps > 4000:
                ratio = num / den
                break
        dps *= 2
    value = sign_of_word(w) * sign_of_word(w[:-1]) * float(ratio)
    return SignedScale(value, w)


class _TruncationChain:
    """Signed scales ``s(w_n)`` of successive truncations of a dual address."""

    def __init__(self, fmap: MarkovMap, a: DualAddress, dps: int = START_DPS):
        self.fmap = fmap
        self.a = a
        self.dps = dps
        self.width = fmap.ambient.hi - fmap.ambient.lo
        self._reset()

    def _reset(self):
        with mpmath.workdps(self.dps):
            r0 = self.fmap.branches[self.a.symbol(0).branch]
            r1 = self.fmap.branches[self.a.symbol(1).branch]
            self.w = (mpmath.mpf(r0.a), mpmath.mpf(r0.b))
            self.w = pull_back(self.fmap, [r1.index], *self.w)
            self.v = (mpmath.mpf(r1.a), mpmath.mpf(r1.b))
        self.n = 2

    def _advance_to(self, n):
        while self.n < n:
            r = self.a.symbol(self.n).branch
            self.w = pull_back(self.fmap, [r], *self.w)
            self.v = pull_back(self.fmap, [r], *self.v)
            self.n += 1

    def scale(self, n):
        """``(s(w_n), |I_{w_n}|)`` as floats."""
        while True:
            if n < self.n:
                self._reset()
            with mpmath.workdps(self.dps):
                self._advance_to(n)
                num = self.w[1] - self.w[0]
                den = self.v[1] - self.v[0]
                floor = mpmath.mpf(10) ** (GUARD_DIGITS - self.dps) * self.width
                if num > floor and den > floor:
                    sign = self.a.symbol(0).sign
                    return sign * float(num / den), float(num)
            self.dps *= 2
            self._reset()


def scale_sequence(fmap: MarkovMap, a: DualAddress, depth: int):
    """Arrays ``(n, s(w_n), |I_{w_n}|)`` for ``n = 2..depth``."""
    check_address(fmap, a)
    chain = _TruncationChain(fmap, a)
    ns = np.arange(2, depth + 1)
    vals = np.empty(len(ns))
    lens = np.empty(len(ns))
    for j, n in enumerate(ns):
        vals[j], lens[j] = chain.scale(int(n))
    return ns, vals, lens


def scaling_function(
    fmap: MarkovMap,
    a: DualAddress,
    tol: float = 1e-9,
    max_depth: int = 40,
    min_depth: int = 2,
    strict: bool = True,
) -> ScalingEstimate:
    """Estimate ``s_f(a)`` from truncations of increasing length.

    Stops once three consecutive gaps ``|s(w_{n+1}) - s(w_n)|`` are at most
    ``tol``; the error bound is ten times the last gap.  When ``max_depth``
    is reached first, NotConverged is raised (its ``estimate`` attribute
    holds the partial result) unless ``strict`` is false.
    """
    if not 0 < tol < 1:
        raise ValueError("tol must lie in (0, 1)")
    check_address(fmap, a)
    chain = _TruncationChain(fmap, a)
    prev, _ = chain.scale(2)
    run = 0
    gap = math.inf
    n = 2
    while n < max_depth:
        n += 1
        cur, _ = chain.scale(n)
        gap = abs(cur - prev)
        prev = cur
        run = run + 1 if gap <= tol else 0
        if run >= ACCEPT_RUN and n >= min_depth:
            return ScalingEstimate(cur, n, SAFETY_FACTOR * gap, True, a)
    est = ScalingEstimate(prev, n, SAFETY_FACTOR * gap, False, a)
    if strict:
        raise NotConverged(f"scaling function at {a} did not converge by depth {max_depth}", estimate=est)
    return est


# --------------------------------------------------------------------------
# Hölder modulus
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class HolderFit:
    K: float
    mu: float
    residual: float
    max_diffs: tuple = ()


def _partner(fmap, a, n, rng, tries=200):
    """A random address sharing the rightmost ``n`` symbols of ``a`` and differing at the next."""
    t = tuple(s.branch for s in truncate(a, n))
    avoid = a.symbol(n).branch
    pred = [p for p in fmap.predecessors[t[0]] if p != avoid]
    if not pred:
        return None
    for _ in range(tries):
        cand = random_addresses(fmap, 1, seed=int(rng.integers(2**32)), max_tail=4, max_block=3)[0]
        # splice: candidate's sequence, then a bridge symbol, then t
        last = cand.symbol(0).branch
        bridge = [p for p in pred if p in fmap.successors[last]]
        if not bridge:
            continue
        x = int(rng.choice(bridge))
        tail = tuple(s.branch for s in cand.tail) + (x,) + t
        b = DualAddress(word_from_indices(fmap, tail), cand.block)
        if truncate(b, n) == truncate(a, n) and b.symbol(n) != a.symbol(n):
            return b
    return None


def holder_modulus(fmap: MarkovMap, depth: int = 10, samples: int = 200, seed: int = DEFAULT_SEED, tol: float = 1e-13) -> HolderFit:
    """Fit ``max |s_f(a) - s_f(b)| <= K mu**n`` over pairs agreeing in ``n`` rightmost symbols.

    Only maps without critical points qualify.  When every sampled
    difference is below ``tol`` the fit is degenerate and ``mu = 0``,
    ``K = 0`` is returned.  ``residual`` is the largest amount by which a
    sampled difference exceeds the least-squares line ``K_ls mu**n``,
    or the largest difference in the degenerate case.
    """
    if fmap.critical_points:
        raise NotGoodMarkov("holder_modulus needs a map without critical points")
    if fmap.n_branches > 1:
        try:
            decay_fit(fmap, 8)
        except NotDecaying as exc:
            raise NotGoodMarkov(str(exc)) from exc
    rng = np.random.default_rng(seed)
    ns = list(range(2, depth + 1))
    per = max(1, samples // len(ns))
    base = random_addresses(fmap, per, seed=seed)
    cache = {}

    def value(x):
        if x not in cache:
            cache[x] = scaling_function(fmap, x, tol=tol, max_depth=200, strict=False).value
        return cache[x]

    diffs = []
    for n in ns:
        worst = 0.0
        for a in base:
            b = _partner(fmap, a, n, rng)
            if b is not None:
                worst = max(worst, abs(value(a) - value(b)))
        diffs.append(worst)
    diffs = np.array(diffs)
    ns = np.array(ns)
    keep = diffs > tol
    if keep.sum() < 2:
        return HolderFit(0.0, 0.0, float(diffs.max(initial=0.0)), tuple(diffs))
    slope, icpt = np.polyfit(ns[keep], np.log(diffs[keep]), 1)
    mu = float(np.exp(slope))
    K = float(np.max(diffs[keep] / mu ** ns[keep]))
    line = np.exp(icpt) * mu ** ns
    residual = float(np.max(np.maximum(diffs - line, 0.0)))
    return HolderFit(K, mu, residual, tuple(diffs))


# --------------------------------------------------------------------------
# discontinuity probe
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeResult:
    jump_ratio: float
    values: tuple = ()
    agreement: tuple = ()
    base_value: float = float("nan")
    note: str = ""
    extra: dict = field(default_factory=dict)


def agreement_length(a: DualAddress, b: DualAddress, cap: int = 10_000) -> int:
    """Number of rightmost symbols shared by ``a`` and ``b``."""
    n = 0
    while n < cap and a.symbol(n) == b.symbol(n):
        n += 1
    return n


def discontinuity_probe(fmap: MarkovMap, a0: DualAddress, family, tol: float = 1e-9, max_depth: int = 200) -> ProbeResult:
    """Ratio of the limit of ``s_f`` along ``family`` to ``s_f(a0)``.

    The family must approach ``a0`` symbolically: its agreement lengths
    with ``a0`` must strictly increase.  The last member stands in for the
    limit.  Maps without critical points return ratio 1 with the note
    ``NoCriticalPoints``.
    """
    if not fmap.critical_points:
        return ProbeResult(1.0, note="NoCriticalPoints")
    family = list(family)
    if len(family) < 2:
        raise FamilyNotConvergent("need at least two family members")
    agree = [agreement_length(a0, b) for b in family]
    if any(y <= x for x, y in zip(agree, agree[1:])):
        raise FamilyNotConvergent(f"agreement lengths {agree} do not grow")
    base = scaling_function(fmap, a0, tol=tol, max_depth=max_depth).value
    vals = []
    for b in family:
        depth = max(max_depth, agreement_length(a0, b) + 60)
        vals.append(scaling_function(fmap, b, tol=tol, max_depth=depth).value)
    return ProbeResult(vals[-1] / base, tuple(vals), tuple(agree), base)


def routed_family(fmap: MarkovMap, a0: DualAddress, ks, through: str = "U", n1: int | None = None, max_ext: int = 4):
    """Addresses agreeing with ``a0`` in exactly ``k`` rightmost symbols, for each ``k`` in ``ks``.

    Beyond the shared part each member either enters the critical union
    (``through="U"``) or stays out of it forever (``through="V"``).  The
    lexicographically first short extension is taken.  Raises ValueError
    when no such extension exists.
    """
    if through not in ("U", "V"):
        raise ValueError("through must be 'U' or 'V'")
    if not fmap.critical_points:
        raise ValueError("routing needs a map with critical points")
    n1 = critical_level(fmap) if n1 is None else n1
    windows = critical_windows(fmap, n1)
    succ = fmap.successors
    out = []
    for k in ks:
        t = tuple(s.branch for s in truncate(a0, k))
        avoid = a0.symbol(k).branch
        found = None
        for cand in _extensions(fmap, t, avoid, max_ext):
            x, y = cand
            if y[0] not in succ[y[-1]]:
                continue
            b = DualAddress(word_from_indices(fmap, x + t), word_from_indices(fmap, y))
            hits = _window_hits(b, k, n1, windows, len(x) + len(y) * 2 + n1 + 2)
            if (through == "U" and any(hits)) or (through == "V" and not any(hits)):
                found = b
                break
        if found is None:
            raise ValueError(f"no extension of length <= {max_ext} routes through {through} at k={k}")
        out.append(found)
    return out


def _extensions(fmap, t, avoid, max_ext):
    """Candidate ``(bridge, block)`` pairs in order of total length, then lexicographically."""
    succ, pred = fmap.successors, fmap.predecessors
    m = fmap.n_branches

    def words(length, first=None):
        stack = [(i,) for i in range(m)]
        res = []
        while stack:
            p = stack.pop()
            if len(p) == length:
                res.append(p)
                continue
            stack.extend(p + (j,) for j in succ[p[-1]])
        return sorted(res)

    for total in range(2, 2 * max_ext + 1):
        for lx in range(1, total):
            ly = total - lx
            if lx > max_ext or ly > max_ext:
                continue
            for x in words(lx):
                if x[-1] == avoid or x[-1] not in pred[t[0]]:
                    continue
                for y in words(ly):
                    if x[0] in succ[y[-1]]:
                        yield x, y


def _window_hits(b, k, n1, windows, span):
    """Flags for windows whose leftmost symbol sits ``k..k+span`` places from the right."""
    hits = []
    for j in range(k, k + span):
        win = tuple(b.symbol(j - i).branch for i in range(n1))
        hits.append(win in windows)
    return hits


# --------------------------------------------------------------------------
# convergence rate
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RateFit:
    C: float
    alpha: float
    residuals: tuple
    windows: tuple
    samples: int


def _rate_samples(fmap, addresses, n_hi, floor):
    """``(depth, log gap, log length)`` rows past each address's tail transient."""
    rows = []
    for a in addresses:
        ns, vals, lens = scale_sequence(fmap, a, n_hi + 1)
        gaps = np.abs(np.diff(vals))
        start = len(a.tail) + 2 * a.period + 4
        for n, g, ln in zip(ns[:-1], gaps, lens[:-1]):
            if n >= start and g > floor:
                rows.append((int(n), math.log(g), math.log(ln)))
    return np.array(rows)


def _window_max(rows, alpha, edges):
    resid = rows[:, 1] - alpha * rows[:, 2]
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (rows[:, 0] >= lo) & (rows[:, 0] < hi)
        out.append(float(resid[sel].max()) if sel.any() else -math.inf)
    return np.array(out)


def cauchy_rate(fmap: MarkovMap, addresses, n_hi: int = 40, window: int = 6, floor: float = 1e-15) -> RateFit:
    """Fit ``|s(w_{n+1}) - s(w_n)| <= C |I_{w_n}|**alpha`` over sampled addresses.

    Gaps are grouped in windows of ``window`` consecutive depths (a
    multiple of every block period keeps periodic oscillation inside one
    window).  For a trial ``alpha`` the residual of a window is the largest
    ``log gap - alpha log|I_{w_n}|`` in it.  ``alpha`` is the largest value
    on a grid over ``[0, 2]`` for which these residuals are nonincreasing
    across windows, and ``C`` is the envelope constant at that ``alpha``.
    ``alpha = 0`` with non-monotone residuals means even the raw gaps fail
    to decrease; then ``alpha`` is returned as ``nan``.
    """
    rows = _rate_samples(fmap, addresses, n_hi, floor)
    if len(rows) < 3:
        raise NotConverged("too few nonzero gaps to fit a rate")
    first = int(rows[:, 0].min())
    edges = np.arange(first, int(rows[:, 0].max()) + window + 1, window)
    best = math.nan
    for alpha in np.linspace(2.0, 0.0, 2001):
        r = _window_max(rows, alpha, edges)
        r = r[np.isfinite(r)]
        if np.all(np.diff(r) <= 0):
            best = float(alpha)
            break
    a_use = 0.0 if math.isnan(best) else best
    r = _window_max(rows, a_use, edges)
    C = math.exp(float(np.max(rows[:, 1] - a_use * rows[:, 2])))
    return RateFit(C, best, tuple(float(x) for x in r), tuple(int(e) for e in edges[:-1]), len(rows))


__all__ = [
    "HolderFit",
    "ProbeResult",
    "RateFit",
    "ScalingEstimate",
    "SignedScale",
    "UnsuitableWord",
    "agreement_length",
    "cauchy_rate",
    "discontinuity_probe",
    "holder_modulus",
    "routed_family",
    "scale_sequence",
    "scaling_function",
    "signed_scale",
]
