"""Nested partitions obtained by pulling the first partition back through inverse branches.

Words are tuples of :class:`Symbol`; the interval named by
``w = r_0 r_1 ... r_n`` is ``g_{r_0} o ... o g_{r_n}(f(I_{r_n}))``.  Single
words are pulled back in arbitrary precision (:func:`word_interval`); whole
levels are computed in double precision with numpy (:func:`partition_level`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import mpmath
import numpy as np

from .errors import NotDecaying, OutOfDomain, UnsuitableWord
from .map_model import MarkovMap

SNAP_DIGITS = 10
FLOAT_SNAP = 1e-14


class Symbol(NamedTuple):
    branch: int
    sign: int

    def __str__(self):
        return f"{'+' if self.sign > 0 else '-'}{self.branch}"

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if not text or text[0] not in "+-":
            raise ValueError(f"symbol {text!r} must look like +0 or -1")
        return cls(int(text[1:]), 1 if text[0] == "+" else -1)


def parse_word(text) -> tuple:
    text = text.strip()
    if not text:
        return ()
    return tuple(Symbol.parse(t) for t in text.split(","))


def format_word(w) -> str:
    return ",".join(str(s) for s in w)


def word_from_indices(fmap: MarkovMap, indices) -> tuple:
    orient = fmap.orientations
    return tuple(Symbol(int(i), orient[int(i)]) for i in indices)


def check_word(fmap: MarkovMap, w):
    """Raise UnsuitableWord unless every transition of ``w`` is admissible."""
    orient = fmap.orientations
    m = fmap.n_branches
    for s in w:
        if not 0 <= s.branch < m:
            raise UnsuitableWord(f"symbol {s} names no branch")
        if s.sign != orient[s.branch]:
            raise UnsuitableWord(f"symbol {s} has the wrong orientation for branch {s.branch}")
    inc = fmap.incidence
    for p, q in zip(w, w[1:]):
        if not inc[p.branch, q.branch]:
            raise UnsuitableWord(f"transition {p} -> {q} is not admissible")


def is_suitable(fmap: MarkovMap, w) -> bool:
    try:
        check_word(fmap, w)
    except UnsuitableWord:
        return False
    return True


def sign_of_word(w) -> int:
    """+1 when ``w`` contains an even number of orientation-reversing symbols."""
    neg = sum(1 for s in w if s.sign < 0)
    return -1 if neg % 2 else 1


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    length: float
    log_length: float

    def contains(self, x, tol=0.0):
        return self.lo - tol <= x <= self.hi + tol


def working_dps(precision=1e-15, depth=0):
    return 25 + int(math.ceil(-math.log10(precision))) + int(depth)


def _snap_tol(fmap, y):
    width = fmap.ambient.hi - fmap.ambient.lo
    if isinstance(y, mpmath.mpf):
        return mpmath.mpf(10) ** (SNAP_DIGITS - mpmath.mp.dps) * width
    return FLOAT_SNAP * width


def _inverse_snapped(br, y, tol):
    """``g(y)``, returning the exact domain endpoint when ``y`` is an image endpoint.

    Partition points map exactly onto partition points; snapping keeps
    roundoff in the map description from being amplified near critical
    values.
    """
    ilo, ihi = br.image
    lo_end, hi_end = (br.a, br.b) if br.orientation > 0 else (br.b, br.a)
    if abs(y - ilo) <= tol:
        return type(y)(lo_end) if isinstance(y, mpmath.mpf) else lo_end
    if abs(y - ihi) <= tol:
        return type(y)(hi_end) if isinstance(y, mpmath.mpf) else hi_end
    return br.model.inverse(y)


def pull_back(fmap: MarkovMap, indices, lo, hi):
    """Apply ``g_{indices[0]} o ... o g_{indices[-1]}`` to ``[lo, hi]`` (no validation)."""
    branches = fmap.branches
    tol = _snap_tol(fmap, lo)
    for i in reversed(indices):
        br = branches[i]
        x, y = _inverse_snapped(br, lo, tol), _inverse_snapped(br, hi, tol)
        lo, hi = (x, y) if x <= y else (y, x)
    return lo, hi


def word_interval_mp(fmap: MarkovMap, w):
    """Endpoints of ``I_w`` as mpmath numbers at the current working precision."""
    last = fmap.branches[w[-1].branch]
    lo, hi = mpmath.mpf(last.a), mpmath.mpf(last.b)
    return pull_back(fmap, [s.branch for s in w[:-1]], lo, hi)


def word_interval(fmap: MarkovMap, w, precision: float = 1e-15) -> Interval:
    """The interval ``I_w`` named by a suitable word.

    Endpoints are pulled back from the first partition in arbitrary
    precision, so ``length`` and ``log_length`` stay accurate even when the
    interval is far below double-precision resolution.
    """
    w = tuple(w)
    if not w:
        raise UnsuitableWord("empty word")
    check_word(fmap, w)
    with mpmath.workdps(working_dps(precision, len(w))):
        lo, hi = word_interval_mp(fmap, w)
        length = hi - lo
        log_len = float(mpmath.log(length)) if length > 0 else -math.inf
        return Interval(float(lo), float(hi), float(length), log_len)


# --------------------------------------------------------------------------
# whole levels
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PartitionLevel:
    """All intervals of the ``n``-th partition, words sorted lexicographically.

    ``codes`` is an integer array of shape ``(count, n)`` holding the branch
    indices of each word; ``lo`` and ``hi`` are the interval endpoints.
    """

    n: int
    codes: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    orientations: tuple

    @property
    def count(self):
        return len(self.lo)

    @property
    def lengths(self):
        return self.hi - self.lo

    @property
    def log_lengths(self):
        return np.log(self.lengths)

    @property
    def lambda_(self):
        return float(np.max(self.lengths))

    def word(self, k):
        return tuple(Symbol(int(i), self.orientations[int(i)]) for i in self.codes[k])

    @property
    def words(self):
        return [self.word(k) for k in range(self.count)]

    @property
    def entries(self):
        return [
            (self.word(k), Interval(float(a), float(b), float(b - a), float(math.log(b - a))))
            for k, (a, b) in enumerate(zip(self.lo, self.hi))
        ]


def _sorted_level(n, codes, lo, hi, orientations):
    order = np.lexsort(codes.T[::-1]) if codes.size else np.arange(len(lo))
    return PartitionLevel(n, codes[order], lo[order], hi[order], orientations)


def first_level(fmap: MarkovMap) -> PartitionLevel:
    m = fmap.n_branches
    codes = np.arange(m, dtype=np.int16).reshape(m, 1)
    lo = np.array([b.a for b in fmap.branches])
    hi = np.array([b.b for b in fmap.branches])
    return PartitionLevel(1, codes, lo, hi, fmap.orientations)


def _inverse_array(br, y, tol):
    ilo, ihi = br.image
    lo_end, hi_end = (br.a, br.b) if br.orientation > 0 else (br.b, br.a)
    x = br.model.inverse(y)
    x = np.where(np.abs(y - ilo) <= tol, lo_end, x)
    return np.where(np.abs(y - ihi) <= tol, hi_end, x)


def refine(fmap: MarkovMap, level: PartitionLevel) -> PartitionLevel:
    """The next partition: every suitable one-symbol extension of every word.

    Extensions are generated as ``I_{r w} = g_r(I_w)``, which yields the same
    set of words as extending on the right and keeps every interval a direct
    pullback of first-partition data.
    """
    first = level.codes[:, 0]
    tol = FLOAT_SNAP * (fmap.ambient.hi - fmap.ambient.lo)
    parts_codes, parts_lo, parts_hi = [], [], []
    for r, br in enumerate(fmap.branches):
        mask = np.isin(first, fmap.successors[r])
        if not mask.any():
            continue
        x = _inverse_array(br, level.lo[mask], tol)
        y = _inverse_array(br, level.hi[mask], tol)
        a, b = np.minimum(x, y), np.maximum(x, y)
        # clamp roundoff outside the branch domain
        a = np.clip(a, br.a, br.b)
        b = np.clip(b, br.a, br.b)
        codes = np.empty((int(mask.sum()), level.n + 1), dtype=np.int16)
        codes[:, 0] = r
        codes[:, 1:] = level.codes[mask]
        parts_codes.append(codes)
        parts_lo.append(a)
        parts_hi.append(b)
    codes = np.concatenate(parts_codes)
    return _sorted_level(level.n + 1, codes, np.concatenate(parts_lo), np.concatenate(parts_hi), fmap.orientations)


def partition_levels(fmap: MarkovMap, n_max: int):
    """Yield the partitions ``eta_1, ..., eta_{n_max}``."""
    lvl = first_level(fmap)
    yield lvl
    for _ in range(n_max - 1):
        lvl = refine(fmap, lvl)
        yield lvl


def partition_level(fmap: MarkovMap, n: int) -> PartitionLevel:
    for lvl in partition_levels(fmap, n):
        pass
    return lvl


class DecayFit(NamedTuple):
    K: float
    mu: float
    lambdas: tuple = ()


def decay_fit(fmap: MarkovMap, n_max: int) -> DecayFit:
    """Fit ``lambda_n <= K mu**n`` over generations ``1..n_max``.

    ``mu`` comes from a least-squares line through ``log lambda_n``; ``K`` is
    then the smallest constant making the bound hold on every generation.
    Raises NotDecaying when the fitted ``mu`` is not below 1.
    """
    if n_max < 4:
        raise ValueError("decay_fit needs n_max >= 4")
    lambdas = np.array([lvl.lambda_ for lvl in partition_levels(fmap, n_max)])
    n = np.arange(1, n_max + 1)
    slope, _ = np.polyfit(n, np.log(lambdas), 1)
    mu = float(np.exp(slope))
    K = float(np.max(lambdas / mu ** n))
    fit = DecayFit(K, mu, tuple(float(v) for v in lambdas))
    if mu >= 1 - 1e-12:
        err = NotDecaying(f"partition diameters do not decay (fitted mu = {mu:.6g})")
        err.fit = fit
        raise err
    return fit


def distortion_ratio(fmap: MarkovMap, w, x, y) -> float:
    """``|g_w'(x)| / |g_w'(y)|`` by the chain rule, summed in log space."""
    w = tuple(w)
    check_word(fmap, w)
    lo, hi = fmap.branches[w[-1].branch].image
    for p in (x, y):
        if not lo - 1e-12 <= p <= hi + 1e-12:
            raise OutOfDomain(f"{p!r} is outside the domain [{lo}, {hi}] of g_w")
    if x == y:
        return 1.0
    total = 0.0
    zx, zy = x, y
    for s in reversed(w):
        model = fmap.branches[s.branch].model
        zx, zy = model.inverse(zx), model.inverse(zy)
        dx, dy = abs(model.df(zx)), abs(model.df(zy))
        if dx == 0:
            return math.inf
        if dy == 0:
            return 0.0
        # g' = 1 / f' at the pulled-back point
        total += math.log(dy) - math.log(dx)
    return math.exp(total)


# --------------------------------------------------------------------------
# critical intervals
# --------------------------------------------------------------------------


def critical_windows(fmap: MarkovMap, n: int) -> frozenset:
    """Branch-index words of length ``n`` whose interval has a critical point as an endpoint."""
    cps = [cp.c for cp in fmap.critical_points]
    if not cps:
        return frozenset()
    lvl = partition_level(fmap, n)
    tol = 1e-12 * (fmap.ambient.hi - fmap.ambient.lo)
    out = set()
    for k in range(lvl.count):
        for c in cps:
            if abs(lvl.lo[k] - c) <= tol or abs(lvl.hi[k] - c) <= tol:
                out.add(tuple(int(i) for i in lvl.codes[k]))
    return frozenset(out)


def critical_level(fmap: MarkovMap, n_max: int = 12) -> int:
    """Smallest ``n`` whose critical intervals each have a far endpoint off the critical orbits.

    Returns 1 for maps without critical points.
    """
    from .map_model import critical_orbit

    cps = [cp.c for cp in fmap.critical_points]
    if not cps:
        return 1
    post = []
    for orb in critical_orbit(fmap):
        post.extend(orb.points[1:])
    post = np.array(post)
    tol = 1e-9 * (fmap.ambient.hi - fmap.ambient.lo)
    for n, lvl in enumerate(partition_levels(fmap, n_max), start=1):
        ok = True
        for k in range(lvl.count):
            a, b = lvl.lo[k], lvl.hi[k]
            for c in cps:
                if abs(a - c) <= tol:
                    far = b
                elif abs(b - c) <= tol:
                    far = a
                else:
                    continue
                if np.any(np.abs(post - far) <= tol):
                    ok = False
        if ok:
            return n
    raise ValueError(f"no level up to {n_max} separates the critical intervals from the critical orbits")
