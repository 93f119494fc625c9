"""Symbolic and dual symbolic spaces of a Markov map.

Only eventually periodic sequences are represented exactly.  A
:class:`DualAddress` stands for the left-infinite sequence
``... block block tail`` whose rightmost symbol is the last symbol of
``tail`` (or of ``block`` when the tail is empty).
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import CycleThroughCritical, HypothesisViolated, NoConvergence, UnsuitableWord
from .map_model import MarkovMap, critical_orbit, evaluate
from .partition import (
    Interval,
    Symbol,
    check_word,
    critical_level,
    critical_windows,
    format_word,
    parse_word,
    pull_back,
    word_from_indices,
    word_interval,
)

DEFAULT_SEED = 0x5CA1E
PREIMAGE_SEARCH_DEPTH = 12


def _primitive(block):
    k = len(block)
    for d in range(1, k + 1):
        if k % d == 0 and block[:d] * (k // d) == block:
            return block[:d]
    return block


@dataclass(frozen=True)
class DualAddress:
    """Eventually periodic point ``... block block tail`` of the dual space.

    The representation is canonical (primitive block, shortest tail), so
    structural equality is equality of sequences.
    """

    tail: tuple
    block: tuple

    def __post_init__(self):
        tail, block = tuple(self.tail), tuple(self.block)
        if not block:
            raise ValueError("block must be nonempty")
        block = _primitive(block)
        while tail and tail[0] == block[0]:
            block = block[1:] + block[:1]
            tail = tail[1:]
        object.__setattr__(self, "tail", tail)
        object.__setattr__(self, "block", block)

    @classmethod
    def periodic(cls, block):
        return cls((), tuple(block))

    @classmethod
    def parse(cls, text):
        if "|" not in text:
            raise ValueError(f"address {text!r} must look like 'tail|block'")
        tail, block = text.split("|", 1)
        return cls(parse_word(tail), parse_word(block))

    def __str__(self):
        return f"{format_word(self.tail)}|{format_word(self.block)}"

    @property
    def is_periodic(self):
        return not self.tail

    @property
    def period(self):
        return len(self.block)

    def symbol(self, j):
        """The symbol ``j`` places from the right (``j = 0`` is the rightmost)."""
        nt = len(self.tail)
        if j < nt:
            return self.tail[nt - 1 - j]
        k = len(self.block)
        return self.block[k - 1 - (j - nt) % k]


def dual_shift(a: DualAddress) -> DualAddress:
    """Drop the rightmost symbol."""
    if a.tail:
        return DualAddress(a.tail[:-1], a.block)
    return DualAddress((), a.block[-1:] + a.block[:-1])


def truncate(a: DualAddress, n: int) -> tuple:
    """The rightmost ``n`` symbols of ``a`` as a word."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return tuple(a.symbol(j) for j in range(n - 1, -1, -1))


def check_address(fmap: MarkovMap, a: DualAddress):
    """Raise UnsuitableWord unless every truncation of ``a`` is suitable for ``fmap``."""
    check_word(fmap, a.block + a.block[:1])
    if a.tail:
        check_word(fmap, a.block[-1:] + a.tail)


@dataclass(frozen=True)
class ForwardAddress:
    """Eventually periodic point ``head block block ...`` of the forward symbolic space."""

    head: tuple
    block: tuple

    def __post_init__(self):
        if not self.block:
            raise ValueError("block must be nonempty")
        object.__setattr__(self, "head", tuple(self.head))
        object.__setattr__(self, "block", tuple(self.block))

    def prefix(self, n):
        out = list(self.head[:n])
        while len(out) < n:
            out.extend(self.block[: n - len(out)])
        return tuple(out)


def coding_map(fmap: MarkovMap, a: ForwardAddress, depth: int) -> Interval:
    """The interval named by the first ``depth`` symbols of ``a``."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    w = a.prefix(depth)
    check_word(fmap, w + a.block[:1] if depth >= len(a.head) else w)
    return word_interval(fmap, w)


def periodic_point(fmap: MarkovMap, a: DualAddress, tol: float = 1e-13):
    """The periodic point coded by a purely periodic address.

    With block ``b_0 ... b_{k-1}`` the point is the fixed point of
    ``g_{b_0} o ... o g_{b_{k-1}}`` and lies in ``I_{b_0}``.  The nested
    intervals ``I_{block^l}`` are iterated until their width is below
    ``tol``.  Returns ``(p, k)``.
    """
    if a.tail:
        raise ValueError("periodic_point needs a purely periodic address")
    check_address(fmap, a)
    idx = [s.branch for s in a.block]
    k = len(idx)
    width0 = fmap.ambient.hi - fmap.ambient.lo
    max_rounds = int(200 / k) + 50
    with mpmath.workdps(40):
        first = fmap.branches[idx[0]]
        lo, hi = mpmath.mpf(first.a), mpmath.mpf(first.b)
        prev = hi - lo
        stalled = 0
        for _ in range(max_rounds):
            lo, hi = pull_back(fmap, idx, lo, hi)
            width = hi - lo
            if width <= tol * 1e-3 * width0:
                break
            # a round that fails to shrink means the block is not contracting
            stalled = stalled + 1 if width >= prev * (1 - 1e-12) else 0
            if stalled >= 3:
                raise NoConvergence(f"block {format_word(a.block)} is not contracting")
            prev = width
        else:
            raise NoConvergence(f"nested intervals for {a} did not shrink below {tol}")
        p = float((lo + hi) / 2)
    return p, k


def orbit_points(fmap: MarkovMap, a: DualAddress, tol: float = 1e-13):
    """Periodic points of every rotation of ``a``'s block; entry ``j`` is ``f^j(p)``."""
    out = []
    b = a.block
    for j in range(len(b)):
        out.append(periodic_point(fmap, DualAddress((), b[j:] + b[:j]), tol)[0])
    return out


def iterate(fmap: MarkovMap, x, n):
    for _ in range(n):
        x = evaluate(fmap, x)
    return x


# --------------------------------------------------------------------------
# enumeration
# --------------------------------------------------------------------------


def periodic_addresses(fmap: MarkovMap, max_period: int):
    """All purely periodic addresses with primitive period up to ``max_period``.

    Different rotations of a block are different points of the dual space
    and are listed separately.  Order is by period, then lexicographic.
    """
    succ = fmap.successors
    out = []
    seen = set()
    for k in range(1, max_period + 1):
        stack = [(i,) for i in range(fmap.n_branches)]
        while stack:
            p = stack.pop()
            if len(p) == k:
                if p[0] in succ[p[-1]] and _primitive(p) == p and p not in seen:
                    seen.add(p)
                    out.append(p)
                continue
            stack.extend(p + (j,) for j in succ[p[-1]])
    out.sort(key=lambda p: (len(p), p))
    return [DualAddress((), word_from_indices(fmap, p)) for p in out]


def random_addresses(fmap: MarkovMap, count: int, seed: int = DEFAULT_SEED, max_tail: int = 6, max_block: int = 4):
    """Random eventually periodic admissible addresses, reproducible from ``seed``."""
    rng = np.random.default_rng(seed)
    succ = fmap.successors
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 100 * count + 100:
            raise RuntimeError("could not generate admissible addresses")
        k = int(rng.integers(1, max_block + 1))
        block = [int(rng.integers(fmap.n_branches))]
        for _ in range(k - 1):
            block.append(int(rng.choice(succ[block[-1]])))
        if block[0] not in succ[block[-1]]:
            continue
        tail = []
        cur = block[-1]
        for _ in range(int(rng.integers(0, max_tail + 1))):
            cur = int(rng.choice(succ[cur]))
            tail.append(cur)
        a = DualAddress(word_from_indices(fmap, tail), word_from_indices(fmap, block))
        if a not in out:
            out.append(a)
    return out


# --------------------------------------------------------------------------
# recurrence classification
# --------------------------------------------------------------------------


def _check_hypothesis(fmap):
    crit = [cp.c for cp in fmap.critical_points]
    if not crit:
        return
    try:
        orbits = critical_orbit(fmap)
    except CycleThroughCritical as exc:
        raise HypothesisViolated(str(exc)) from exc
    tol = 1e-9 * (fmap.ambient.hi - fmap.ambient.lo)
    for orb in orbits:
        for x in orb.points[1:]:
            if any(abs(x - c) <= tol for c in crit):
                raise HypothesisViolated(f"critical point {x!r} lies on the orbit of {orb.c!r}")


def _reaches_critical(fmap, v, windows, n1, cap):
    """Search preimages ``u v`` with ``|u| <= cap`` for a critical ``n1``-prefix.

    Returns True if one is found, False if the set of reachable prefixes
    closes up without ever being critical, None if the cap is hit first.
    """
    pred = fmap.predecessors
    states = {tuple(v[:n1])}
    seen = [frozenset(states)]
    for _ in range(cap):
        nxt = set()
        for p in states:
            for r in pred[p[0]]:
                nxt.add(((r,) + p)[:n1])
        if any(p in windows for p in nxt):
            return True
        states = nxt
        fs = frozenset(states)
        if fs in seen:
            return False
        seen.append(fs)
    return None


def classify_address(fmap: MarkovMap, a: DualAddress, depth: int = 40, n1: int | None = None) -> str:
    """Classify ``a`` as recurrent, totally_nonrecurrent, wandering or undetermined.

    Write ``a = ... v_{n-1} r_0`` so that ``v_{n-1}`` is the truncation of
    length ``n`` with its rightmost symbol removed.  ``I_{v}`` lies in the
    critical union when the leftmost ``n1`` symbols of ``v`` name a critical
    interval of the ``n1``-th partition.

    * recurrent: infinitely many ``v_{n-1}`` lie in the critical union.
    * otherwise, from some ``N`` on every ``v_{n-1}`` avoids it; the address
      is wandering if every such ``v_{k-1}`` has a preimage meeting the
      critical union, and totally nonrecurrent if some ``v_{N-1}`` has none.

    Preimages are searched to length 12; ``undetermined`` is returned when
    that cap or ``depth`` is too small to decide.
    """
    check_address(fmap, a)
    _check_hypothesis(fmap)
    if not fmap.critical_points:
        return "totally_nonrecurrent"
    n1 = critical_level(fmap) if n1 is None else n1
    windows = critical_windows(fmap, n1)
    nt, k = len(a.tail), len(a.block)
    start = nt + n1 + 1
    # one full period of windows inside the repeating part must be visible
    if depth < start + k:
        return "undetermined"

    def v_of(n):
        return tuple(s.branch for s in truncate(a, n)[:-1])

    for n in range(start, start + k):
        if v_of(n)[:n1] in windows:
            return "recurrent"
    results = [_reaches_critical(fmap, v_of(n), windows, n1, PREIMAGE_SEARCH_DEPTH) for n in range(start, start + k)]
    if any(r is False for r in results):
        return "totally_nonrecurrent"
    if all(r is True for r in results):
        return "wandering"
    return "undetermined"


def fiber_counts(fmap: MarkovMap, max_period: int, tol: float = 1e-9):
    """Group periodic addresses by their periodic point; returns ``{(k, point): count}``."""
    groups = {}
    for a in periodic_addresses(fmap, max_period):
        p, k = periodic_point(fmap, a)
        key = None
        for kk, q in groups:
            if kk == k and abs(q - p) <= tol:
                key = (kk, q)
                break
        if key is None:
            key = (k, p)
            groups[key] = 0
        groups[key] += 1
    return groups


__all__ = [
    "DualAddress",
    "ForwardAddress",
    "Symbol",
    "UnsuitableWord",
    "check_address",
    "classify_address",
    "coding_map",
    "dual_shift",
    "fiber_counts",
    "iterate",
    "orbit_points",
    "periodic_addresses",
    "periodic_point",
    "random_addresses",
    "truncate",
]

