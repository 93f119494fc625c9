"""Smooth-conjugacy invariants read off the scaling function.

Eigenvalues at periodic points, power-law exponents and asymmetries at
critical points, and a side-by-side comparison of two maps that share
their symbolic dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ChainUnresolved,
    CriticalOnOrbit,
    IncompatibleCombinatorics,
    NotConverged,
    NotGeometricallyFinite,
)
from .map_model import LEFT, ORBIT_TOL, RIGHT, MarkovMap, _snap, asymmetry, branch_at
from .scaling import scaling_function, signed_scale
from .symbolic import DEFAULT_SEED, DualAddress, dual_shift, orbit_points, periodic_addresses, random_addresses
from .partition import Symbol

EIGEN_TOL = 1e-12
EIGEN_MAX_DEPTH = 400


# --------------------------------------------------------------------------
# eigenvalues
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EigenvalueRecord:
    address: DualAddress
    p: float
    direct: float
    via_scaling: float

    @property
    def identity_error(self):
        return abs(self.direct / self.via_scaling - 1.0)


def eigenvalue_direct(fmap: MarkovMap, a: DualAddress) -> float:
    """``(f^k)'(p)`` by the chain rule along the orbit coded by the block of ``a``."""
    pts = orbit_points(fmap, a)
    prod = 1.0
    for s, x in zip(a.block, pts):
        d = fmap.branches[s.branch].model.df(x)
        if d == 0 or not math.isfinite(d):
            raise CriticalOnOrbit(f"f' vanishes at {x!r} on the orbit of {a}")
        prod *= float(d)
    return prod


def eigenvalue_via_scaling(fmap: MarkovMap, a: DualAddress, tol: float = EIGEN_TOL, max_depth: int = EIGEN_MAX_DEPTH) -> float:
    """Reciprocal of the product of ``s_f`` over the ``k`` dual shifts of ``a``."""
    if a.tail:
        raise ValueError("eigenvalue_via_scaling needs a purely periodic address")
    prod = 1.0
    b = a
    for _ in range(a.period):
        prod *= scaling_function(fmap, b, tol=tol, max_depth=max_depth).value
        b = dual_shift(b)
    return 1.0 / prod


def eigenvalue_record(fmap: MarkovMap, a: DualAddress, tol: float = EIGEN_TOL) -> EigenvalueRecord:
    p = orbit_points(fmap, a)[0]
    return EigenvalueRecord(a, p, eigenvalue_direct(fmap, a), eigenvalue_via_scaling(fmap, a, tol))


# --------------------------------------------------------------------------
# exponents
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentEstimate:
    c: float
    gamma: float
    depth: int
    error: float
    side: int
    case: str
    word: tuple = ()
    chain: tuple = ()


def _is_critical(fmap, x):
    return any(abs(x - cp.c) <= ORBIT_TOL for cp in fmap.critical_points)


def _germ_step(fmap, x, side):
    br = branch_at(fmap, x, LEFT if side < 0 else RIGHT)
    y = _snap(fmap, float(br.model.f(x)))
    return br, y, side * br.orientation


def germ_itinerary(fmap: MarkovMap, c, side: int = -1, max_iter: int = 64):
    """Follow the one-sided germ at ``c`` until its germ orbit repeats.

    Returns ``(symbols, points, cycle_start, stop)`` where ``symbols[j]`` is
    the branch used at step ``j``, and ``stop`` is the first step at which
    the orbit reaches another critical point or the start of the germ
    cycle, whichever is first.
    """
    x, s = float(c), int(side)
    syms, germs = [], []
    for _ in range(max_iter):
        germ = (x, s)
        for j, (gx, gs) in enumerate(germs):
            if abs(gx - x) <= ORBIT_TOL and gs == s:
                stop = next((i for i in range(1, j) if _is_critical(fmap, germs[i][0])), j)
                return tuple(syms), tuple(g[0] for g in germs), j, stop
        germs.append(germ)
        br, x, s = _germ_step(fmap, x, s)
        syms.append(Symbol(br.index, br.orientation))
    raise ChainUnresolved(f"germ orbit of {c} did not close within {max_iter} steps")


def _word(syms, start, m, cycle_start):
    """First ``m`` symbols of the eventually periodic itinerary, dropping ``start`` of them."""
    k = len(syms) - cycle_start
    out = []
    for j in range(start, m):
        out.append(syms[j] if j < len(syms) else syms[cycle_start + (j - cycle_start) % k])
    return tuple(out)


def _gamma_at(fmap, syms, cycle_start, stop, m, tol):
    w = _word(syms, 0, m, cycle_start)
    den = math.log(abs(signed_scale(fmap, w).value))
    if stop == cycle_start:
        k = len(syms) - cycle_start
        tail = _word(syms, 0, m, cycle_start)[-k:]
        a = DualAddress((), tail)
        num = math.log(abs(scaling_function(fmap, a, tol=tol, max_depth=EIGEN_MAX_DEPTH).value))
    else:
        num = math.log(abs(signed_scale(fmap, _word(syms, stop, m, cycle_start)).value))
    return num / den


def exponent_estimate(fmap: MarkovMap, c, depth: int = 18, side: int = -1, tol: float = EIGEN_TOL) -> ExponentEstimate:
    """Exponent at ``c`` from scales of the depth-``m`` intervals with ``c`` as an endpoint.

    ``W_m`` is the itinerary word of the germ of ``c`` on ``side`` (``-1``
    left, ``+1`` right).  When the orbit of ``c`` reaches a periodic germ
    cycle before any other critical point, ``gamma = log|s_f(a)| /
    log|s(W_m)|`` with ``a`` the periodic address of that cycle; when it
    first reaches another critical point after ``l`` steps, ``gamma =
    log|s(W_m minus its first l symbols)| / log|s(W_m)|``.  ``error`` is
    the change from the estimate at depth minus one cycle length.
    """
    if not any(abs(c - cp.c) <= ORBIT_TOL for cp in fmap.critical_points):
        raise ChainUnresolved(f"{c!r} is not a critical point of the map")
    try:
        syms, pts, cycle_start, stop = germ_itinerary(fmap, c, side)
    except NotGeometricallyFinite as exc:
        raise ChainUnresolved(str(exc)) from exc
    if any(_is_critical(fmap, x) for x in pts[cycle_start:]):
        raise ChainUnresolved(f"the germ cycle of {c!r} passes through a critical point")
    k = len(syms) - cycle_start
    lead = max(stop, cycle_start) + 2
    if depth < lead + k:
        raise ChainUnresolved(f"depth {depth} is too small; need at least {lead + k}")
    g = _gamma_at(fmap, syms, cycle_start, stop, depth, tol)
    g_prev = _gamma_at(fmap, syms, cycle_start, stop, depth - k, tol)
    case = "terminal" if stop == cycle_start else "chain"
    chain = tuple(x for x in pts[1:stop + 1] if _is_critical(fmap, x))
    return ExponentEstimate(float(c), g, depth, abs(g - g_prev), side, case, _word(syms, 0, depth, cycle_start), chain)


def exponent_via_scaling(fmap: MarkovMap, c, depth: int = 18, side: int = -1) -> float:
    """Power-law exponent at the critical point ``c`` recovered from scales."""
    return exponent_estimate(fmap, c, depth, side).gamma


# --------------------------------------------------------------------------
# comparison
# --------------------------------------------------------------------------


def default_addresses(fmap: MarkovMap, count: int | None = None, seed: int = DEFAULT_SEED):
    """All periodic addresses of period <= 3 plus pseudo-random ones.

    Without ``count`` 20 random addresses are added; with ``count`` the
    random part tops the list up to exactly ``count`` entries.
    """
    per = periodic_addresses(fmap, 3)
    if count is not None and count <= len(per):
        return per[:count]
    want = 20 if count is None else count - len(per)
    out = list(per)
    extra = 0
    while len(out) < len(per) + want:
        for a in random_addresses(fmap, want + extra, seed=seed):
            if a not in out and len(out) < len(per) + want:
                out.append(a)
        extra += want
    return out


@dataclass
class ComparisonReport:
    verdict: str
    scaling: list = field(default_factory=list)
    asymmetries: list = field(default_factory=list)
    eigenvalues: list = field(default_factory=list)
    exponents: list = field(default_factory=list)

    @property
    def disagreements(self):
        rows = self.scaling + self.asymmetries + self.eigenvalues
        return [r for r in rows if not r["match"]]

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "scaling": self.scaling,
            "asymmetries": self.asymmetries,
            "eigenvalues": self.eigenvalues,
            "exponents": self.exponents,
            "disagreements": len(self.disagreements),
        }


def check_compatible(f: MarkovMap, g: MarkovMap):
    if f.n_branches != g.n_branches or not np.array_equal(f.incidence, g.incidence):
        raise IncompatibleCombinatorics("incidence matrices differ")
    if f.orientations != g.orientations:
        raise IncompatibleCombinatorics("branch orientations differ")
    kf = [(cp.left_branch, cp.right_branch) for cp in f.critical_points]
    kg = [(cp.left_branch, cp.right_branch) for cp in g.critical_points]
    if kf != kg:
        raise IncompatibleCombinatorics("critical points sit at different partition positions")


def _row(key, x, y, tol, **extra):
    if x is None or y is None:
        diff, match = None, False
    else:
        diff = abs(x - y)
        match = bool(diff <= tol)
    row = {key: extra.pop(key)} if key in extra else {}
    row.update(extra)
    row.update({"f": x, "g": y, "diff": diff, "match": match})
    return row


def _safe_scaling(fmap, a, tol, max_depth):
    est = scaling_function(fmap, a, tol=tol, max_depth=max_depth, strict=False)
    return est.value if est.converged else None


def compare_invariants(
    f: MarkovMap,
    g: MarkovMap,
    addresses=None,
    tol: float = 1e-6,
    eigen: bool = False,
    scale_tol: float | None = None,
    max_depth: int = 120,
    exponent_depth: int = 18,
) -> ComparisonReport:
    """Compare scaling values and asymmetries (plus eigenvalues if ``eigen``).

    Addresses and critical points are matched symbolically.  The verdict is
    ``invariants-match`` only when every compared quantity agrees within
    ``tol``; a value that fails to converge counts as a disagreement.
    Exponents are listed for information and do not enter the verdict.
    """
    check_compatible(f, g)
    if addresses is None:
        addresses = default_addresses(f)
    scale_tol = min(tol / 100, 1e-9) if scale_tol is None else scale_tol
    rep = ComparisonReport("invariants-match")
    same = f is g or f == g
    for a in addresses:
        x = _safe_scaling(f, a, scale_tol, max_depth)
        y = x if same else _safe_scaling(g, a, scale_tol, max_depth)
        rep.scaling.append(_row("address", x, y, tol, address=str(a)))
    for cf, cg in zip(f.critical_points, g.critical_points):
        tf, tg = asymmetry(f, cf.c), asymmetry(g, cg.c)
        rep.asymmetries.append(_row("critical", tf, tg, tol, critical=[cf.left_branch, cf.right_branch]))
        for side in (-1, 1):
            try:
                ef = exponent_estimate(f, cf.c, exponent_depth, side)
                eg = ef if same else exponent_estimate(g, cg.c, exponent_depth, side)
                rep.exponents.append(
                    {"critical": [cf.left_branch, cf.right_branch], "side": side, "f": ef.gamma, "g": eg.gamma, "diff": abs(ef.gamma - eg.gamma)}
                )
            except (ChainUnresolved, NotConverged) as exc:
                rep.exponents.append({"critical": [cf.left_branch, cf.right_branch], "side": side, "error": str(exc)})
    if eigen:
        for a in addresses:
            if a.tail:
                continue
            try:
                x = eigenvalue_direct(f, a)
                y = x if same else eigenvalue_direct(g, a)
            except CriticalOnOrbit:
                x = y = None
            rep.eigenvalues.append(_row("address", x, y, tol * max(1.0, abs(x or 1.0)), address=str(a)))
    if rep.disagreements:
        rep.verdict = "invariants-differ"
    return rep


__all__ = [
    "ComparisonReport",
    "EigenvalueRecord",
    "ExponentEstimate",
    "check_compatible",
    "compare_invariants",
    "default_addresses",
    "eigenvalue_direct",
    "eigenvalue_record",
    "eigenvalue_via_scaling",
    "exponent_estimate",
    "exponent_via_scaling",
    "germ_itinerary",
]

