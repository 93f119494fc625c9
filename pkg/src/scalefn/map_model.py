"""Piecewise monotone Markov interval maps.

A :class:`MarkovMap` is an ambient interval tiled by branch domains
``I_0, ..., I_m``; each branch is a strictly monotone model (affine, one-sided
power law at a critical endpoint, or a smooth conjugate of another branch)
whose image is a union of branch domains.  Maps are immutable once built.
"""

from __future__ import annotations

import bisect
import dataclasses
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Optional, Union

import mpmath
import numpy as np

from . import _num
from .errors import (
    AlignmentError,
    CycleThroughCritical,
    ExponentMismatch,
    GapError,
    MapValidationError,
    NonDiffeo,
    NonMonotoneError,
    NotGeometricallyFinite,
    NotInImage,
    OutOfDomain,
    OverlapError,
)
from .rootfind import solve_monotone, solve_monotone_array

ALIGN_TOL = 1e-9
TILE_TOL = 1e-12
ORBIT_TOL = 1e-9
MAX_ORBIT_ITER = 64

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class AmbientInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.hi - self.lo > 0:
            raise MapValidationError(f"ambient interval [{self.lo}, {self.hi}] is empty")

    @property
    def length(self):
        return self.hi - self.lo


# --------------------------------------------------------------------------
# branch models
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Affine:
    slope: float
    intercept: float

    def __post_init__(self):
        if self.slope == 0 or not math.isfinite(self.slope):
            raise NonMonotoneError("affine branch needs a nonzero finite slope")

    @property
    def increasing(self):
        return self.slope > 0

    def f(self, x):
        return self.slope * x + self.intercept

    def df(self, x):
        return x * 0 + self.slope

    def inverse(self, y):
        return (y - self.intercept) / self.slope

    def critical(self):
        return None


@dataclass(frozen=True)
class PowerLawEnd:
    """``f(x) = value_at_c + direction * coeff * |x - c|**gamma`` on one side of ``c``.

    ``side`` is +1 when the branch domain lies to the right of ``c`` and -1
    when it lies to the left; it is filled in from the domain when the map is
    built.
    """

    c: float
    gamma: float
    coeff: float
    value_at_c: float
    direction: int
    side: int = 0

    def __post_init__(self):
        if not self.gamma > 1:
            raise NonMonotoneError(f"power-law exponent must exceed 1, got {self.gamma}")
        if not self.coeff > 0:
            raise NonMonotoneError(f"power-law coefficient must be positive, got {self.coeff}")
        if self.direction not in (1, -1):
            raise NonMonotoneError("power-law direction must be +1 or -1")
        if self.side not in (0, 1, -1):
            raise NonMonotoneError("power-law side must be +1 or -1")

    @property
    def increasing(self):
        return self.direction * self.side > 0

    def f(self, x):
        t = _num.absval(x - self.c)
        return self.value_at_c + self.direction * self.coeff * _num.power(t, self.gamma)

    def df(self, x):
        t = _num.absval(x - self.c)
        return self.direction * self.coeff * self.gamma * self.side * _num.power(t, self.gamma - 1)

    def inverse(self, y):
        u = _num.clip_nonneg((y - self.value_at_c) * self.direction / self.coeff)
        if _num.is_mp(y):
            return self.c + self.side * _num.power(u, mpmath.mpf(1) / self.gamma)
        return self.c + self.side * u ** (1.0 / self.gamma)

    def limit_coefficient(self):
        """Limit of ``f'(x) / |x - c|**(gamma - 1)`` as ``x`` tends to ``c``."""
        return self.direction * self.coeff * self.gamma * self.side

    def critical(self):
        return (self.c, self.gamma, self.limit_coefficient())


@dataclass(frozen=True)
class DiffeoModel:
    """Orientation-preserving diffeomorphism of ``[lo, hi]`` fixing both ends.

    In the normalised coordinate ``t = (x - lo) / (hi - lo)``:

    * ``identity``: ``t``
    * ``sin``: ``t + epsilon * sin(2 pi k t)``
    * ``poly``: ``t + t (1 - t) (c_0 + c_1 t + ...)``
    * ``reflect``: ``1 - t`` (orientation reversing; always rejected)
    """

    kind: str = "identity"
    epsilon: float = 0.0
    k: float = 1.0
    coeffs: tuple = ()
    lo: float = 0.0
    hi: float = 1.0

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def sinusoidal(cls, epsilon, k=1):
        return cls("sin", epsilon=epsilon, k=k)

    @classmethod
    def polynomial(cls, coeffs):
        return cls("poly", coeffs=tuple(coeffs))

    @classmethod
    def from_config(cls, cfg):
        kind = cfg.get("kind", "identity")
        if kind == "sin":
            return cls.sinusoidal(float(cfg["epsilon"]), float(cfg.get("k", 1)))
        if kind == "poly":
            return cls.polynomial(float(c) for c in cfg["coeffs"])
        if kind in ("identity", "reflect"):
            return cls(kind)
        raise MapValidationError(f"unknown conjugacy kind {kind!r}")

    def to_config(self):
        if self.kind == "sin":
            return {"kind": "sin", "epsilon": self.epsilon, "k": self.k}
        if self.kind == "poly":
            return {"kind": "poly", "coeffs": list(self.coeffs)}
        return {"kind": self.kind}

    def bind(self, ambient: AmbientInterval):
        return dataclasses.replace(self, lo=ambient.lo, hi=ambient.hi)

    @property
    def is_identity(self):
        return self.kind == "identity" or (self.kind == "sin" and self.epsilon == 0)

    def _phi(self, t):
        if self.kind == "sin":
            return t + self.epsilon * _num.sin(2 * _num.pi_like(t) * self.k * t)
        if self.kind == "poly":
            acc = t * 0
            for c in reversed(self.coeffs):
                acc = acc * t + c
            return t + t * (1 - t) * acc
        if self.kind == "reflect":
            return 1 - t
        return t

    def _dphi(self, t):
        if self.kind == "sin":
            w = 2 * _num.pi_like(t) * self.k
            return 1 + self.epsilon * w * _num.cos(w * t)
        if self.kind == "poly":
            acc = t * 0
            dacc = t * 0
            for c in reversed(self.coeffs):
                dacc = dacc * t + acc
                acc = acc * t + c
            return 1 + (1 - 2 * t) * acc + t * (1 - t) * dacc
        if self.kind == "reflect":
            return t * 0 - 1
        return t * 0 + 1

    def h(self, x):
        width = self.hi - self.lo
        return self.lo + width * self._phi((x - self.lo) / width)

    def dh(self, x):
        return self._dphi((x - self.lo) / (self.hi - self.lo))

    def inverse(self, y):
        if self.is_identity:
            return y
        if isinstance(y, np.ndarray):
            return solve_monotone_array(self.h, self.dh, np.clip(y, self.lo, self.hi), self.lo, self.hi)
        if _num.is_mp(y):
            # h fixes both ends; clamp roundoff just outside the ambient interval
            if y <= self.lo:
                return mpmath.mpf(self.lo)
            if y >= self.hi:
                return mpmath.mpf(self.hi)
            tol = mpmath.mpf(10) ** (-(mpmath.mp.dps - 6))
            return solve_monotone(self.h, self.dh, y, mpmath.mpf(self.lo), mpmath.mpf(self.hi), tol=tol)
        if y <= self.lo:
            return self.lo
        if y >= self.hi:
            return self.hi
        return solve_monotone(self.h, self.dh, y, self.lo, self.hi)

    def validate(self):
        if self.kind == "sin":
            if abs(2 * self.k - round(2 * self.k)) > 1e-12:
                raise NonDiffeo("sinusoidal conjugacy needs 2k integral to fix the endpoints")
            if abs(self.epsilon) * abs(self.k) * 2 * math.pi >= 1:
                raise NonDiffeo("sinusoidal conjugacy needs 2 pi k |epsilon| < 1")
        t = np.linspace(0.0, 1.0, 2001)
        d = self._dphi(t)
        if not np.all(d > 0):
            raise NonDiffeo(f"{self.kind} conjugacy is not orientation preserving")
        if abs(self._phi(0.0)) > 1e-12 or abs(self._phi(1.0) - 1) > 1e-12:
            raise NonDiffeo(f"{self.kind} conjugacy does not fix the endpoints")
        return self


@dataclass(frozen=True)
class Conjugated:
    """The branch ``h o inner o h^-1`` in the coordinates of ``h``."""

    inner: object
    diffeo: DiffeoModel

    @property
    def increasing(self):
        return self.inner.increasing

    def f(self, y):
        return self.diffeo.h(self.inner.f(self.diffeo.inverse(y)))

    def df(self, y):
        x = self.diffeo.inverse(y)
        return self.diffeo.dh(self.inner.f(x)) * self.inner.df(x) / self.diffeo.dh(x)

    def inverse(self, z):
        return self.diffeo.h(self.inner.inverse(self.diffeo.inverse(z)))

    def critical(self):
        inner = self.inner.critical()
        if inner is None:
            return None
        c, gamma, coeff = inner
        h = self.diffeo
        v = self.inner.f(c)
        return (h.h(c), gamma, coeff * h.dh(v) / h.dh(c) ** gamma)


BranchModel = Union[Affine, PowerLawEnd, Conjugated]


@dataclass(frozen=True)
class Branch:
    index: int
    domain: tuple
    model: object
    image: tuple = ()
    image_idx: tuple = ()

    @property
    def orientation(self):
        return 1 if self.model.increasing else -1

    @property
    def a(self):
        return self.domain[0]

    @property
    def b(self):
        return self.domain[1]


@dataclass(frozen=True)
class CriticalPoint:
    """Power-law critical point with one-sided derivative coefficients.

    ``left_coeff`` and ``right_coeff`` are the limits of
    ``f'(x) / |x - c|**(gamma - 1)`` from below and from above; either may be
    ``None`` when the adjacent branch is not a power law at ``c``.
    """

    c: float
    gamma: float
    left_coeff: Optional[float]
    right_coeff: Optional[float]
    left_branch: Optional[int]
    right_branch: Optional[int]
    right_gamma: Optional[float] = None


# --------------------------------------------------------------------------
# the map
# --------------------------------------------------------------------------


class MarkovMap:
    """Validated Markov map.  Build with :func:`build_map` or :meth:`from_branches`."""

    def __init__(self, ambient, branches, points, incidence, critical_points, config=None):
        self._ambient = ambient
        self._branches = tuple(branches)
        self._points = tuple(points)
        inc = np.array(incidence, dtype=np.int8)
        inc.setflags(write=False)
        self._incidence = inc
        self._critical = tuple(critical_points)
        self._config = config

    ambient = property(lambda self: self._ambient)
    branches = property(lambda self: self._branches)
    points = property(lambda self: self._points)
    incidence = property(lambda self: self._incidence)
    critical_points = property(lambda self: self._critical)
    config = property(lambda self: self._config)

    @property
    def n_branches(self):
        return len(self._branches)

    @property
    def orientations(self):
        return tuple(b.orientation for b in self._branches)

    @cached_property
    def successors(self):
        """``successors[i]`` lists the ``j`` with ``I_j`` inside ``f(I_i)``."""
        return tuple(tuple(int(j) for j in np.flatnonzero(row)) for row in self._incidence)

    @cached_property
    def predecessors(self):
        return tuple(tuple(int(i) for i in np.flatnonzero(col)) for col in self._incidence.T)

    def __eq__(self, other):
        if not isinstance(other, MarkovMap):
            return NotImplemented
        return (
            self._ambient == other._ambient
            and self._branches == other._branches
            and np.array_equal(self._incidence, other._incidence)
        )

    def __hash__(self):
        return hash((self._ambient, self._branches))

    def __repr__(self):
        return f"MarkovMap(ambient=[{self._ambient.lo}, {self._ambient.hi}], branches={self.n_branches})"

    def __getstate__(self):
        state = self.__dict__.copy()
        state.pop("successors", None)
        state.pop("predecessors", None)
        return state

    @classmethod
    def from_branches(cls, ambient, pieces, config=None):
        """Validate ``pieces = [((a, b), model), ...]`` and build the map."""
        if not isinstance(ambient, AmbientInterval):
            ambient = AmbientInterval(*map(float, ambient))
        pieces = sorted(((tuple(map(float, d)), m) for d, m in pieces), key=lambda p: p[0][0])
        if not pieces:
            raise GapError("a map needs at least one branch")
        scale = max(1.0, abs(ambient.lo), abs(ambient.hi))
        tile = TILE_TOL * scale
        for (a, b), _ in pieces:
            if not b - a > 0:
                raise MapValidationError(f"branch domain [{a}, {b}] is empty")
            if a < ambient.lo - tile or b > ambient.hi + tile:
                raise GapError(f"branch domain [{a}, {b}] leaves the ambient interval")
        if abs(pieces[0][0][0] - ambient.lo) > tile or abs(pieces[-1][0][1] - ambient.hi) > tile:
            raise GapError("branch domains do not reach the ends of the ambient interval")
        for (d0, _), (d1, _) in zip(pieces, pieces[1:]):
            if d0[1] > d1[0] + tile:
                raise OverlapError(f"branch domains {d0} and {d1} overlap")
            if d0[1] < d1[0] - tile:
                raise GapError(f"gap between branch domains {d0} and {d1}")

        points = [ambient.lo] + [d[0] for d, _ in pieces[1:]] + [ambient.hi]
        align = ALIGN_TOL * scale

        branches = []
        for i, ((a, b), model) in enumerate(pieces):
            a, b = points[i], points[i + 1]
            model = _bind_model(model, a, b)
            fa, fb = model.f(a), model.f(b)
            if fa == fb:
                raise NonMonotoneError(f"branch {i} is constant")
            if (fb > fa) != model.increasing:
                raise NonMonotoneError(f"branch {i} disagrees with its own orientation")
            idx = []
            for y in sorted((fa, fb)):
                j = _nearest(points, y)
                if abs(points[j] - y) > align:
                    raise AlignmentError(
                        f"image endpoint {y!r} of branch {i} is not a partition endpoint"
                    )
                idx.append(j)
            branches.append(Branch(i, (a, b), model, (points[idx[0]], points[idx[1]]), tuple(idx)))

        m = len(branches)
        incidence = np.zeros((m, m), dtype=np.int8)
        for br in branches:
            j0, j1 = br.image_idx
            incidence[br.index, j0:j1] = 1

        return cls(ambient, branches, points, incidence, _collect_critical(branches), config)


def _nearest(points, y):
    k = bisect.bisect_left(points, y)
    cands = [j for j in (k - 1, k) if 0 <= j < len(points)]
    return min(cands, key=lambda j: abs(points[j] - y))


def _bind_model(model, a, b):
    if isinstance(model, PowerLawEnd):
        tol = ALIGN_TOL * max(1.0, abs(a), abs(b))
        if abs(model.c - a) <= tol:
            return dataclasses.replace(model, c=a, side=1)
        if abs(model.c - b) <= tol:
            return dataclasses.replace(model, c=b, side=-1)
        raise NonMonotoneError(f"power-law point {model.c} is not an endpoint of [{a}, {b}]")
    return model


def _collect_critical(branches):
    found = {}
    for br in branches:
        crit = br.model.critical()
        if crit is None:
            continue
        c, gamma, coeff = crit
        at_left_end = abs(c - br.a) <= abs(c - br.b)
        key = br.a if at_left_end else br.b
        entry = found.setdefault(key, {})
        # branch lies to the right of c when c is its left endpoint
        entry["right" if at_left_end else "left"] = (br.index, float(gamma), float(coeff))
    out = []
    for c in sorted(found):
        e = found[c]
        lb, lg, lc = e.get("left", (None, None, None))
        rb, rg, rc = e.get("right", (None, None, None))
        out.append(
            CriticalPoint(
                c=float(c),
                gamma=lg if lg is not None else rg,
                left_coeff=lc,
                right_coeff=rc,
                left_branch=lb,
                right_branch=rb,
                right_gamma=rg,
            )
        )
    return out


# --------------------------------------------------------------------------
# construction from the JSON description
# --------------------------------------------------------------------------


def _model_from_config(cfg):
    kind = cfg.get("kind")
    if kind == "affine":
        return Affine(float(cfg["slope"]), float(cfg["intercept"]))
    if kind == "powerlaw":
        return PowerLawEnd(
            c=float(cfg["c"]),
            gamma=float(cfg["gamma"]),
            coeff=float(cfg["coeff"]),
            value_at_c=float(cfg["value_at_c"]),
            direction=int(cfg["direction"]),
        )
    raise MapValidationError(f"unknown branch model kind {kind!r}")


def build_map(config) -> MarkovMap:
    """Build and validate a map from its JSON description (dict, JSON text or path).

    Raises OverlapError, GapError, AlignmentError or NonMonotoneError for
    descriptions that do not define a Markov map.
    """
    if isinstance(config, (str, Path)):
        text = str(config)
        if text.lstrip().startswith("{"):
            config = json.loads(text)
        else:
            config = json.loads(Path(config).read_text())
    try:
        lo, hi = config["ambient"]
        pieces = [(br["domain"], _model_from_config(br["model"])) for br in config["branches"]]
    except MapValidationError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise MapValidationError(f"malformed map description: {exc}") from exc
    base = MarkovMap.from_branches(AmbientInterval(float(lo), float(hi)), pieces, config=config)
    conj = config.get("conjugacy")
    if conj:
        return conjugate_map(base, DiffeoModel.from_config(conj), config=config)
    return base


def load_map(path) -> MarkovMap:
    return build_map(Path(path))


# --------------------------------------------------------------------------
# pointwise operations
# --------------------------------------------------------------------------


def branch_at(fmap: MarkovMap, x, side=RIGHT) -> Branch:
    """The branch whose domain contains ``x``; ``side`` picks at shared endpoints."""
    lo, hi = fmap.ambient.lo, fmap.ambient.hi
    tol = TILE_TOL * max(1.0, abs(lo), abs(hi))
    if not (lo - tol <= x <= hi + tol):
        raise OutOfDomain(f"{x!r} is outside [{lo}, {hi}]")
    pts = fmap.points
    if side == RIGHT:
        k = bisect.bisect_right(pts, float(x)) - 1
    elif side == LEFT:
        k = bisect.bisect_left(pts, float(x)) - 1
    else:
        raise ValueError(f"side must be {LEFT!r} or {RIGHT!r}")
    k = min(max(k, 0), fmap.n_branches - 1)
    return fmap.branches[k]


def evaluate(fmap: MarkovMap, x, side=RIGHT):
    return branch_at(fmap, x, side).model.f(x)


def derivative(fmap: MarkovMap, x, side=RIGHT):
    """One-sided derivative from the analytic branch model (0 at a critical endpoint)."""
    return branch_at(fmap, x, side).model.df(x)


def inverse_branch(fmap: MarkovMap, i: int, y, tol=1e-9):
    """``g_i(y)``: the point of ``I_i`` that branch ``i`` maps to ``y``."""
    br = fmap.branches[i]
    lo, hi = br.image
    if not (lo - tol <= y <= hi + tol):
        raise NotInImage(f"{y!r} is not in f(I_{i}) = [{lo}, {hi}]")
    x = br.model.inverse(y)
    a, b = br.domain
    return min(max(x, a), b) if not _num.is_mp(x) else x


# --------------------------------------------------------------------------
# critical data
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CriticalOrbit:
    c: float
    points: tuple
    preperiod: int
    period: int

    @property
    def cycle(self):
        return self.points[self.preperiod:]


def _snap(fmap, y):
    j = _nearest(fmap.points, y)
    return fmap.points[j] if abs(fmap.points[j] - y) <= ORBIT_TOL else y


def _critical_value(fmap, cp):
    vals = []
    for idx in (cp.left_branch, cp.right_branch):
        if idx is not None:
            vals.append(fmap.branches[idx].model.f(cp.c))
    if not vals:
        vals.append(evaluate(fmap, cp.c))
    if max(vals) - min(vals) > ORBIT_TOL:
        raise NotGeometricallyFinite(f"f is discontinuous at the critical point {cp.c}")
    return vals[0]


def forward_orbit(fmap, x, max_iter=MAX_ORBIT_ITER):
    """Orbit of ``x`` up to its first repetition (points identified within 1e-9)."""
    pts = [_snap(fmap, x)]
    for _ in range(max_iter):
        y = _snap(fmap, evaluate(fmap, pts[-1]))
        for j, p in enumerate(pts):
            if abs(p - y) <= ORBIT_TOL:
                return tuple(pts), j
        pts.append(y)
    raise NotGeometricallyFinite(f"orbit of {x} does not close within {max_iter} steps")


def critical_orbit(fmap: MarkovMap, max_iter: int = MAX_ORBIT_ITER):
    """Forward orbits of every critical point.

    Raises NotGeometricallyFinite when an orbit does not close in ``max_iter``
    steps and CycleThroughCritical when a critical point is periodic.
    """
    crit = [cp.c for cp in fmap.critical_points]
    out = []
    for cp in fmap.critical_points:
        _critical_value(fmap, cp)
        pts, start = forward_orbit(fmap, cp.c, max_iter=max_iter)
        cycle = pts[start:]
        for c in crit:
            if any(abs(c - p) <= ORBIT_TOL for p in cycle):
                raise CycleThroughCritical(f"critical point {c} lies on a periodic cycle")
        out.append(CriticalOrbit(cp.c, pts, start, len(cycle)))
    return out


def is_geometrically_finite(fmap: MarkovMap, n_max: int = 12) -> bool:
    """Finite critical orbits, no critical cycle, boundary to boundary, decaying partitions."""
    from .errors import NotDecaying
    from .partition import decay_fit

    if not fmap.critical_points:
        return False
    try:
        critical_orbit(fmap)
        decay_fit(fmap, n_max)
    except (NotGeometricallyFinite, NotDecaying):
        return False
    lo, hi = fmap.ambient.lo, fmap.ambient.hi
    ends = (lo, hi)
    for x, side in ((lo, RIGHT), (hi, LEFT)):
        y = evaluate(fmap, x, side)
        if min(abs(y - e) for e in ends) > ALIGN_TOL:
            return False
    return True


def find_critical(fmap: MarkovMap, c) -> CriticalPoint:
    if isinstance(c, CriticalPoint):
        return c
    for cp in fmap.critical_points:
        if abs(cp.c - c) <= ORBIT_TOL:
            return cp
    raise ValueError(f"{c!r} is not a critical point of the map")


def asymmetry(fmap: MarkovMap, c) -> float:
    """Ratio of the left to the right derivative coefficient at ``c``."""
    cp = find_critical(fmap, c)
    if cp.left_coeff is None or cp.right_coeff is None:
        raise ExponentMismatch(f"critical point {cp.c} is not a two-sided power law")
    if cp.right_gamma is not None and abs(cp.gamma - cp.right_gamma) > 1e-12:
        raise ExponentMismatch(
            f"exponents {cp.gamma} and {cp.right_gamma} differ at critical point {cp.c}"
        )
    return cp.left_coeff / cp.right_coeff


def conjugate_map(fmap: MarkovMap, h: DiffeoModel, config=None) -> MarkovMap:
    """The map ``h o f o h^-1`` on branch domains ``h(I_i)``."""
    h = h.bind(fmap.ambient).validate()
    if h.is_identity:
        return fmap
    pieces = [
        ((h.h(br.a), h.h(br.b)), Conjugated(br.model, h)) for br in fmap.branches
    ]
    if config is None and fmap.config is not None:
        config = dict(fmap.config, conjugacy=h.to_config())
    out = MarkovMap.from_branches(fmap.ambient, pieces, config=config)
    if not np.array_equal(out.incidence, fmap.incidence):
        raise NonDiffeo("conjugation changed the incidence matrix")
    return out
