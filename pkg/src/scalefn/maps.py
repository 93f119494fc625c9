"""Ready-made map descriptions used throughout the tests and notebooks.

Each ``*_config`` function returns the JSON-compatible description; the
matching constructor without the suffix builds the validated map.
"""

import math

from .map_model import build_map


def example1_config(l0=0.2, l1=0.3, l2=0.5, conjugacy=None):
    """Three affine branches on [0, 1] with the 3x3 incidence (011 / 111 / 110)."""
    if min(l0, l1, l2) <= 0 or abs(l0 + l1 + l2 - 1) > 1e-12:
        raise ValueError("l0, l1, l2 must be positive and sum to 1")
    s0 = (l1 + l2) / l0
    s2 = (l0 + l1) / l2
    cfg = {
        "ambient": [0.0, 1.0],
        "branches": [
            {"domain": [0.0, l0], "model": {"kind": "affine", "slope": s0, "intercept": l0}},
            {
                "domain": [l0, l0 + l1],
                "model": {"kind": "affine", "slope": -1.0 / l1, "intercept": l0 / l1 + 1.0},
            },
            {
                "domain": [l0 + l1, 1.0],
                "model": {"kind": "affine", "slope": s2, "intercept": -s2 * (l0 + l1)},
            },
        ],
    }
    if conjugacy:
        cfg["conjugacy"] = conjugacy
    return cfg


def example1(l0=0.2, l1=0.3, l2=0.5, conjugacy=None):
    return build_map(example1_config(l0, l1, l2, conjugacy))


def unimodal_config(gamma=2.0, conjugacy=None):
    """``2 - k |x|**gamma`` on [-2, 2] with ``k = 4 / 2**gamma``; critical orbit 0 -> 2 -> -2."""
    k = 4.0 / 2.0 ** gamma
    model = {"kind": "powerlaw", "c": 0.0, "gamma": gamma, "coeff": k, "value_at_c": 2.0, "direction": -1}
    cfg = {
        "ambient": [-2.0, 2.0],
        "branches": [
            {"domain": [-2.0, 0.0], "model": dict(model)},
            {"domain": [0.0, 2.0], "model": dict(model)},
        ],
    }
    if conjugacy:
        cfg["conjugacy"] = conjugacy
    return cfg


def quadratic_config(conjugacy=None):
    """``q(x) = -x**2 + 2`` on [-2, 2]."""
    return unimodal_config(2.0, conjugacy)


def quadratic(conjugacy=None):
    return build_map(quadratic_config(conjugacy))


def cubic(conjugacy=None):
    """``2 - |x|**3 / 2`` on [-2, 2]: exponent 3, same combinatorics as the quadratic map."""
    return build_map(unimodal_config(3.0, conjugacy))


def doubling_config():
    """``2x mod 1`` as two full affine branches."""
    return {
        "ambient": [0.0, 1.0],
        "branches": [
            {"domain": [0.0, 0.5], "model": {"kind": "affine", "slope": 2.0, "intercept": 0.0}},
            {"domain": [0.5, 1.0], "model": {"kind": "affine", "slope": 2.0, "intercept": -1.0}},
        ],
    }


def doubling():
    return build_map(doubling_config())


def identity_config():
    return {
        "ambient": [0.0, 1.0],
        "branches": [{"domain": [0.0, 1.0], "model": {"kind": "affine", "slope": 1.0, "intercept": 0.0}}],
    }


def identity():
    return build_map(identity_config())


def periodic_critical_config():
    """Fold at c = 0.4 with c -> 0.8 -> c, so the critical point is periodic."""
    return {
        "ambient": [0.0, 1.0],
        "branches": [
            {
                "domain": [0.0, 0.4],
                "model": {"kind": "powerlaw", "c": 0.4, "gamma": 2.0, "coeff": 5.0, "value_at_c": 0.8, "direction": -1},
            },
            {
                "domain": [0.4, 0.8],
                "model": {"kind": "powerlaw", "c": 0.4, "gamma": 2.0, "coeff": 2.5, "value_at_c": 0.8, "direction": -1},
            },
            {"domain": [0.8, 1.0], "model": {"kind": "affine", "slope": -2.0, "intercept": 2.0}},
        ],
    }


def periodic_critical():
    return build_map(periodic_critical_config())


def asymmetric_fold_config(left=3.0, right=1.0, gamma=2.0):
    """Fold ``hi - coeff |x - c|**gamma`` with different coefficients on each side.

    The ambient interval is sized so that both ends map onto the left end,
    which is then a fixed point; both branches are full.
    """
    # c - lo = (L / left)**(1/gamma), hi - c = (L / right)**(1/gamma), sum = L
    g = 1.0 / gamma
    lo_grid, hi_grid = 1e-6, 1e6
    span = lambda L: (L / left) ** g + (L / right) ** g - L  # noqa: E731
    for _ in range(200):
        mid = math.sqrt(lo_grid * hi_grid)
        if span(mid) > 0:
            lo_grid = mid
        else:
            hi_grid = mid
    L = lo_grid
    c = (L / left) ** g
    hi = L
    return {
        "ambient": [0.0, hi],
        "branches": [
            {
                "domain": [0.0, c],
                "model": {"kind": "powerlaw", "c": c, "gamma": gamma, "coeff": left, "value_at_c": hi, "direction": -1},
            },
            {
                "domain": [c, hi],
                "model": {"kind": "powerlaw", "c": c, "gamma": gamma, "coeff": right, "value_at_c": hi, "direction": -1},
            },
        ],
    }


def asymmetric_fold(left=3.0, right=1.0, gamma=2.0):
    return build_map(asymmetric_fold_config(left, right, gamma))


def chain_config(gamma1=2.0, gamma2=3.0):
    """Two critical points forming a chain on [0, 1].

    A minimum at ``c1 = 1/4`` with value ``c2 = 1/2``, and a one-sided power
    law at ``c2`` whose right germ maps to 0 and then to the fixed point 1.
    So ``c1 -> c2 -> 0 -> 1 -> 1``.  All constants are exact in binary,
    which matters near critical values where roots amplify roundoff.
    """
    c1, c2 = 0.25, 0.5
    k1 = (1.0 - c2) / c1 ** gamma1
    k2 = 1.0 / (1.0 - c2) ** gamma2
    pl = {"kind": "powerlaw", "c": c1, "gamma": gamma1, "coeff": k1, "value_at_c": c2, "direction": 1}
    return {
        "ambient": [0.0, 1.0],
        "branches": [
            {"domain": [0.0, c1], "model": dict(pl)},
            {"domain": [c1, c2], "model": dict(pl)},
            {
                "domain": [c2, 1.0],
                "model": {"kind": "powerlaw", "c": c2, "gamma": gamma2, "coeff": k2, "value_at_c": 0.0, "direction": 1},
            },
        ],
    }


def chain(gamma1=2.0, gamma2=3.0):
    return build_map(chain_config(gamma1, gamma2))
