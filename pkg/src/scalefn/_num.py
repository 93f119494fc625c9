"""Arithmetic helpers that accept floats, numpy arrays or mpmath numbers.

Branch models are evaluated in three settings: plain floats (orbits,
evaluation), numpy arrays (whole partition levels) and mpmath numbers
(deep intervals whose lengths fall far below double resolution).
"""

import math

import mpmath
import numpy as np

_MPF = mpmath.mpf


def is_mp(x):
    return isinstance(x, _MPF)


def sin(x):
    if is_mp(x):
        return mpmath.sin(x)
    if isinstance(x, np.ndarray):
        return np.sin(x)
    return math.sin(x)


def cos(x):
    if is_mp(x):
        return mpmath.cos(x)
    if isinstance(x, np.ndarray):
        return np.cos(x)
    return math.cos(x)


def pi_like(x):
    return mpmath.mp.pi if is_mp(x) else math.pi


def clip_nonneg(u):
    if isinstance(u, np.ndarray):
        return np.maximum(u, 0.0)
    return u if u > 0 else 0 * u


def absval(u):
    return np.abs(u) if isinstance(u, np.ndarray) else abs(u)


def power(u, e):
    """``u ** e`` for ``u >= 0``; keeps the arbitrary-precision type."""
    if is_mp(u):
        return mpmath.power(u, e) if u > 0 else mpmath.mpf(0)
    return u ** e


def to_type(value, like):
    """Convert a float constant to the number type of ``like``."""
    if is_mp(like):
        return mpmath.mpf(value)
    return value
