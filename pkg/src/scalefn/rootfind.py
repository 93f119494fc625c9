"""Safeguarded root solving for strictly monotone functions.

Bisection keeps a valid bracket at all times; once the bracket is narrow the
solver switches to Newton steps, falling back to bisection whenever a step
would leave the bracket.
"""

import numpy as np

from ._num import absval, is_mp

NEWTON_SWITCH = 1e-6
RESIDUAL_TOL = 1e-13


def solve_monotone(func, dfunc, target, lo, hi, tol=RESIDUAL_TOL, max_iter=200):
    """Solve ``func(x) = target`` on ``[lo, hi]`` for a monotone ``func``.

    Works with floats and mpmath numbers.  ``tol`` bounds the residual
    ``|func(x) - target|``; for mpmath inputs pass a tolerance matched to the
    working precision.

    Raises ValueError if ``target`` is not bracketed by the endpoint values.
    """
    flo = func(lo) - target
    fhi = func(hi) - target
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        if min(absval(flo), absval(fhi)) <= tol:
            return lo if absval(flo) <= absval(fhi) else hi
        raise ValueError("target not bracketed")
    increasing = fhi > 0
    a, b = lo, hi
    width0 = hi - lo
    x = (a + b) / 2
    for _ in range(max_iter):
        fx = func(x) - target
        if absval(fx) <= tol:
            return x
        if (fx > 0) == increasing:
            b = x
        else:
            a = x
        if b - a <= NEWTON_SWITCH * width0:
            d = dfunc(x)
            step_ok = d != 0
            if step_ok:
                xn = x - fx / d
                step_ok = a < xn < b
            x = xn if step_ok else (a + b) / 2
        else:
            x = (a + b) / 2
        if b - a == 0 or (not is_mp(x) and b - a <= 4 * np.spacing(abs(x))):
            return x
    return x


def solve_monotone_array(func, dfunc, target, lo, hi, tol=RESIDUAL_TOL, max_iter=200):
    """Vectorised :func:`solve_monotone` over a float array of targets."""
    target = np.asarray(target, dtype=float)
    a = np.full_like(target, lo)
    b = np.full_like(target, hi)
    increasing = func(np.asarray(hi)) > func(np.asarray(lo))
    x = (a + b) / 2
    width0 = hi - lo
    for _ in range(max_iter):
        fx = func(x) - target
        done = np.abs(fx) <= tol
        if done.all():
            break
        up = (fx > 0) == increasing
        b = np.where(up & ~done, x, b)
        a = np.where(~up & ~done, x, a)
        narrow = (b - a) <= NEWTON_SWITCH * width0
        d = dfunc(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - fx / d
        good = narrow & (d != 0) & (xn > a) & (xn < b)
        x = np.where(done, x, np.where(good, xn, (a + b) / 2))
        if np.all(done | ((b - a) <= 4 * np.spacing(np.abs(x)))):
            break
    return x
