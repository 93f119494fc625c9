"""Independent reference computations.

These do not import scalefn.  Example 1 is handled exactly with
fractions; the quadratic uses its closed-form inverse branches in
mpmath.  Other tests compare the package against these values.
"""

from fractions import Fraction as F
import itertools

import mpmath

# Example 1: branches of slope (l1+l2)/l0, -1/l1, (l0+l1)/l2 with images
# [l0, 1], [0, 1], [0, l0+l1].
EX1_SUCC = {0: (1, 2), 1: (0, 1, 2), 2: (0, 1)}
EX1_SIGN = {0: 1, 1: -1, 2: 1}


def ex1_lengths(l0="1/5", l1="3/10", l2="1/2"):
    return F(l0), F(l1), F(l2)


def ex1_inverse(i, y, ls):
    l0, l1, l2 = ls
    if i == 0:
        return (y - l0) * l0 / (l1 + l2)
    if i == 1:
        return l0 + l1 * (1 - y)
    return l0 + l1 + y * l2 / (l0 + l1)


def ex1_domain(i, ls):
    l0, l1, l2 = ls
    return [(F(0), l0), (l0, l0 + l1), (l0 + l1, F(1))][i]


def ex1_interval(indices, ls=None):
    """Exact I_w for a word given by branch indices, or None if not admissible."""
    ls = ls or ex1_lengths()
    for a, b in zip(indices, indices[1:]):
        if b not in EX1_SUCC[a]:
            return None
    lo, hi = ex1_domain(indices[-1], ls)
    for i in reversed(indices[:-1]):
        lo, hi = sorted((ex1_inverse(i, lo, ls), ex1_inverse(i, hi, ls)))
    return lo, hi


def ex1_words(n):
    """All admissible index words of length n, lexicographic."""
    out = []
    for w in itertools.product(range(3), repeat=n):
        if all(b in EX1_SUCC[a] for a, b in zip(w, w[1:])):
            out.append(w)
    return out


def ex1_scale(indices, ls=None):
    """Exact signed scale of an index word of length >= 2."""
    lo, hi = ex1_interval(indices, ls)
    plo, phi = ex1_interval(indices[:-1], ls)
    return EX1_SIGN[indices[-1]] * (hi - lo) / (phi - plo)


def ex1_fixed_point(block, ls=None):
    """Exact fixed point of g_{b0} o ... o g_{bk-1} (affine, so solved directly)."""
    ls = ls or ex1_lengths()

    def comp(y):
        for i in reversed(block):
            y = ex1_inverse(i, y, ls)
        return y

    c0 = comp(F(0))
    slope = comp(F(1)) - c0
    return c0 / (1 - slope)


def ex1_slope(i, ls=None):
    l0, l1, l2 = ls or ex1_lengths()
    return [(l1 + l2) / l0, -1 / l1, (l0 + l1) / l2][i]


# Quadratic q(x) = 2 - x**2 on [-2, 2]: branch 0 = [-2, 0] increasing,
# branch 1 = [0, 2] decreasing, both onto [-2, 2].
Q_SIGN = {0: 1, 1: -1}


def q_inverse(i, y):
    r = mpmath.sqrt(2 - y)
    return -r if i == 0 else r


def q_interval(indices, dps=80):
    with mpmath.workdps(dps):
        lo, hi = (mpmath.mpf(-2), mpmath.mpf(0)) if indices[-1] == 0 else (mpmath.mpf(0), mpmath.mpf(2))
        for i in reversed(indices[:-1]):
            lo, hi = sorted((q_inverse(i, lo), q_inverse(i, hi)))
        return lo, hi


def q_scale(indices, dps=80):
    with mpmath.workdps(dps):
        lo, hi = q_interval(indices, dps)
        plo, phi = q_interval(indices[:-1], dps)
        return Q_SIGN[indices[-1]] * (hi - lo) / (phi - plo)


def q_distortion(indices, x, y, dps=60):
    """|g_w'(x)| / |g_w'(y)| by the chain rule with q'(t) = -2t."""
    with mpmath.workdps(dps):
        def inv_deriv(z):
            d = mpmath.mpf(1)
            for i in reversed(indices):
                z = q_inverse(i, z)
                d /= abs(2 * z)
            return d

        return float(inv_deriv(mpmath.mpf(x)) / inv_deriv(mpmath.mpf(y)))
