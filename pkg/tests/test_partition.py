import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from scalefn import maps
from scalefn.errors import NotDecaying, OutOfDomain, UnsuitableWord
from scalefn.partition import (
    Symbol,
    critical_level,
    critical_windows,
    decay_fit,
    distortion_ratio,
    first_level,
    format_word,
    is_suitable,
    parse_word,
    partition_level,
    partition_levels,
    refine,
    sign_of_word,
    word_from_indices,
    word_interval,
)


def test_symbol_syntax():
    w = parse_word("+0,-1,+2")
    assert w == (Symbol(0, 1), Symbol(1, -1), Symbol(2, 1))
    assert format_word(w) == "+0,-1,+2"
    assert parse_word("") == ()
    with pytest.raises(ValueError):
        parse_word("0")


def test_word_interval_small_example(ex1):
    iv = word_interval(ex1, parse_word("+0,-1"))
    assert (iv.lo, iv.hi) == pytest.approx((0.0, 0.075), abs=1e-15)
    assert iv.length == pytest.approx(0.075, rel=1e-14)
    assert iv.log_length == pytest.approx(np.log(0.075), rel=1e-14)


def test_unsuitable_words_are_rejected(ex1):
    with pytest.raises(UnsuitableWord):
        word_interval(ex1, parse_word("+0,+0"))
    with pytest.raises(UnsuitableWord):
        word_interval(ex1, parse_word("+1"))  # branch 1 reverses orientation
    with pytest.raises(UnsuitableWord):
        word_interval(ex1, parse_word("+5"))
    assert not is_suitable(ex1, parse_word("+2,+2"))
    assert is_suitable(ex1, parse_word("+2,-1,-1"))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_word_interval_matches_exact_oracle(ex1, n):
    for w in oracles.ex1_words(n):
        lo, hi = oracles.ex1_interval(w)
        iv = word_interval(ex1, word_from_indices(ex1, w))
        assert iv.lo == pytest.approx(float(lo), abs=1e-15)
        assert iv.hi == pytest.approx(float(hi), abs=1e-15)


def test_quadratic_word_interval_matches_closed_form(quad):
    for w in [(0, 1), (1, 1, 0), (0, 1, 1, 0, 1), (1, 0, 0, 0, 1, 1, 0)]:
        lo, hi = oracles.q_interval(w)
        iv = word_interval(quad, word_from_indices(quad, w))
        assert iv.lo == pytest.approx(float(lo), abs=1e-14)
        assert iv.hi == pytest.approx(float(hi), abs=1e-14)


def test_level_matches_exact_oracle(ex1):
    lvl = partition_level(ex1, 7)
    words = oracles.ex1_words(7)
    assert lvl.count == len(words)
    assert [tuple(int(i) for i in c) for c in lvl.codes] == words
    exact = np.array([[float(x) for x in oracles.ex1_interval(w)] for w in words])
    np.testing.assert_allclose(lvl.lo, exact[:, 0], atol=1e-14)
    np.testing.assert_allclose(lvl.hi, exact[:, 1], atol=1e-14)


def test_counts_follow_incidence(ex1, quad, identity_map):
    for f in (ex1, quad, identity_map):
        A = f.incidence.astype(np.int64)
        ones = np.ones(f.n_branches, dtype=np.int64)
        for lvl in partition_levels(f, 9):
            expected = ones @ np.linalg.matrix_power(A, lvl.n - 1) @ ones
            assert lvl.count == expected
    assert refine(ex1, first_level(ex1)).count == 7
    assert partition_level(identity_map, 5).count == 1


@pytest.mark.parametrize("name,n_max", [("example1", 12), ("quadratic", 12), ("cubic", 10), ("doubling", 10)])
def test_levels_tile_the_ambient_interval(name, n_max):
    f = getattr(maps, name)()
    width = f.ambient.hi - f.ambient.lo
    for lvl in partition_levels(f, n_max):
        order = np.argsort(lvl.lo)
        lo, hi = lvl.lo[order], lvl.hi[order]
        assert np.all(lvl.lengths > 0)
        assert lo[0] == f.ambient.lo and hi[-1] == f.ambient.hi
        np.testing.assert_allclose(lo[1:], hi[:-1], atol=1e-12 * width)
        assert lvl.lengths.sum() == pytest.approx(width, abs=1e-10 * width)


@pytest.mark.parametrize("name", ["example1", "quadratic"])
def test_children_tile_their_parent(name):
    f = getattr(maps, name)()
    levels = list(partition_levels(f, 8))
    for parent, child in zip(levels, levels[1:]):
        index = {tuple(c): k for k, c in enumerate(parent.codes.tolist())}
        total = np.zeros(parent.count)
        lo = np.full(parent.count, np.inf)
        hi = np.full(parent.count, -np.inf)
        for k, c in enumerate(child.codes.tolist()):
            j = index[tuple(c[:-1])]
            total[j] += child.lengths[k]
            lo[j] = min(lo[j], child.lo[k])
            hi[j] = max(hi[j], child.hi[k])
        np.testing.assert_allclose(total, parent.lengths, rtol=1e-10)
        np.testing.assert_allclose(lo, parent.lo, atol=1e-14)
        np.testing.assert_allclose(hi, parent.hi, atol=1e-14)


def test_entries_are_lexicographic(ex1):
    lvl = partition_level(ex1, 3)
    words = [tuple(s.branch for s in w) for w, _ in lvl.entries]
    assert words == sorted(words)
    w, iv = lvl.entries[0]
    assert format_word(w) == "+0,-1,+0"
    assert iv.length == pytest.approx(float(np.diff(oracles.ex1_interval((0, 1, 0)))[0]))


@pytest.mark.parametrize("name", ["example1", "quadratic", "cubic", "doubling", "asymmetric_fold"])
def test_lambda_is_nonincreasing(name):
    f = getattr(maps, name)()
    lam = [lvl.lambda_ for lvl in partition_levels(f, 11)]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(lam, lam[1:]))


def test_decay_fit_values(ex1, doubling_map, identity_map):
    fit = decay_fit(doubling_map, 8)
    assert fit.mu == pytest.approx(0.5, rel=1e-12)
    assert fit.K == pytest.approx(1.0, rel=1e-12)
    fit = decay_fit(ex1, 10)
    assert fit.mu < 0.8
    lam = np.array(fit.lambdas)
    assert np.all(lam <= fit.K * fit.mu ** np.arange(1, 11) * (1 + 1e-12))
    with pytest.raises(NotDecaying) as info:
        decay_fit(identity_map, 6)
    assert info.value.fit.mu == pytest.approx(1.0)
    with pytest.raises(ValueError):
        decay_fit(ex1, 3)


@given(st.lists(st.sampled_from([1, -1]), min_size=1, max_size=12), st.lists(st.sampled_from([1, -1]), max_size=12))
def test_sign_is_multiplicative(s1, s2):
    w1 = tuple(Symbol(0, s) for s in s1)
    w2 = tuple(Symbol(0, s) for s in s2)
    assert sign_of_word(w1 + w2) == sign_of_word(w1) * sign_of_word(w2)
    assert sign_of_word(w1) == int(np.prod(s1))


words_ex1 = st.integers(1, 6).flatmap(lambda n: st.sampled_from(oracles.ex1_words(n)))


@given(words_ex1, st.floats(0, 1), st.floats(0, 1))
def test_affine_map_has_no_distortion(w, s, t):
    f = maps.example1()
    lo, hi = f.branches[w[-1]].image
    x, y = lo + s * (hi - lo), lo + t * (hi - lo)
    assert distortion_ratio(f, word_from_indices(f, w), x, y) == pytest.approx(1.0, rel=1e-12)


def test_quadratic_distortion_matches_chain_rule(quad):
    for w, x, y in [((0, 1), 1.0, 1.5), ((1, 1, 0), -1.0, 1.9), ((0, 1, 1, 0, 1), -1.99, 0.5)]:
        got = distortion_ratio(quad, word_from_indices(quad, w), x, y)
        assert got == pytest.approx(oracles.q_distortion(w, x, y), rel=1e-10)
    assert distortion_ratio(quad, parse_word("+0,-1"), 0.3, 0.3) == 1.0
    with pytest.raises(OutOfDomain):
        distortion_ratio(quad, parse_word("+0"), 0.0, 3.0)


def test_critical_windows(quad, ex1):
    assert critical_windows(quad, 2) == frozenset({(0, 1), (1, 1)})
    assert critical_windows(quad, 3) == frozenset({(0, 1, 0), (1, 1, 0)})
    assert critical_level(quad) == 2
    assert critical_windows(ex1, 3) == frozenset()
    assert critical_level(ex1) == 1


def test_word_from_indices_uses_branch_orientation(ex1):
    assert word_from_indices(ex1, [0, 1, 2]) == parse_word("+0,-1,+2")
    for w in itertools.islice(oracles.ex1_words(4), 10):
        assert is_suitable(ex1, word_from_indices(ex1, w))
