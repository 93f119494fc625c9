import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from scalefn import invariants, maps
from scalefn.errors import ChainUnresolved, CriticalOnOrbit, IncompatibleCombinatorics
from scalefn.invariants import (
    compare_invariants,
    default_addresses,
    eigenvalue_direct,
    eigenvalue_record,
    eigenvalue_via_scaling,
    exponent_estimate,
    exponent_via_scaling,
    germ_itinerary,
)
from scalefn.symbolic import DualAddress, dual_shift, periodic_addresses

D = DualAddress.parse


def test_eigenvalues_example1(ex1):
    assert eigenvalue_direct(ex1, D("|-1")) == pytest.approx(-10 / 3, rel=1e-13)
    assert eigenvalue_direct(ex1, D("|+0,-1")) == pytest.approx(-40 / 3, rel=1e-13)
    assert eigenvalue_via_scaling(ex1, D("|+0,-1")) == pytest.approx(-40 / 3, rel=1e-12)
    for a in periodic_addresses(ex1, 3):
        idx = [s.branch for s in a.block]
        exact = math.prod(float(oracles.ex1_slope(i)) for i in idx)
        assert eigenvalue_direct(ex1, a) == pytest.approx(exact, rel=1e-12)


def test_eigenvalues_quadratic(quad, doubling_map):
    assert eigenvalue_direct(quad, D("|+0")) == pytest.approx(4.0, rel=1e-12)
    assert eigenvalue_direct(quad, D("|-1")) == pytest.approx(-2.0, rel=1e-12)
    # period two orbit {(1 +- sqrt 5) / 2}: multiplier 4 p q = -4
    assert eigenvalue_direct(quad, D("|+0,-1")) == pytest.approx(-4.0, rel=1e-12)
    assert eigenvalue_direct(doubling_map, D("|+0")) == 2.0


@pytest.mark.parametrize("name", ["example1", "quadratic"])
def test_eigenvalue_identity(name):
    f = getattr(maps, name)()
    for a in periodic_addresses(f, 2):
        rec = eigenvalue_record(f, a)
        assert rec.identity_error <= 1e-8
        assert rec.address == a


def test_eigenvalue_is_shift_invariant(quad):
    a = D("|+0,-1,-1")
    assert eigenvalue_direct(quad, dual_shift(a)) == pytest.approx(eigenvalue_direct(quad, a), rel=1e-12)


def test_critical_point_on_orbit(quad, monkeypatch):
    monkeypatch.setattr(invariants, "orbit_points", lambda f, a: [0.0])
    with pytest.raises(CriticalOnOrbit):
        eigenvalue_direct(quad, D("|-1"))


def test_eigenvalue_needs_periodic_address(ex1):
    with pytest.raises(ValueError):
        eigenvalue_via_scaling(ex1, D("+0|-1"))


def test_germ_itinerary_quadratic(quad):
    syms, pts, cycle_start, stop = germ_itinerary(quad, 0.0, side=-1)
    assert [s.branch for s in syms] == [0, 1, 0]
    assert pts == (0.0, 2.0, -2.0)
    assert (cycle_start, stop) == (2, 2)


def _oracle_gamma(word):
    """Direct length ratios: |f(J)| ~ |J|**gamma along the nested intervals at c."""
    idx = tuple(s.branch for s in word)
    lens = []
    for w in (idx, idx[:-1], idx[1:], idx[1:-1]):
        lo, hi = oracles.q_interval(w)
        lens.append(hi - lo)
    return float(math.log(lens[2] / lens[3]) / math.log(lens[0] / lens[1]))


def test_quadratic_exponent(quad):
    for side in (-1, 1):
        est = exponent_estimate(quad, 0.0, depth=18, side=side)
        assert 1.95 <= est.gamma <= 2.05
        assert est.gamma == pytest.approx(2.0, abs=1e-8)
        assert est.case == "terminal" and est.side == side
        assert est.gamma == pytest.approx(_oracle_gamma(est.word), abs=1e-6)
        assert est.error < 1e-8
    assert exponent_via_scaling(quad, 0.0) == pytest.approx(2.0, abs=1e-8)


def test_cubic_exponent(cubic_map):
    g = exponent_via_scaling(cubic_map, 0.0, depth=18)
    assert 2.9 <= g <= 3.1
    assert g == pytest.approx(3.0, abs=1e-8)


def test_chain_exponents():
    f = maps.chain()
    first = exponent_estimate(f, 0.25, depth=18, side=-1)
    assert first.case == "chain" and first.chain == (0.5,)
    assert first.gamma == pytest.approx(2.0, abs=1e-6)
    second = exponent_estimate(f, 0.5, depth=18, side=1)
    assert second.case == "terminal"
    assert second.gamma == pytest.approx(3.0, abs=1e-6)


def test_exponent_errors(ex1, quad):
    with pytest.raises(ChainUnresolved):
        exponent_estimate(ex1, 0.2)
    with pytest.raises(ChainUnresolved):
        exponent_estimate(quad, 0.0, depth=3)


@settings(max_examples=4)
@given(st.floats(-0.3, 0.3))
def test_exponent_is_a_conjugacy_invariant(coeff):
    f = maps.quadratic()
    g = maps.quadratic({"kind": "poly", "coeffs": [coeff]})
    c = g.critical_points[0].c
    ef = exponent_estimate(f, 0.0, depth=18)
    eg = exponent_estimate(g, c, depth=18)
    assert abs(ef.gamma - eg.gamma) <= 2 * max(ef.error, eg.error, 1e-9)


def test_default_addresses(ex1):
    per = periodic_addresses(ex1, 3)
    addrs = default_addresses(ex1)
    assert addrs[: len(per)] == per and len(addrs) == len(per) + 20
    assert len(default_addresses(ex1, 50)) == 50
    assert len(set(default_addresses(ex1, 50))) == 50
    assert default_addresses(ex1, 5) == per[:5]


def test_self_comparison_matches(ex1):
    rep = compare_invariants(ex1, ex1, default_addresses(ex1, 25))
    assert rep.verdict == "invariants-match"
    assert rep.disagreements == []


def test_different_lengths_are_flagged(ex1):
    g = maps.example1(0.3, 0.3, 0.4)
    addrs = [D("|+0,-1"), D("|-1"), D("+0|-1")]
    rep = compare_invariants(ex1, g, addrs)
    assert rep.verdict == "invariants-differ"
    row = rep.scaling[0]
    assert row["address"] == "|+0,-1" and not row["match"]
    assert row["f"] == pytest.approx(-0.375) and row["g"] == pytest.approx(-0.3 / 0.7)
    back = compare_invariants(g, ex1, addrs)
    assert back.verdict == rep.verdict
    assert [r["match"] for r in back.scaling] == [r["match"] for r in rep.scaling]
    d = rep.to_dict()
    assert set(d) == {"verdict", "scaling", "asymmetries", "eigenvalues", "exponents", "disagreements"}
    # l1 is 0.3 in both maps, so the -l1 class agrees
    assert [r["match"] for r in rep.scaling] == [False, True, False]
    assert d["disagreements"] == 2


def test_eigen_rows(ex1):
    g = maps.example1(0.3, 0.3, 0.4)
    rep = compare_invariants(ex1, g, [D("|-1"), D("+0|-1")], eigen=True)
    assert len(rep.eigenvalues) == 1
    assert rep.eigenvalues[0]["f"] == pytest.approx(-10 / 3)


def test_incompatible_maps(ex1, quad):
    with pytest.raises(IncompatibleCombinatorics):
        compare_invariants(ex1, quad)


def test_conjugated_quadratic_matches(quad):
    g = maps.quadratic({"kind": "poly", "coeffs": [0.2]})
    addrs = [D("|+0,-1"), D("-1|+0,-1,-1"), D("|-1,-1,+0")]
    rep = compare_invariants(quad, g, addrs)
    assert rep.verdict == "invariants-match", rep.disagreements
    assert len(rep.asymmetries) == 1 and rep.asymmetries[0]["match"]
    for r in rep.exponents:
        err = max(exponent_estimate(f, cp, 18, r["side"]).error for f, cp in ((quad, 0.0), (g, 0.2)))
        assert r["diff"] <= 2 * err
