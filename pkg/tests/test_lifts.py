from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from thetablocks.blocks import ThetaBlockSpec, build_block
from thetablocks.hecke import apply_T_minus
from thetablocks.lifts import (
    FJExpansion,
    _exact_divide,
    borcherds_data,
    borcherds_expand,
    compare_fj,
    divisor_multiplicity,
    grit,
    is_positive,
    psi_coefficient,
    quotient_psi,
    weak_support_ok,
)
from thetablocks.qseries import PrecisionError, mul

from oracles import poly_mul, series_dict

# eta^18 theta^2: weight 10, index 1 on A1
PHI10 = ThetaBlockSpec.one_variable(18, {1: 2})


@pytest.fixture(scope="module")
def phi10():
    return build_block(PHI10, 12)


@pytest.fixture(scope="module")
def psi10(phi10):
    return quotient_psi(phi10)


def test_quotient_residual_vanishes(phi10, psi10):
    top = psi10.qprec + 1
    res = mul(psi10, phi10).truncate(top) + apply_T_minus(phi10, 2, 10).truncate(top)
    assert res.is_zero()


def test_quotient_precision_rule(phi10, psi10):
    assert psi10.qprec == phi10.qprec / 2 - 1
    with pytest.raises(PrecisionError):
        quotient_psi(phi10, psi10.qprec + 1)


def test_quotient_rejects_wrong_order():
    s = build_block(ThetaBlockSpec.one_variable(42, {1: 2}), 6)
    with pytest.raises(ValueError):
        quotient_psi(s)


def test_quotient_is_weak_and_reflects_leading_block(psi10):
    assert weak_support_ok(psi10)
    data = borcherds_data(psi10)
    assert data.leading_block.normalized()[1] == PHI10.normalized()[1]
    assert data.A == PHI10.q_order
    assert data.sign_datum_D == 0


def test_grit_equals_borch_for_weight_ten(phi10, psi10):
    data = borcherds_data(psi10)
    g = grit(phi10, 3, 3)
    b = borcherds_expand(psi10, 2, 3, data=data)
    assert b.offset == data.C
    assert all(compare_fj(g, b, range(int(data.C), int(data.C) + 3)).values())


def test_grit_first_coefficient_is_the_input(phi10):
    g = grit(phi10, 2)
    assert g.at(1).agrees_with(phi10)
    assert g.at(0).is_zero()
    with pytest.raises(KeyError):
        g.at(5)


def test_grit_rejects_higher_index():
    s = build_block(ThetaBlockSpec.one_variable(-6, [1, 1, 1, 1, 1, 1, 1, 1, 2, 2]), 4)
    with pytest.raises(ValueError):
        grit(s, 2)


def _borch_oracle(psi, data, qprec):
    """Orders 1 and 2 of ``prod (1 - q^n zeta^l xi^m)^{f(nm, l)}`` by binomial expansion."""
    f = {(qe, l): c for qe, l, c in psi.terms()}
    x1 = {}  # m = 1 factors
    x2 = {}  # m = 2 factors
    for (qe, l), c in f.items():
        x1[(qe, l)] = c
        if qe % 2 == 0:
            x2[(qe / 2, l)] = c
    e1, e2 = {}, {}
    for key, c in x1.items():
        e1[key] = e1.get(key, 0) - c
        sq = (2 * key[0], tuple(2 * v for v in key[1]))
        e2[sq] = e2.get(sq, 0) + c * (c - 1) // 2  # binomial(f, 2), any integer f
    for key, c in x2.items():
        e2[key] = e2.get(key, 0) - c
    pairs = poly_mul(e1, e1, qprec)
    for (k, v) in pairs.items():
        e2[k] = e2.get(k, 0) + F(v, 2)
    diag = {}
    for key, c in x1.items():
        sq = (2 * key[0], tuple(2 * v for v in key[1]))
        diag[sq] = diag.get(sq, 0) + c * c
    for k, v in diag.items():
        e2[k] = e2.get(k, 0) - F(v, 2)
    lead = series_dict(build_block(data.leading_block, qprec))
    return [poly_mul(lead, {k: v for k, v in e.items() if v}, qprec) for e in (e1, e2)]


def test_exp_log_matches_binomial_product(psi10):
    data = borcherds_data(psi10)
    b = borcherds_expand(psi10, 2, 3, data=data)
    o1, o2 = _borch_oracle(psi10, data, 3)
    assert series_dict(b.at(int(data.C) + 1)) == o1
    assert series_dict(b.at(int(data.C) + 2)) == {k: v for k, v in o2.items() if v}


def test_borcherds_expand_precision_guard(psi10):
    with pytest.raises(PrecisionError):
        borcherds_expand(psi10, 4, 5)


def test_divisor_multiplicity_one_variable(psi10):
    # (0, zeta) has hyperbolic norm -1/2: the multiplicity sums f(d^2 * 0, d)
    assert divisor_multiplicity(psi10, 0, (1,)) == psi_coefficient(psi10, 0, (1,))
    with pytest.raises(ValueError):
        divisor_multiplicity(psi10, 1, (0,))


def test_orbit_rule_agrees_with_table(psi10):
    for qe, l, c in psi10.terms():
        if qe < 3:
            continue
        # shifting l by a lattice vector (2 in dual coordinates) moves n by the matching amount
        n2 = qe + (l[0] + 1)  # ((l + 2)^2 - l^2) / 4
        if n2 < psi10.qprec:
            assert psi_coefficient(psi10, int(n2), (int(l[0]) + 2,)) == c


def test_is_positive_ordering():
    assert is_positive((0, 1, -5)) and not is_positive((0, -1, 5)) and not is_positive((0, 0))


def test_fj_json_round_trip(phi10):
    g = grit(phi10, 2, 2)
    back = FJExpansion.from_json(g.to_json())
    assert all(back.at(m).agrees_with(g.at(m)) for m in g.orders)


laurent = st.dictionaries(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), st.integers(-4, 4), min_size=1, max_size=6)


def _pmul(a, b):
    out = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = (ka[0] + kb[0], ka[1] + kb[1])
            out[k] = out.get(k, 0) + ca * cb
    return {k: v for k, v in out.items() if v}


@given(laurent, laurent)
@settings(max_examples=80, deadline=None)
def test_exact_division_inverts_multiplication(a, b):
    a = {k: v for k, v in a.items() if v}
    b = {k: v for k, v in b.items() if v}
    if not a or not b:
        return
    assert _exact_divide(_pmul(a, b), b) == a


def test_exact_division_detects_remainder():
    with pytest.raises(ArithmeticError):
        _exact_divide({(0,): 1, (2,): 1}, {(0,): 1, (1,): 1})


def test_L4_lattice_vector_carries_no_divisor(cached_psi):
    psi = cached_psi("L4", 6)
    lat = psi.lattice
    v = tuple(lat.gram[0])  # first basis vector of L4, in dual coordinates; norm 4
    assert lat.norm(v) == 4
    # (1, v) has hyperbolic norm -2 and sits in the trivial class
    assert divisor_multiplicity(psi, 1, v) == 0
