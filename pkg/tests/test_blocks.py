from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from thetablocks.blocks import (
    LATTICE_BLOCKS,
    N_wt2,
    N_wt3,
    ThetaBlockSpec,
    block_report,
    build_block,
    build_corollary_blocks,
    build_family_wt2,
    build_family_wt3,
    family_spec,
    holomorphy_check,
    lattice_block_spec,
    parse_block,
    riemann_theta_relation_check,
    riemann_theta_relation_sides,
    wt2_vector,
    wt3_vector,
)
from thetablocks.lattice import named_lattice
from thetablocks.qseries import A1
from thetablocks.reference import IDENTITY_49, IDENTITY_67

from oracles import eta_product, poly_mul, series_dict, theta_triple_product


def theta_at(a: int, qprec) -> dict:
    """``theta(a z)`` from the triple product: the zeta exponent scales by ``a``."""
    return {(q, (l[0] * a,)): c for (q, l), c in theta_triple_product(qprec).items()}


def test_parser_reads_displayed_blocks():
    spec = parse_block("eta^-6 th(1)^3 th(2)^2 th(3)^2 th(4) th(5) th(8)")
    assert spec.eta_pow == -6
    assert dict((a[0], m) for a, m in spec.thetas) == {1: 3, 2: 2, 3: 2, 4: 1, 5: 1, 8: 1}


def test_parser_accepts_separators_and_bare_eta():
    a = parse_block("eta * th(2) * th(-1)^2 eta^2")
    assert a.eta_pow == 3 and dict((x[0], m) for x, m in a.thetas) == {2: 1, -1: 2}


@pytest.mark.parametrize("bad", ["eta^", "th(x)", "zeta^2", "th(1)^-2"])
def test_parser_rejects_garbage(bad):
    with pytest.raises(ValueError):
        parse_block(bad)


def test_block_matches_product_oracle():
    # eta^6 * block is a bare theta product: compare it with the triple-product oracle
    q = F(5)
    args = (1, 2, 3, 4, 5, 7)
    spec = parse_block("eta^-6 " + " ".join(f"th({a})" for a in args))
    s = build_block(spec, q)
    acc = {(F(0), (F(0),)): 1}
    for a in args:
        acc = poly_mul(acc, theta_at(a, q + 1), q + 1)
    eta6 = {(F(0), ()): 1}
    for _ in range(6):
        eta6 = poly_mul(eta6, eta_product(q + 1), q + 1)
    lifted = {(qe, (F(0),)): c for (qe, _), c in eta6.items()}
    assert poly_mul(series_dict(s), lifted, q) == {k: v for k, v in acc.items() if k[0] < q}


def test_negative_argument_flips_sign():
    a = build_block(parse_block("eta^-1 th(1) th(-3)"), 4)
    b = build_block(parse_block("eta^-1 th(1) th(3)"), 4)
    assert a.agrees_with(-b)


def test_zero_argument_gives_zero_series():
    s = build_block(parse_block("eta^-2 th(0) th(3)"), 4)
    assert s.is_zero() and s.qprec == 4


def test_weight_index_order_of_the_index_67_block():
    spec = parse_block(IDENTITY_67[1])
    assert (spec.weight, spec.index, spec.q_order) == (2, 67, 1)


def test_block_report_scan():
    rep = block_report(parse_block(IDENTITY_49[1]), 4)
    assert rep.weight == 3 and rep.index == 49 and rep.q_order == 1
    assert rep.holomorphic_up_to_prec and rep.q_vanishing_order == 1


def test_holomorphy_negative_control():
    # q^(1/6) zeta^2 at index 5 has 4 N n - r^2 = 10/3 - 4 < 0
    assert not holomorphy_check(build_block(parse_block("eta^-2 th(1) th(3)"), 3))


def test_holomorphy_refuses_higher_lattice_index():
    lat = named_lattice("L4")
    spec = ThetaBlockSpec.on_lattice(lat, 0, [(1, 0, 0, 0), (1, 0, 0, 0)])
    with pytest.raises(NotImplementedError):
        holomorphy_check(build_block(spec, 2))


@given(st.tuples(*[st.integers(-6, 6)] * 4))
@settings(max_examples=80, deadline=None)
def test_wt2_index_formula(a):
    spec = family_spec(2, a)
    assert spec.index == N_wt2(a)
    assert spec.weight == 2 and spec.q_order == 1
    v = wt2_vector(a)
    g = named_lattice("L4").gram
    assert F(sum(v[i] * g[i][j] * v[j] for i in range(4) for j in range(4)), 2) == N_wt2(a)


@given(st.tuples(*[st.integers(-5, 5)] * 6))
@settings(max_examples=80, deadline=None)
def test_wt3_index_formula(b):
    spec = family_spec(3, b)
    assert spec.index == N_wt3(b)
    assert spec.weight == 3 and spec.q_order == 1
    v = wt3_vector(b)
    g = named_lattice("L6").gram
    assert F(sum(v[i] * g[i][j] * v[j] for i in range(6) for j in range(6)), 2) == N_wt3(b)


@pytest.mark.parametrize("a", [(1, 1, 1, 1), (3, 1, 1, 1), (2, -1, 1, 0)])
def test_wt2_family_direct_equals_lattice_route(a):
    assert build_family_wt2(a, 5).agrees_with(build_family_wt2(a, 5, via="lattice"))


@pytest.mark.parametrize("b", [(1, 1, 1, 1, 1, 1), (1, 2, 1, 3, 1, 1)])
def test_wt3_family_direct_equals_lattice_route(b):
    assert build_family_wt3(b, 5).agrees_with(build_family_wt3(b, 5, via="lattice"))


@pytest.mark.parametrize("params", [IDENTITY_67[0], IDENTITY_49[0], (1, 2, 1, 1), (2, 1, 1, 1, 2, 1)])
def test_corollary_splitting(params):
    build = build_family_wt2 if len(params) == 4 else build_family_wt3
    lhs = build(params, 6)
    assert lhs.agrees_with(build_corollary_blocks(params, 1, 6) - build_corollary_blocks(params, 2, 6))


def test_corollary_rejects_wrong_arity():
    with pytest.raises(ValueError):
        build_corollary_blocks((1, 2, 3), 1, 4)


@pytest.mark.parametrize("data", [IDENTITY_67, IDENTITY_49])
def test_displayed_identity(data):
    _, lhs, first, second = data
    a, b, c = (build_block(parse_block(s), 10) for s in (lhs, first, second))
    assert a.agrees_with(b - c)
    assert not a.is_zero()


@pytest.mark.parametrize("x", [(1, 1, 1, 1), (3, 1, 1, 1), (2, 1, -1, 2), (1, 3, 3, 3)])
def test_riemann_theta_relation(x):
    assert riemann_theta_relation_check(x, 8)


def test_riemann_theta_relation_negative_control():
    lhs1, lhs2, rhs = riemann_theta_relation_sides((1, 3, 3, 3), 6)
    assert not lhs2.is_zero()
    assert not (lhs1 - lhs2).agrees_with(rhs)


def test_riemann_theta_relation_needs_even_sum():
    with pytest.raises(ValueError):
        riemann_theta_relation_check((1, 1, 1, 2), 4)


@pytest.mark.parametrize("name", sorted(LATTICE_BLOCKS))
def test_lattice_blocks_have_index_one_weight_and_order(name):
    spec = lattice_block_spec(name)
    lat = spec.lattice
    assert spec.index == 1
    assert spec.weight == (2 if lat.rank == 4 else 3)
    assert spec.q_order == 1


def test_one_variable_index_is_half_the_square_sum():
    spec = ThetaBlockSpec.one_variable(0, {1: 2, 3: 1})
    assert spec.lattice is A1 and spec.index == F(11, 2)
