from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from thetablocks.blocks import build_block, lattice_block, parse_block
from thetablocks.hecke import apply_T_minus, divisors
from thetablocks.qseries import A1, FourierSeries, theta_odd
from thetablocks.reference import IDENTITY_49, IDENTITY_67

from oracles import hecke_by_substitution, series_dict


def below(d: dict, qlimit) -> dict:
    return {k: v for k, v in d.items() if k[0] < qlimit}


@pytest.mark.parametrize("m", [2, 3, 4])
def test_one_variable_matches_substitution_definition(m):
    s = build_block(parse_block(IDENTITY_67[1]), 8)
    got = apply_T_minus(s, m, 2)
    assert got.qprec == F(8, m)
    assert series_dict(got) == below(hecke_by_substitution(s, m, 2), got.qprec)


@pytest.mark.parametrize("m", [2, 3])
def test_weight_three_block_matches_substitution_definition(m):
    s = build_block(parse_block(IDENTITY_49[1]), 7)
    got = apply_T_minus(s, m, 3)
    assert series_dict(got) == below(hecke_by_substitution(s, m, 3), got.qprec)


def test_T1_is_identity():
    s = lattice_block("thetaL4", 4)
    assert apply_T_minus(s, 1, 2).agrees_with(s)


def test_index_is_multiplied():
    s = lattice_block("thetaL4", 6)
    assert apply_T_minus(s, 3, 2).index == 3
    one_var = build_block(parse_block(IDENTITY_67[1]), 6)
    assert apply_T_minus(one_var, 2, 2).index == 134


def test_coprime_composition():
    s = build_block(parse_block(IDENTITY_67[1]), 12)
    a = apply_T_minus(apply_T_minus(s, 3, 2), 2, 2)
    b = apply_T_minus(s, 6, 2)
    p = min(a.qprec, b.qprec)
    assert a.truncate(p).agrees_with(b.truncate(p))


@given(st.integers(-5, 5), st.integers(-5, 5))
@settings(max_examples=25, deadline=None)
def test_linearity(x, y):
    s = build_block(parse_block(IDENTITY_67[1]), 6)
    t = build_block(parse_block(IDENTITY_67[2]), 6)
    lhs = apply_T_minus(s.scale(x) + t.scale(y), 2, 2)
    rhs = apply_T_minus(s, 2, 2).scale(x) + apply_T_minus(t, 2, 2).scale(y)
    assert lhs.agrees_with(rhs)


@pytest.mark.parametrize("m", [0, -1, F(3, 2)])
def test_rejects_bad_m(m):
    with pytest.raises(ValueError):
        apply_T_minus(lattice_block("thetaL4", 2), m, 2)


def test_rejects_fractional_exponents():
    with pytest.raises(ValueError):
        apply_T_minus(theta_odd(A1, (2,), 3), 2, F(1, 2))


def test_zero_series():
    z = FourierSeries.zero(A1, 4)
    assert apply_T_minus(z, 2, 2).is_zero()


def test_divisors():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert divisors(1) == [1]
