from dataclasses import replace
from fractions import Fraction as F

import numpy as np
import pytest

from thetablocks.blocks import ThetaBlockSpec, build_block
from thetablocks.lattice import named_lattice
from thetablocks.qseries import FourierSeries
from thetablocks.weil import (
    OrbitInvarianceError,
    od_class_invariance,
    orbit_invariance_report,
    reconstruct,
    theta_decompose,
    weil_matrices,
)


@pytest.mark.parametrize("name", ["A1", "A2", "A4", "3A2", "L6", "L4"])
def test_weil_relations(name):
    w = weil_matrices(named_lattice(name))
    assert w.dim == named_lattice(name).determinant
    assert all(w.verify().values()), w.verify()


def test_wrong_signature_breaks_milgram():
    w = weil_matrices(named_lattice("A2"))
    assert not replace(w, sign=(w.sign + 2) % 8).check_milgram()


def test_corrupted_T_breaks_braid_relation():
    w = weil_matrices(named_lattice("A2"))
    t = w.t_exponents.copy()
    t[1] = (t[1] + 1) % w.conductor
    assert not replace(w, t_exponents=t).check_ST_cubed()


def test_corrupted_S_breaks_S_squared():
    w = weil_matrices(named_lattice("A4"))
    s = w.s_exponents.copy()
    s[1, 2] = s[2, 1] = (s[1, 2] + w.conductor // 5) % w.conductor
    bad = replace(w, s_exponents=s)
    assert bad.check_symmetric()
    assert not bad.check_S_squared()


def test_T_entry_is_minus_the_norm_over_two():
    lat = named_lattice("A1")
    w = weil_matrices(lat)
    for cls, rep, t in zip(w.classes, w.reps, w.rho_T()):
        assert (t + lat.norm(rep) / 2) % 1 == 0


@pytest.mark.parametrize("name", ["thetaL4", "thetaL6"])
def test_theta_decomposition_round_trip(cached_block, name):
    s = cached_block(name, 3)
    vv = theta_decompose(s)
    assert reconstruct(vv).agrees_with(s)
    assert set(vv.components) == set(s.lattice.minimal_coset_reps)


def test_round_trip_one_variable():
    s = build_block(ThetaBlockSpec.one_variable(18, {1: 2}), 6)
    vv = theta_decompose(s)
    assert vv.support_classes() == [(0,), (1,)]
    assert reconstruct(vv).agrees_with(s)


def _corrupt(s: FourierSeries, row: int) -> FourierSeries:
    coeffs = s.coeffs.astype(object).copy()
    coeffs[row] = coeffs[row] + 1
    return FourierSeries(s.lattice, s.exps.copy(), coeffs, s.qprec, weight=s.weight, index_form=s.index_form)


@pytest.mark.parametrize("name", ["thetaL4", "thetaL4_1", "thetaL4_2"])
def test_orbit_invariance_of_lattice_blocks(cached_block, name):
    rep = orbit_invariance_report(cached_block(name, 6))
    assert rep.passed and rep.classes[0]["orbits"] > 0


def test_orbit_invariance_catches_a_changed_coefficient(cached_block):
    s = cached_block("thetaL4", 4)
    bad = _corrupt(s, len(s) // 2)
    assert not orbit_invariance_report(bad).passed
    with pytest.raises(OrbitInvarianceError):
        theta_decompose(bad)


def test_orbit_invariance_catches_a_missing_coefficient(cached_block):
    s = cached_block("thetaL4", 4)
    keep = np.ones(len(s), dtype=bool)
    keep[len(s) // 3] = False
    dropped = FourierSeries(s.lattice, s.exps[keep], s.coeffs[keep], s.qprec, weight=s.weight, index_form=s.index_form)
    assert not orbit_invariance_report(dropped).passed


def test_od_invariance_of_theta_L4(cached_block):
    rep = od_class_invariance(cached_block("thetaL4", 3))
    assert rep.passed
    assert {(c["order"], c["norm"]) for c in rep.classes} >= {(2, "1"), (5, "2/5"), (10, "1/5")}


def test_od_invariance_fails_for_a_basis_element(cached_block):
    rep = od_class_invariance(cached_block("thetaL4_1", 3))
    assert not rep.passed and rep.violations


def test_od_refuses_nonsquarefree_level():
    s = build_block(ThetaBlockSpec.one_variable(18, {1: 2}), 4)
    assert s.lattice.level == 4
    with pytest.raises(ValueError):
        od_class_invariance(s)


def test_decomposition_refuses_higher_index():
    s = build_block(ThetaBlockSpec.one_variable(-6, [1, 1, 1, 1, 1, 1, 1, 1, 2, 2]), 3)
    with pytest.raises(ValueError):
        theta_decompose(s)


def test_components_are_known_to_class_precision(cached_block):
    s = cached_block("thetaL4", 3)
    vv = theta_decompose(s)
    reps = s.lattice.minimal_coset_reps
    for g, (_, nm) in reps.items():
        assert vv.precision[g] == s.qprec - F(nm) / 2
