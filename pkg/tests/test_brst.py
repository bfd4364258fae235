from fractions import Fraction
from types import SimpleNamespace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import bundled
from msbrst.action import LieAlgebraSpec
from msbrst.brst import (
    brst_h0,
    brst_report,
    ce_d,
    check_brst,
    check_commutation,
    check_current_bracket_rule,
    invariants_oracle,
    current_bracket_defect,
    maurer_cartan,
    module_report,
    rho_apply,
    total_d,
    total_degree,
)
from msbrst.exalg import ext_d
from msbrst.koszul import ObservableAlgebra, koszul_d, rho
from msbrst.mstruct import Observable

SO3 = LieAlgebraSpec.from_triples("abc", {(2, 0, 1): 1, (0, 1, 2): 1, (1, 2, 0): 1})


def so3_stub():
    return SimpleNamespace(g=3, C=SO3.C, norm_alphas=ObservableAlgebra.norm_alphas)


def test_maurer_cartan_so3():
    alg = so3_stub()
    assert maurer_cartan(alg, 0) == {(1, 2): -1}
    assert maurer_cartan(alg, 2) == {(0, 1): -1}
    assert maurer_cartan(alg, 0, sign=1) == {(1, 2): 1}


def test_maurer_cartan_abelian_is_zero(r4):
    assert maurer_cartan(ObservableAlgebra(r4), 0) == {}


def test_translation_acts_by_one_on_q1(r4):
    alg = ObservableAlgebra(r4)
    q1, p1 = (0,), (2,)
    assert rho(alg, {(q1, (), ()): 1}, 0) == {((), (), ()): 1}
    assert rho(alg, {(p1, (), ()): 1}, 0) == {}


def test_ce_d_on_q1(r4):
    alg = ObservableAlgebra(r4)
    assert ce_d(alg, {((0,), (), ()): 1}) == {((), (), (0,)): 1}


def test_rho_apply_rejects_alpha_words(r4):
    alg = ObservableAlgebra(r4)
    assert rho_apply(alg, {((0,), (), ()): 1}, 0)
    with pytest.raises(ValueError):
        rho_apply(alg, {((0,), (), (0,)): 1}, 0)


def test_total_degree():
    assert total_degree(((0, 1), (0,), (0, 1))) == 1
    assert total_degree(((), (0, 0), ())) == -2


@pytest.mark.parametrize("name", ["symplectic_r4", "volume_r3", "dw2", "symplectic_aff"])
def test_brst_report_passes(name):
    assert brst_report(bundled(name)).ok


def test_maurer_cartan_sign_is_forced(aff):
    rep = brst_report(aff, mc_sign=1)
    assert not rep["brst.ce_nilpotent"].ok
    assert brst_report(aff)["brst.ce_nilpotent"].ok


@given(data=st.data())
def test_total_d_squares_to_zero_on_aff(data):
    alg = ObservableAlgebra(bundled("symplectic_aff"))
    lw = data.draw(st.sampled_from(alg.words(2, 3)))
    ww = tuple(sorted(data.draw(st.lists(st.integers(0, 1), max_size=2))))
    aw = tuple(sorted(set(data.draw(st.lists(st.integers(0, 1), max_size=2)))))
    s, ww = alg.norm_ws(ww)
    if not s:
        return
    x = {(lw, ww, aw): Fraction(1)}
    assert total_d(alg, total_d(alg, x)) == {}
    assert ce_d(alg, koszul_d(alg, x)) == koszul_d(alg, ce_d(alg, x))


def test_module_structure(aff, vol):
    rep = module_report(aff, samples=20)
    assert rep.ok
    assert rep["module.left_order_control"].ok
    assert module_report(vol, samples=20).ok


def test_current_bracket_rule_needs_currents(vol):
    E = Observable.letter(vol.letters[0])
    cur = vol.currents
    for a in range(2):
        for b in range(2):
            assert not ext_d(current_bracket_defect(vol, E, cur[a], cur[b]))
    with pytest.raises(ValueError):
        current_bracket_defect(vol, E, vol.letters[0], cur[1])
    assert check_current_bracket_rule(vol, 30).ok


def test_commutation_sampled(dw):
    assert check_commutation(dw, 40).ok


def test_r4_invariants(r4):
    table = brst_h0(r4)
    assert table.h0_by_coeff_degree() == {0: 1, 1: 2, 2: 3, 3: 4}
    alg = ObservableAlgebra(r4)
    # q2, p2 generate the invariants modulo p1
    assert invariants_oracle(alg, (0, 2), r4.lmax) == 3


@pytest.mark.parametrize("name", ["symplectic_r4", "volume_r3", "dw2", "symplectic_aff"])
def test_h0_matches_invariants(name):
    assert check_brst(bundled(name)).ok


def test_boundary_rows_reported_without_h0(r4):
    edge = [r for r in brst_h0(r4).rows if r.boundary]
    assert edge and all(r.h0 is None and r.oracle is None for r in edge)
