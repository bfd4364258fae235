from dataclasses import replace
from fractions import Fraction

from conftest import XYZ, bundled, form, vec
from msbrst.action import (
    LieAlgebraSpec,
    check_action,
    check_lie_algebra,
    classify_closed,
    cocycle,
    noether_current,
)
from msbrst.exalg import contract, ext_d
from msbrst.modelfile import loads
from msbrst.mstruct import field_bracket

SO3 = LieAlgebraSpec.from_triples("abc", {(2, 0, 1): 1, (0, 1, 2): 1, (1, 2, 0): 1})


def test_lie_algebra_checks():
    assert check_lie_algebra(LieAlgebraSpec.abelian("ab")).ok
    assert check_lie_algebra(SO3).ok
    assert not SO3.is_abelian()
    assert SO3.bracket_coeffs(0, 1) == {2: Fraction(1)}
    assert SO3.bracket_coeffs(1, 0) == {2: Fraction(-1)}


def test_broken_structure_constants():
    # explicit (a, c, b) entry with the wrong sign
    bad = LieAlgebraSpec.from_triples("ab", {(0, 0, 1): 1, (0, 1, 0): 1})
    assert not check_lie_algebra(bad)["lie.antisymmetry"].ok
    # [a,b] = a, [b,c] = a, [c,a] = b fails Jacobi
    nj = LieAlgebraSpec.from_triples("abc", {(0, 0, 1): 1, (0, 1, 2): 1, (1, 2, 0): 1})
    rep = check_lie_algebra(nj)
    assert rep["lie.antisymmetry"].ok and not rep["lie.jacobi"].ok


def test_translation_currents_on_volume(vol):
    # i_{d/dx} dx^dy^dz = dy^dz, current is the homotopy primitive
    assert noether_current(vol, 0).F == form("1/2*y dz - 1/2*z dy")
    assert noether_current(vol, 1).F == form("1/2*z dx - 1/2*x dz")
    for a in range(2):
        J = noether_current(vol, a)
        assert ext_d(J.F) == contract(J.X, vol.omega)


def test_symplectic_translation_current(r2):
    J = noether_current(r2, 0)
    assert J.degree == 0 and ext_d(J.F)


def test_shift_current_on_dw(dw):
    names = dw.coords
    J = noether_current(dw, 0).F
    diff = J - form("p0 dx1 - p1 dx0", names)
    assert not ext_d(diff)


def test_volume_cocycle_is_exact(vol):
    cc = cocycle(vol, 0, 1)
    assert cc.kind == "exact"
    assert cc.form == form("dz")
    assert ext_d(cc.primitive) == cc.form
    rep = check_action(vol)
    assert rep.ok
    assert rep["cocycle.tx.ty"].detail == "exact dz = d(z)"


def test_symplectic_cocycle_is_constant(r4):
    rep = check_action(r4)
    assert rep.ok
    kinds = {c.detail.split()[0] for c in rep.checks if c.name.startswith("cocycle.")}
    assert kinds <= {"zero", "constant"}


def test_classify_closed():
    assert classify_closed(form("0")).kind == "zero"
    assert classify_closed(form("3")).kind == "constant"
    cc = classify_closed(form("dx^dy"))
    assert cc.kind == "exact" and ext_d(cc.primitive) == form("dx^dy")


def test_affine_action_is_a_homomorphism(aff):
    rep = check_action(aff)
    assert rep.ok, rep.checks
    assert field_bracket(aff.action[0], aff.action[1])


def test_non_invariant_field_is_reported(vol):
    model = replace(vol, action=(vec("x d/dx"), vol.action[1]))
    rep = check_action(model)
    c = rep["action.preserves_omega.tx"]
    assert not c.ok and "dx^dy^dz" in c.detail.replace(" ", "")


def test_wrong_structure_constants_break_homomorphism(vol):
    lie = LieAlgebraSpec.from_triples(("tx", "ty"), {(0, 0, 1): 1})
    rep = check_action(replace(vol, lie=lie))
    assert not rep["action.homomorphism.tx.ty"].ok


def test_missing_action():
    text = "[space]\nN = 2\nn = 1\ncoords = q p\n[omega]\ndq^dp\n[generators]\nq\np\n"
    m = loads(text, "bare")
    assert not check_action(m)["action.present"].ok
