"""Lie algebra data, action vector fields, Noether currents and the cocycle."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .exalg import (
    NotClosed,
    PolyForm,
    PolyMultivector,
    contract,
    ext_d,
    lie_derivative,
    poincare_primitive,
)
from .mstruct import (
    HamiltonianPair,
    MultisymplecticModel,
    bracket,
    field_bracket,
)
from .report import ValidationReport, check


@dataclass(frozen=True)
class LieAlgebraSpec:
    """Structure constants ``C[a][b][c]`` meaning ``C^a_{bc}``."""

    labels: tuple[str, ...]
    C: tuple[tuple[tuple[Fraction, ...], ...], ...]

    @property
    def dim(self) -> int:
        return len(self.labels)

    @classmethod
    def from_triples(cls, labels, triples: dict) -> "LieAlgebraSpec":
        """Build from ``{(a, b, c): value}``; the (a, c, b) entry is filled by antisymmetry
        unless given explicitly."""
        k = len(labels)
        C = [[[Fraction(0)] * k for _ in range(k)] for _ in range(k)]
        for (a, b, c), v in triples.items():
            C[a][b][c] = Fraction(v)
            if (a, c, b) not in triples:
                C[a][c][b] = -Fraction(v)
        return cls(tuple(labels), tuple(tuple(tuple(r) for r in m) for m in C))

    @classmethod
    def abelian(cls, labels) -> "LieAlgebraSpec":
        return cls.from_triples(labels, {})

    def is_abelian(self) -> bool:
        return not any(v for m in self.C for r in m for v in r)

    def bracket_coeffs(self, b: int, c: int) -> dict[int, Fraction]:
        return {a: self.C[a][b][c] for a in range(self.dim) if self.C[a][b][c]}


def check_lie_algebra(spec: LieAlgebraSpec) -> ValidationReport:
    rep = ValidationReport("lie_algebra")
    k = spec.dim
    bad = [(a, b, c) for a, b, c in product(range(k), repeat=3) if spec.C[a][b][c] != -spec.C[a][c][b]]
    rep.add(check("lie.antisymmetry", not bad, f"C^{bad[0][0]}_{bad[0][1]}{bad[0][2]} breaks it" if bad else f"dim {k}"))
    jac = None
    for a, b, f, e in product(range(k), repeat=4):
        # C^d_{ab} C^e_{df} + C^d_{bf} C^e_{da} + C^d_{fa} C^e_{db}
        s = sum(spec.C[d][a][b] * spec.C[e][d][f] + spec.C[d][b][f] * spec.C[e][d][a] + spec.C[d][f][a] * spec.C[e][d][b] for d in range(k))
        if s:
            jac = (a, b, f, e, s)
            break
    rep.add(check("lie.jacobi", jac is None, f"cyclic sum on ({jac[0]},{jac[1]},{jac[2]}) component {jac[3]} is {jac[4]}" if jac else ""))
    return rep


def noether_current(model: MultisymplecticModel, a: int) -> HamiltonianPair:
    xi = model.action[a]
    hooked = contract(xi, model.omega)
    if ext_d(hooked):
        raise NotClosed(f"action field {model.lie.labels[a]} does not preserve omega")
    return HamiltonianPair(poincare_primitive(hooked), xi, "action")


def combine_fields(model: MultisymplecticModel, coeffs: dict[int, Fraction]) -> PolyMultivector:
    acc = PolyMultivector(model.dim, 1)
    for d, c in coeffs.items():
        acc = acc + c * model.action[d]
    return acc


def combine_currents(model: MultisymplecticModel, coeffs: dict[int, Fraction]) -> PolyForm:
    acc = PolyForm(model.dim, model.n - 1)
    for d, c in coeffs.items():
        acc = acc + c * model.currents[d].F
    return acc


@dataclass(frozen=True)
class Cocycle:
    form: PolyForm
    kind: str  # "zero", "constant", "exact"
    primitive: PolyForm | None = None


def classify_closed(form: PolyForm) -> Cocycle:
    """On R^N every closed form of positive degree is exact."""
    if not form:
        return Cocycle(form, "zero")
    if ext_d(form):
        raise NotClosed("cocycle is not closed")
    if form.degree == 0:
        return Cocycle(form, "constant")
    return Cocycle(form, "exact", poincare_primitive(form))


def cocycle(model: MultisymplecticModel, b: int, c: int) -> Cocycle:
    """``c(xi_b, xi_c) = {delta_b, delta_c} - delta([xi_b, xi_c])``."""
    cur = model.currents
    br = bracket(model, cur[b], cur[c])
    val = br - combine_currents(model, model.lie.bracket_coeffs(b, c))
    return classify_closed(val)


def check_action(model: MultisymplecticModel) -> ValidationReport:
    rep = ValidationReport(model.name)
    lie = model.lie
    if lie is None or not model.action:
        rep.add(check("action.present", False, "model has no Lie algebra action"))
        return rep
    rep.add(check("action.count", len(model.action) == lie.dim, f"{len(model.action)} fields for dim g = {lie.dim}"))
    if len(model.action) != lie.dim:
        return rep
    rep.extend(check_lie_algebra(lie))
    invariant = True
    for a, xi in enumerate(model.action):
        L = lie_derivative(xi, model.omega)
        rep.add(check(f"action.preserves_omega.{lie.labels[a]}", not L, "" if not L else f"L_xi omega = {model.show(L)}"))
        invariant &= not L
    for b in range(lie.dim):
        for c in range(b + 1, lie.dim):
            lhs = field_bracket(model.action[b], model.action[c])
            rhs = combine_fields(model, lie.bracket_coeffs(b, c))
            diff = lhs - rhs
            name = f"action.homomorphism.{lie.labels[b]}.{lie.labels[c]}"
            rep.add(check(name, not diff, "" if not diff else f"bracket minus C xi = {model.show(diff)}"))
    if not invariant:
        return rep
    for b in range(lie.dim):
        for c in range(b + 1, lie.dim):
            name = f"cocycle.{lie.labels[b]}.{lie.labels[c]}"
            try:
                cc = cocycle(model, b, c)
            except NotClosed as e:
                rep.add(check(name, False, str(e)))
                continue
            detail = cc.kind
            if cc.kind != "zero":
                detail += f" {model.show(cc.form)}"
            if cc.primitive is not None:
                detail += f" = d({model.show(cc.primitive)})"
            rep.add(check(name, True, detail))
    return rep
