"""Polynomial differential forms and multivector fields on a coordinate patch.

Both kinds of object are sparse sums ``c * x^e * b_I`` where ``b_I`` is
``dx_{i1}^...^dx_{ik}`` for forms and ``d/dx_{i1}^...^d/dx_{ik}`` for
multivectors, ``I`` strictly increasing, ``c`` an exact rational.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = [
    "PolyForm",
    "PolyMultivector",
    "NotClosed",
    "wedge",
    "ext_d",
    "contract",
    "contract_vector",
    "lie_derivative",
    "vf_bracket",
    "poincare_primitive",
    "monomials",
    "glex_key",
]


class NotClosed(ValueError):
    """Raised when an operation needs a closed form and did not get one."""


def sort_sign(seq: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the permutation sorting ``seq``; 0 if an index repeats."""
    s = list(seq)
    if len(set(s)) != len(s):
        return 0, ()
    sign = 1
    # insertion sort counting transpositions; sequences here are short
    for i in range(1, len(s)):
        j = i
        while j > 0 and s[j - 1] > s[j]:
            s[j - 1], s[j] = s[j], s[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(s)


def glex_key(exps: tuple[int, ...]) -> tuple:
    return (sum(exps), tuple(-e for e in exps))


def monomials(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree ``degree`` in graded-lex order."""
    if nvars == 0:
        return [()] if degree == 0 else []
    out = []

    def rec(prefix, left, k):
        if k == nvars - 1:
            out.append(tuple(prefix + [left]))
            return
        for e in range(left, -1, -1):
            rec(prefix + [e], left - e, k + 1)

    rec([], degree, 0)
    return out


class _Sparse:
    """Shared canonical-form machinery for forms and multivectors."""

    __slots__ = ("dim", "degree", "terms", "_key")
    basis_prefix = "d"

    def __init__(self, dim: int, degree: int, terms: Mapping | None = None):
        if degree < 0:
            raise ValueError(f"negative degree {degree}")
        self.dim = dim
        self.degree = degree
        clean = {}
        for (idx, exps), c in (terms or {}).items():
            if not c:
                continue
            if len(idx) != degree or len(exps) != dim:
                raise ValueError(f"malformed term {(idx, exps)}")
            if any(a >= b for a, b in zip(idx, idx[1:])) or any(not 0 <= i < dim for i in idx):
                raise ValueError(f"index tuple {idx} not strictly increasing")
            clean[(tuple(idx), tuple(exps))] = Fraction(c)
        self.terms = clean
        self._key = None

    # construction helpers -------------------------------------------------
    @classmethod
    def zero(cls, dim: int, degree: int):
        return cls(dim, degree)

    @classmethod
    def basis(cls, dim: int, idx: Sequence[int], coeff=1, exps=None):
        """``coeff * x^exps * b_idx`` with any ordering of ``idx``."""
        sign, s = sort_sign(idx)
        exps = tuple(exps) if exps is not None else (0,) * dim
        if sign == 0:
            return cls(dim, len(idx))
        return cls(dim, len(idx), {(s, exps): sign * Fraction(coeff)})

    @classmethod
    def const(cls, dim: int, c=1):
        return cls(dim, 0, {((), (0,) * dim): Fraction(c)})

    @classmethod
    def coord(cls, dim: int, i: int):
        e = [0] * dim
        e[i] = 1
        return cls(dim, 0, {((), tuple(e)): Fraction(1)})

    def _new(self, degree, terms):
        return type(self)(self.dim, degree, terms)

    # arithmetic -----------------------------------------------------------
    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch {self.dim} vs {other.dim}")
        if other.degree != self.degree and other.terms and self.terms:
            raise ValueError(f"degree mismatch {self.degree} vs {other.degree}")

    def __add__(self, other):
        self._check(other)
        if not self.terms:
            return other
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return self._new(self.degree, t)

    def __neg__(self):
        return self._new(self.degree, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        """Scale by a rational or multiply coefficients by a polynomial (0-form)."""
        if isinstance(c, PolyForm):
            if c.degree != 0:
                raise ValueError("coefficient multiplication needs a 0-form")
            if c.dim != self.dim:
                raise ValueError("dimension mismatch")
            t: dict = {}
            for (_, e), a in c.terms.items():
                for (idx, f), b in self.terms.items():
                    k = (idx, tuple(x + y for x, y in zip(e, f)))
                    t[k] = t.get(k, 0) + a * b
            return self._new(self.degree, t)
        c = Fraction(c)
        return self._new(self.degree, {k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def _canon(self):
        if self._key is None:
            self._key = tuple(sorted(self.terms.items(), key=lambda kv: (kv[0][0], glex_key(kv[0][1]))))
        return self._key

    def __eq__(self, other):
        if not isinstance(other, _Sparse):
            if other == 0:
                return not self.terms
            return NotImplemented
        if type(other) is not type(self) or other.dim != self.dim:
            return False
        if not self.terms and not other.terms:
            return True
        return self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((type(self).__name__, self.dim, self.degree if self.terms else -1, self._canon()))

    # inspection -------------------------------------------------------------
    def coeff_degrees(self) -> set[int]:
        return {sum(e) for (_, e) in self.terms}

    def max_coeff_degree(self) -> int:
        return max(self.coeff_degrees(), default=0)

    def is_homogeneous(self) -> bool:
        return len(self.coeff_degrees()) <= 1

    def is_constant(self) -> bool:
        return self.coeff_degrees() <= {0}

    def diff_coeffs(self, i: int):
        """Partial derivative of every coefficient along coordinate ``i``."""
        t = {}
        for (idx, e), c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                t[(idx, tuple(f))] = c * e[i]
        return self._new(self.degree, t)

    def evaluate(self, point: Sequence) -> dict:
        """Constant coefficients at a rational point, keyed by index tuple."""
        out: dict = {}
        for (idx, e), c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= Fraction(x) ** k
            out[idx] = out.get(idx, 0) + v
        return {k: v for k, v in out.items() if v}

    def homogeneous_part(self, d: int):
        return self._new(self.degree, {k: v for k, v in self.terms.items() if sum(k[1]) == d})

    def render(self, names: Sequence[str] | None = None) -> str:
        from .notation import render

        return render(self, names)

    def __repr__(self):
        return f"{type(self).__name__}({self.render()!r})"


class PolyForm(_Sparse):
    """Differential form with polynomial coefficients."""

    __slots__ = ()


class PolyMultivector(_Sparse):
    """Multivector field with polynomial coefficients."""

    __slots__ = ()
    basis_prefix = "d/d"

    def as_vector(self) -> list[PolyForm]:
        if self.degree != 1:
            raise ValueError("not a vector field")
        comps = [PolyForm.zero(self.dim, 0) for _ in range(self.dim)]
        for ((i,), e), c in self.terms.items():
            comps[i] = comps[i] + PolyForm(self.dim, 0, {((), e): c})
        return comps

    @classmethod
    def from_components(cls, comps: Sequence[PolyForm]):
        dim = len(comps)
        t = {}
        for i, f in enumerate(comps):
            for (_, e), c in f.terms.items():
                t[((i,), e)] = c
        return cls(dim, 1, t)


def _add_monos(e, f):
    return tuple(a + b for a, b in zip(e, f))


def wedge(a: PolyForm, b: PolyForm) -> PolyForm:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch {a.dim} vs {b.dim}")
    deg = a.degree + b.degree
    t: dict = {}
    for (I, e), c in a.terms.items():
        for (J, f), d in b.terms.items():
            sign, K = sort_sign(I + J)
            if not sign:
                continue
            k = (K, _add_monos(e, f))
            t[k] = t.get(k, 0) + sign * c * d
    return PolyForm(a.dim, deg, t)


def ext_d(a: PolyForm) -> PolyForm:
    t: dict = {}
    for (I, e), c in a.terms.items():
        for i, k in enumerate(e):
            if not k or i in I:
                continue
            sign, K = sort_sign((i,) + I)
            f = list(e)
            f[i] -= 1
            key = (K, tuple(f))
            t[key] = t.get(key, 0) + sign * c * k
    return PolyForm(a.dim, a.degree + 1, t)


def _hook_index(j: int, I: tuple[int, ...]):
    """``i_{d/dx_j}`` of the basis form ``dx_I``: (sign, remaining) or None."""
    for m, i in enumerate(I):
        if i == j:
            return (-1) ** m, I[:m] + I[m + 1:]
        if i > j:
            return None
    return None


def contract_vector(X: PolyMultivector, a: PolyForm) -> PolyForm:
    """Interior product of a vector field into a form."""
    if X.degree != 1:
        raise ValueError("contract_vector needs a vector field")
    return contract(X, a)


def contract(X: PolyMultivector, a: PolyForm) -> PolyForm:
    """Interior product; ``d/dx_{j1}^...^d/dx_{jk}`` hooks ``j1`` first, then ``j2``..."""
    if X.dim != a.dim:
        raise ValueError(f"dimension mismatch {X.dim} vs {a.dim}")
    if X.degree > a.degree:
        raise ValueError(f"multivector degree {X.degree} exceeds form degree {a.degree}")
    t: dict = {}
    for (J, g), c in X.terms.items():
        for (I, e), d in a.terms.items():
            sign = 1
            rest = I
            for j in J:
                hit = _hook_index(j, rest)
                if hit is None:
                    break
                s, rest = hit
                sign *= s
            else:
                k = (rest, _add_monos(g, e))
                t[k] = t.get(k, 0) + sign * c * d
    return PolyForm(a.dim, a.degree - X.degree, t)


def lie_derivative(X: PolyMultivector, a: PolyForm) -> PolyForm:
    if X.degree != 1:
        raise ValueError(f"Lie derivative needs a vector field, got degree {X.degree}")
    left = ext_d(contract(X, a)) if a.degree >= 1 else PolyForm.zero(a.dim, a.degree)
    right = contract(X, ext_d(a))
    return left + right


def vf_bracket(X: PolyMultivector, Y: PolyMultivector) -> PolyMultivector:
    """Jacobi-Lie bracket ``[X, Y] = XY - YX`` of vector fields."""
    xs, ys = X.as_vector(), Y.as_vector()
    n = X.dim
    out = []
    for i in range(n):
        acc = PolyForm.zero(n, 0)
        for j in range(n):
            if xs[j]:
                acc = acc + ys[i].diff_coeffs(j) * xs[j]
            if ys[j]:
                acc = acc - xs[i].diff_coeffs(j) * ys[j]
        out.append(acc)
    return PolyMultivector.from_components(out)


def poincare_primitive(a: PolyForm) -> PolyForm:
    """Radial homotopy primitive of a closed form of degree >= 1.

    For ``x^e dx_I`` of form degree k the homotopy integral contributes
    the factor ``1 / (|e| + k)``.
    """
    if a.degree < 1:
        raise ValueError("primitive needs form degree >= 1")
    if ext_d(a):
        raise NotClosed(f"form is not closed: d(a) = {ext_d(a).render()}")
    k = a.degree
    t: dict = {}
    for (I, e), c in a.terms.items():
        w = c / (sum(e) + k)
        for m, i in enumerate(I):
            f = list(e)
            f[i] += 1
            key = (I[:m] + I[m + 1:], tuple(f))
            t[key] = t.get(key, 0) + (-1) ** m * w
    return PolyForm(a.dim, k - 1, t)


def forms_basis(dim: int, degree: int, coeff_degree: int) -> list[PolyForm]:
    """Monomial basis of forms with given form degree and coefficient degree."""
    from itertools import combinations

    out = []
    for I in combinations(range(dim), degree):
        for e in monomials(dim, coeff_degree):
            out.append(PolyForm(dim, degree, {(I, e): 1}))
    return out


def sum_forms(items: Iterable[PolyForm], dim: int, degree: int) -> PolyForm:
    acc = PolyForm.zero(dim, degree)
    for f in items:
        acc = acc + f
    return acc
