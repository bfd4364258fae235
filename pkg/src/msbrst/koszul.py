"""The distribution W, the bigraded algebra K and the Koszul differential.

Elements of the bicomplex are sparse dicts keyed by ``(letters, ws, alphas)``:
sorted tuples of indices into the letter pool, the W generators and the dual
basis of g.  Letters commute up to their form-degree parity; W generators
have parity ``n`` (exterior for odd ``n``, symmetric for even ``n``), which
is the swap sign ``(-1)^(qp(n-1)^2 + rsn^2)`` of the graded product; alphas
are exterior.  Letters and W generators commute with each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, combinations_with_replacement

from . import linalg
from .exalg import PolyForm, ext_d, forms_basis, wedge
from .mstruct import (
    HamiltonianPair,
    MultisymplecticModel,
    Observable,
    bracket,
)
from .report import ValidationReport, check


class ModelError(ValueError):
    """The model does not fit the graded truncation scheme."""


Key = tuple  # (letters, ws, alphas)


def sort_with_sign(seq, odd) -> tuple[int, tuple]:
    """Insertion-sort ``seq``; swapping two odd entries flips the sign; repeated odd entries give 0."""
    w = list(seq)
    sign = 1
    for i in range(1, len(w)):
        j = i
        while j > 0 and w[j - 1] > w[j]:
            if odd(w[j - 1]) and odd(w[j]):
                sign = -sign
            w[j - 1], w[j] = w[j], w[j - 1]
            j -= 1
    for a, b in zip(w, w[1:]):
        if a == b and odd(a):
            return 0, ()
    return sign, tuple(w)


def add_into(acc: dict, key, c) -> None:
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def scale(x: dict, c) -> dict:
    return {k: c * v for k, v in x.items()} if c else {}


def combine(*parts: tuple) -> dict:
    acc: dict = {}
    for c, x in parts:
        for k, v in x.items():
            add_into(acc, k, c * v)
    return acc


@dataclass
class Truncation:
    dmax: int
    lmax: int


class ObservableAlgebra:
    """Free graded-commutative algebra on the model's letter pool, with currents and g-action."""

    def __init__(self, model: MultisymplecticModel):
        if not model.omega.is_constant():
            raise ModelError("the weight grading needs a constant-coefficient omega")
        self.model = model
        uniq = {p.F: p for p in model.letters}
        self.letters: list[HamiltonianPair] = sorted(uniq.values(), key=lambda p: p.sort_key)
        self.index = {p.F: i for i, p in enumerate(self.letters)}
        self.parity = [p.degree % 2 for p in self.letters]
        self.weights = []
        for p in self.letters:
            if not p.F.is_homogeneous():
                raise ModelError(f"letter {model.show(p.F)} is not homogeneous in the coordinates")
            w = (p.degree, p.F.max_coeff_degree())
            if w == (0, 0):
                raise ModelError(f"constant letter {model.show(p.F)}; the empty word already is the unit")
            self.weights.append(w)
        self.n = model.n
        self.g = model.dim_g
        self.C = model.lie.C if model.lie else ()
        self._words_cache: dict = {}
        self.delta_weights = []
        for a, cur in enumerate(model.currents):
            if not cur.F:
                self.delta_weights.append((model.n - 1, 1))
            elif not cur.F.is_homogeneous():
                raise ModelError(f"current {model.lie.labels[a]} is not homogeneous")
            else:
                self.delta_weights.append((model.n - 1, cur.F.max_coeff_degree()))
        for a in range(self.g):
            for b in range(self.g):
                for d in range(self.g):
                    if self.C[d][b][a] and self.delta_weights[b][1] + self.delta_weights[a][1] - 2 != self.delta_weights[d][1]:
                        raise ModelError("structure constants do not respect the coefficient grading")

    # -- words ---------------------------------------------------------------

    def odd_letter(self, i: int) -> bool:
        return bool(self.parity[i])

    def norm_letters(self, seq) -> tuple[int, tuple]:
        return sort_with_sign(seq, self.odd_letter)

    def norm_ws(self, seq) -> tuple[int, tuple]:
        if self.n % 2:
            return sort_with_sign(seq, lambda _: True)
        return 1, tuple(sorted(seq))

    @staticmethod
    def norm_alphas(seq) -> tuple[int, tuple]:
        return sort_with_sign(seq, lambda _: True)

    def word_weight(self, word) -> tuple[int, int]:
        return (sum(self.weights[i][0] for i in word), sum(self.weights[i][1] for i in word))

    def w_weight(self, a: int) -> tuple[int, int]:
        return self.delta_weights[a]

    def alpha_weight(self, a: int) -> tuple[int, int]:
        return (0, 2 - self.delta_weights[a][1])

    def key_weight(self, key: Key) -> tuple[int, int]:
        lw, ww, aw = key
        f, e = self.word_weight(lw)
        for a in ww:
            f += self.w_weight(a)[0]
            e += self.w_weight(a)[1]
        for a in aw:
            e += self.alpha_weight(a)[1]
        return (f, e)

    def words(self, max_len: int, emax: int) -> list[tuple]:
        """All normalized letter words with length <= max_len and coefficient degree <= emax."""
        ck = (max_len, emax)
        if ck in self._words_cache:
            return self._words_cache[ck]
        out = [()]

        def rec(start, word, e):
            if len(word) == max_len:
                return
            for i in range(start, len(self.letters)):
                if self.parity[i] and word and word[-1] == i:
                    continue
                e2 = e + self.weights[i][1]
                if e2 > emax:
                    continue
                nw = word + (i,)
                out.append(nw)
                rec(i, nw, e2)

        rec(0, (), 0)
        out.sort(key=lambda w: (len(w), w))
        self._words_cache[ck] = out
        return out

    def words_of_weight(self, weight, max_len: int) -> list[tuple]:
        return [w for w in self.words(max_len, weight[1]) if self.word_weight(w) == weight]

    def realize(self, word) -> PolyForm:
        f = PolyForm.const(self.model.dim)
        for i in word:
            f = wedge(f, self.letters[i].F)
        return f

    def realize_obs(self, obs: dict) -> PolyForm:
        acc = None
        for w, c in obs.items():
            t = c * self.realize(w)
            acc = t if acc is None else acc + t
        return acc if acc is not None else PolyForm(self.model.dim, 0)

    def express(self, form: PolyForm, max_len: int | None = None) -> dict:
        """Words whose realization equals ``form`` (modulo closed forms in positive degree)."""
        if not form:
            return {}
        if not form.is_homogeneous():
            raise ModelError(f"{self.model.show(form)} is not homogeneous")
        weight = (form.degree, form.max_coeff_degree())
        max_len = max_len or max(self.model.lmax, 2)
        cands = self.words_of_weight(weight, max_len)
        cols = [self.realize(w).terms for w in cands]
        if form.degree > 0:
            for b in forms_basis(self.model.dim, form.degree - 1, weight[1] + 1):
                db = ext_d(b)
                if db:
                    cols.append(db.terms)
        sol = linalg.solve(cols, form.terms)
        if sol is None:
            raise ModelError(f"{self.model.show(form)} is not a combination of letter words")
        return {cands[j]: c for j, c in sol.items() if j < len(cands)}

    def to_observable(self, obs: dict) -> Observable:
        return Observable(self.model.dim, {tuple(self.letters[i] for i in w): c for w, c in obs.items()})

    def from_observable(self, obs: Observable) -> dict:
        out: dict = {}
        for w, c in obs.terms.items():
            s, nw = self.norm_letters([self.index[p.F] for p in w])
            if s:
                add_into(out, nw, s * c)
        return out

    # -- currents and action ---------------------------------------------------

    @cached_property
    def deltas(self) -> list[dict]:
        return [self.express(cur.F) for cur in self.model.currents]

    @cached_property
    def rho_table(self) -> list[list[dict]]:
        """``rho[a][i]``: the letter ``i`` acted on by ``xi_a``, i.e. ``{letter, delta_a}`` as words."""
        table = []
        for a, cur in enumerate(self.model.currents):
            row = []
            for p in self.letters:
                row.append(self.express(bracket(self.model, p, cur)))
            table.append(row)
        return table

    def mul_words(self, u, v) -> tuple[int, tuple]:
        return self.norm_letters(u + v)


# ---------------------------------------------------------------------------
# the W distribution


@dataclass(frozen=True)
class WBasis:
    labels: tuple[str, ...]
    realizations: tuple[PolyForm, ...]
    n: int
    table: dict  # (a, b) -> {d: C^d_ab}


def build_w_basis(model: MultisymplecticModel) -> tuple[WBasis, ValidationReport]:
    rep = ValidationReport(model.name)
    lie = model.lie
    cur = model.currents
    real = tuple(ext_d(c.F) for c in cur)
    table = {}
    bad = None
    for a in range(lie.dim):
        for b in range(lie.dim):
            table[(a, b)] = lie.bracket_coeffs(a, b)
            geo = ext_d(bracket(model, cur[a], cur[b]))
            rhs = PolyForm(model.dim, model.n)
            for d, c in table[(a, b)].items():
                rhs = rhs + c * real[d]
            if geo - rhs and bad is None:
                bad = (a, b)
    rep.add(check("w.representation", bad is None, f"mismatch at ({bad[0]}, {bad[1]})" if bad else f"{lie.dim} generators of degree {model.n}"))
    from .action import check_lie_algebra

    rep.extend(check_lie_algebra(lie))
    return WBasis(lie.labels, real, model.n, table), rep


# ---------------------------------------------------------------------------
# products and differentials


def circ_product(alg: ObservableAlgebra, x: dict, y: dict) -> dict:
    out: dict = {}
    for (l1, w1, a1), c1 in x.items():
        for (l2, w2, a2), c2 in y.items():
            s1, l = alg.norm_letters(l1 + l2)
            if not s1:
                continue
            s2, w = alg.norm_ws(w1 + w2)
            if not s2:
                continue
            s3, a = alg.norm_alphas(a1 + a2)
            if s3:
                add_into(out, (l, w, a), s1 * s2 * s3 * c1 * c2)
    return out


def swap_sign(n: int, p: int, q: int, r: int, s: int) -> int:
    return (-1) ** (q * p * (n - 1) ** 2 + r * s * n * n)


def w_partial(alg: ObservableAlgebra, ws: tuple, d: int) -> dict:
    """Right derivative of a pure W word by ``w_d``: ``{word: coeff}``."""
    out: dict = {}
    for j, a in enumerate(ws):
        if a == d:
            add_into(out, ws[:j] + ws[j + 1:], (-1) ** (alg.n * j))
    return out


def koszul_d(alg: ObservableAlgebra, x: dict) -> dict:
    """Replace one W generator by its current, left-linearly over the letters."""
    out: dict = {}
    deltas = alg.deltas
    for (lw, ww, aw), c in x.items():
        for j, a in enumerate(ww):
            sj = (-1) ** (alg.n * j)
            rest = ww[:j] + ww[j + 1:]
            for dw, dc in deltas[a].items():
                s, nl = alg.norm_letters(lw + dw)
                if s:
                    add_into(out, (nl, rest, aw), sj * s * c * dc)
    return out


def rho(alg: ObservableAlgebra, x: dict, a: int) -> dict:
    """Right action of ``xi_a``: an even derivation on letters and W generators."""
    out: dict = {}
    table = alg.rho_table[a]
    C = alg.C
    for (lw, ww, aw), c in x.items():
        for i, li in enumerate(lw):
            for v, vc in table[li].items():
                s, nl = alg.norm_letters(lw[:i] + v + lw[i + 1:])
                if s:
                    add_into(out, (nl, ww, aw), s * c * vc)
        for j, b in enumerate(ww):
            for d in range(alg.g):
                k = C[d][b][a]
                if k:
                    s, nw = alg.norm_ws(ww[:j] + (d,) + ww[j + 1:])
                    if s:
                        add_into(out, (lw, nw, aw), s * c * k)
    return out


def check_w_derivation(alg: ObservableAlgebra, samples: list[tuple[tuple, tuple]]) -> ValidationReport:
    """Sign rule of the W derivative on products of pure W words, plus nilpotency of its extension."""
    rep = ValidationReport(alg.model.name)
    fails = 0
    for v, u in samples:
        sv, vu = alg.norm_ws(v + u)
        for d in range(alg.g):
            lhs = scale(w_partial(alg, vu, d), sv) if sv else {}
            rhs: dict = {}
            for k, c in w_partial(alg, v, d).items():
                s, m = alg.norm_ws(k + u)
                if s:
                    add_into(rhs, m, s * c)
            for k, c in w_partial(alg, u, d).items():
                s, m = alg.norm_ws(v + k)
                if s:
                    add_into(rhs, m, (-1) ** (len(v) * alg.n) * s * c)
            fails += lhs != rhs
    rep.add(check("koszul.derivation_sign", fails == 0, f"{len(samples)} products, {fails} mismatches"))
    odd = all(((n - 1) * (n - 2) - 1) % 2 == 1 for n in range(1, 17))
    rep.add(check("koszul.parity_fact", odd, "(n-1)(n-2)-1 odd for n = 1..16"))
    return rep


# ---------------------------------------------------------------------------
# graded pieces


def _w_words(alg: ObservableAlgebra, emax: int) -> list[tuple]:
    out = [()]
    g = alg.g
    r = 1
    while True:
        gen = combinations(range(g), r) if alg.n % 2 else combinations_with_replacement(range(g), r)
        found = False
        for w in gen:
            if sum(alg.w_weight(a)[1] for a in w) <= emax:
                out.append(w)
                found = True
        if not found or (alg.n % 2 and r >= g):
            break
        r += 1
    return out


def _alpha_words(alg: ObservableAlgebra) -> list[tuple]:
    return [w for r in range(alg.g + 1) for w in combinations(range(alg.g), r)]


@dataclass
class Piece:
    weight: tuple[int, int]
    basis: dict = field(default_factory=dict)  # bidegree (r, s) -> list of keys
    boundary: bool = False

    @property
    def label(self) -> str:
        return f"f{self.weight[0]}e{self.weight[1]}"

    def keys(self, r: int, s: int = 0) -> list:
        return self.basis.get((r, s), [])


def graded_pieces(alg: ObservableAlgebra, trunc: Truncation, with_alpha: bool) -> list[Piece]:
    """Split the truncated bicomplex by weight (form degree, coefficient degree).

    A piece is flagged boundary when its full (untruncated) complex holds a
    letter word longer than ``lmax``.
    """
    alphas = _alpha_words(alg) if with_alpha else [()]
    a_min = min(sum(alg.alpha_weight(a)[1] for a in aw) for aw in alphas)
    budget = trunc.dmax - min(a_min, 0)
    wws = _w_words(alg, budget)
    words = alg.words(trunc.lmax + 1, budget)
    pieces: dict = {}
    for aw in alphas:
        ea = sum(alg.alpha_weight(a)[1] for a in aw)
        for ww in wws:
            fw = sum(alg.w_weight(a)[0] for a in ww)
            ew = sum(alg.w_weight(a)[1] for a in ww) + ea
            for lw in words:
                f, e = alg.word_weight(lw)
                wt = (f + fw, e + ew)
                if wt[1] > trunc.dmax:
                    continue
                pc = pieces.get(wt)
                if pc is None:
                    pc = pieces[wt] = Piece(wt)
                if len(lw) > trunc.lmax:
                    pc.boundary = True
                    continue
                pc.basis.setdefault((len(ww), len(aw)), []).append((lw, ww, aw))
    return [pieces[w] for w in sorted(pieces, key=lambda w: (w[1], w[0]))]


# ---------------------------------------------------------------------------
# Koszul complex and homology


@dataclass
class ComplexAssembly:
    piece: Piece
    chains: dict  # r -> list of keys
    matrices: dict  # r -> list of sparse images of chains[r] under the differential
    zero_composites: bool


def assemble_koszul_complex(alg: ObservableAlgebra, piece: Piece) -> ComplexAssembly:
    chains = {r: piece.keys(r, 0) for (r, s) in piece.basis if s == 0}
    mats = {}
    zero = True
    for r, keys in chains.items():
        images = []
        for k in keys:
            img = koszul_d(alg, {k: Fraction(1)})
            images.append(img)
            if koszul_d(alg, img):
                zero = False
        mats[r] = images
    return ComplexAssembly(piece, chains, mats, zero)


@dataclass
class DimensionRow:
    piece: str
    weight: tuple[int, int]
    degree: int
    dim: int
    rank: int
    homology: int | None
    boundary: bool
    oracle: int | None = None

    def record(self) -> dict:
        rec = {
            "record": "homology",
            "piece": self.piece,
            "form_degree": self.weight[0],
            "coeff_degree": self.weight[1],
            "degree": self.degree,
            "dim": self.dim,
            "rank": self.rank,
            "homology": self.homology,
            "boundary": self.boundary,
        }
        if self.oracle is not None:
            rec["oracle"] = self.oracle
        return rec


@dataclass
class DimensionTable:
    title: str
    rows: list[DimensionRow]

    def records(self) -> list[dict]:
        return [r.record() for r in self.rows]

    def interior(self) -> list[DimensionRow]:
        return [r for r in self.rows if not r.boundary]

    def h0_by_coeff_degree(self, form_degree: int = 0) -> dict[int, int]:
        return {r.weight[1]: r.homology for r in self.rows if r.degree == 0 and r.weight[0] == form_degree and not r.boundary}


def ideal_span(alg: ObservableAlgebra, weight, lmax: int) -> linalg.Echelon:
    """Span of ``word ^ delta_a`` inside the given weight, built with observable products."""
    ech = linalg.Echelon()
    for a, delta in enumerate(alg.deltas):
        if not delta:
            continue
        dw = alg.w_weight(a)
        target = (weight[0] - dw[0], weight[1] - dw[1])
        if target[1] < 0 or target[0] < 0:
            continue
        dobs = alg.to_observable(delta)
        for w in alg.words_of_weight(target, lmax):
            prod = alg.to_observable({w: 1}).wedge(dobs)
            vec = alg.from_observable(prod)
            if vec:
                ech.add(vec)
    return ech


def quotient_oracle(alg: ObservableAlgebra, weight, lmax: int) -> int:
    """Dimension of letter words of a weight modulo the span of current multiples."""
    return len(alg.words_of_weight(weight, lmax)) - ideal_span(alg, weight, lmax).rank


def homology_dims(chains: dict, images: dict) -> dict:
    """``{degree: (dim, rank of outgoing map, homology)}`` for a chain complex lowering degree."""
    ranks = {r: linalg.rank(images[r]) for r in chains}
    out = {}
    for r in sorted(chains):
        dim = len(chains[r])
        out[r] = (dim, ranks[r], dim - ranks[r] - ranks.get(r + 1, 0))
    return out


def koszul_homology(model: MultisymplecticModel, trunc: Truncation | None = None, alg: ObservableAlgebra | None = None) -> DimensionTable:
    trunc = trunc or Truncation(model.dmax, model.lmax)
    alg = alg or ObservableAlgebra(model)
    rows = []
    for pc in graded_pieces(alg, trunc, with_alpha=False):
        asm = assemble_koszul_complex(alg, pc)
        for r, (dim, rk, h) in homology_dims(asm.chains, asm.matrices).items():
            if pc.boundary:
                rows.append(DimensionRow(pc.label, pc.weight, r, dim, rk, None, True))
                continue
            oracle = quotient_oracle(alg, pc.weight, trunc.lmax) if r == 0 else None
            rows.append(DimensionRow(pc.label, pc.weight, r, dim, rk, h, pc.boundary, oracle))
    return DimensionTable(f"koszul homology of {model.name}", rows)


def check_koszul(model: MultisymplecticModel, trunc: Truncation | None = None) -> ValidationReport:
    """Nilpotency on every basis element, vanishing of higher homology and the H^0 oracle."""
    trunc = trunc or Truncation(model.dmax, model.lmax)
    alg = ObservableAlgebra(model)
    rep = ValidationReport(model.name)
    if model.lie is not None:
        _, wrep = build_w_basis(model)
        rep.extend(wrep)
    dead = [model.lie.labels[a] for a, d in enumerate(alg.deltas) if not d]
    if dead:
        rep.add(check("koszul.hypotheses", False, f"current of {', '.join(dead)} vanishes, so the currents are not a regular sequence"))
    nil_ok = True
    count = 0
    for pc in graded_pieces(alg, trunc, with_alpha=False):
        asm = assemble_koszul_complex(alg, pc)
        count += sum(len(v) for v in asm.chains.values())
        nil_ok &= asm.zero_composites
    rep.add(check("koszul.nilpotent", nil_ok, f"{count} basis elements"))
    table = koszul_homology(model, trunc, alg)
    inner = table.interior()
    higher = [r for r in inner if r.degree > 0 and r.homology]
    rep.add(check("koszul.higher_vanish", not higher, f"nonzero at {higher[0].piece} degree {higher[0].degree}" if higher else f"{len(inner)} interior rows"))
    mism = [r for r in inner if r.degree == 0 and r.homology != r.oracle]
    rep.add(check("koszul.h0_oracle", not mism, f"{mism[0].piece}: {mism[0].homology} vs {mism[0].oracle}" if mism else ""))
    return rep
