"""Exact sparse linear algebra over the rationals.

Vectors are plain ``dict`` objects mapping a hashable column key to a
nonzero :class:`fractions.Fraction`.  Column keys must be mutually
comparable; the ordering of keys decides which columns become pivots,
so callers that need a canonical answer sort their keys on purpose.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, Mapping

Vector = dict


def axpy(y: dict, a: Fraction, x: Mapping) -> None:
    """In place ``y += a * x`` dropping zeros."""
    if not a:
        return
    for k, v in x.items():
        s = y.get(k, 0) + a * v
        if s:
            y[k] = s
        else:
            y.pop(k, None)


class Echelon:
    """Incrementally built echelon basis of a subspace.

    Each stored row has a pivot (its smallest key) with coefficient 1 and
    remembers how it was obtained as a combination of the tagged vectors
    that were inserted.  That bookkeeping makes the same object serve as
    rank counter, quotient normal form, linear solver and kernel finder.
    """

    def __init__(self) -> None:
        self.rows: dict[Hashable, tuple[dict, dict]] = {}

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Mapping, track: bool = False) -> tuple[dict, dict]:
        """Return ``(residual, combo)`` with ``vec = residual + sum combo[t] * inserted[t]``.

        The residual vanishes on every pivot column and is therefore the
        unique normal form of ``vec`` modulo the span.
        """
        v = dict(vec)
        combo: dict = {}
        if not self.rows:
            return v, combo
        while True:
            hits = [k for k in v if k in self.rows]
            if not hits:
                return v, combo
            k = min(hits)
            c = v[k]
            row, rcombo = self.rows[k]
            axpy(v, -c, row)
            if track:
                axpy(combo, c, rcombo)

    def add(self, vec: Mapping, tag: Hashable | None = None) -> tuple[bool, dict]:
        """Insert ``vec``; return ``(independent, combo)``.

        When the vector is dependent on what is already stored, ``combo``
        expresses it through earlier tags.
        """
        track = tag is not None
        v, combo = self.reduce(vec, track=track)
        if not v:
            return False, combo
        p = min(v)
        inv = 1 / Fraction(v[p])
        row = {k: x * inv for k, x in v.items()}
        rc: dict = {}
        if track:
            rc = {t: -x * inv for t, x in combo.items()}
            rc[tag] = rc.get(tag, 0) + inv
            rc = {t: x for t, x in rc.items() if x}
        self.rows[p] = (row, rc)
        return True, combo

    def contains(self, vec: Mapping) -> bool:
        return not self.reduce(vec)[0]


def rank(vectors: Iterable[Mapping]) -> int:
    e = Echelon()
    for v in vectors:
        e.add(v)
    return e.rank


def kernel(images: list[Mapping]) -> list[dict]:
    """Basis of ``{c : sum_i c_i images[i] = 0}`` as sparse dicts over indices."""
    e = Echelon()
    basis = []
    for i, img in enumerate(images):
        indep, combo = e.add(img, tag=i)
        if not indep:
            k = {t: -x for t, x in combo.items()}
            k[i] = Fraction(1)
            basis.append(k)
    return basis


def solve(columns: list[Mapping], rhs: Mapping) -> dict | None:
    """Solve ``sum_j x_j columns[j] = rhs``.

    Columns are considered in list order; a column is a pivot if it is
    independent of the ones before it and free variables are zero.  The
    result is a sparse dict ``j -> x_j`` or ``None`` if inconsistent.
    """
    e = Echelon()
    for j, col in enumerate(columns):
        e.add(col, tag=j)
    resid, combo = e.reduce(rhs, track=True)
    if resid:
        return None
    return combo
