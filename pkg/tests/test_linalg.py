from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from msbrst import linalg


def test_rank_and_kernel():
    rows = [{0: 1, 1: 2}, {0: 2, 1: 4}, {2: 1}]
    assert linalg.rank(rows) == 2
    ker = linalg.kernel(rows)
    assert ker == [{0: -2, 1: 1}]


def test_solve_prefers_earlier_columns():
    cols = [{0: 1}, {0: 1}, {1: 1}]
    assert linalg.solve(cols, {0: 3, 1: -1}) == {0: 3, 2: -1}
    assert linalg.solve(cols, {5: 1}) is None


def test_echelon_tracks_combination():
    ech = linalg.Echelon()
    ech.add({0: 1, 1: 1}, tag="a")
    ech.add({1: 1}, tag="b")
    resid, combo = ech.reduce({0: 2, 1: 5}, track=True)
    assert resid == {}
    assert combo == {"a": 2, "b": 3}


mats = st.lists(
    st.dictionaries(st.integers(0, 4), st.fractions(-5, 5, max_denominator=4).filter(bool), max_size=4),
    max_size=6,
)


@given(mats)
def test_rank_nullity(rows):
    # rank of the images plus kernel dimension equals the number of columns
    assert linalg.rank(rows) + len(linalg.kernel(rows)) == len(rows)


@given(mats)
def test_kernel_vectors_are_in_the_kernel(rows):
    for k in linalg.kernel(rows):
        acc = {}
        for j, c in k.items():
            linalg.axpy(acc, c, rows[j])
        assert not any(acc.values())
