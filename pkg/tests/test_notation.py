import pytest
from hypothesis import given

from conftest import XYZ
from msbrst.notation import ParseError, parse, render
from strategies import forms, vectors


@pytest.mark.parametrize(
    "text, canon",
    [
        ("y dz*1/2 - 1/2*z dy", None),
        ("1/2*y dz - 1/2*z dy", "-1/2*z dy + 1/2*y dz"),
        ("dz^dx", "-dx^dz"),
        ("x^2*y + 3", "3 + x^2*y"),
        ("0", "0"),
    ],
)
def test_canonical_rendering(text, canon):
    if canon is None:
        with pytest.raises(ParseError):
            parse(text, XYZ)
        return
    assert render(parse(text, XYZ), XYZ) == canon


def test_error_columns():
    with pytest.raises(ParseError) as e:
        parse("x dy + dw", XYZ)
    assert e.value.col is not None and e.value.col >= 7
    with pytest.raises(ParseError):
        parse("x dy + dx^dy", XYZ)


@given(forms())
def test_roundtrip_forms(a):
    assert parse(render(a, XYZ), XYZ) == a


@given(vectors())
def test_roundtrip_vectors(X):
    assert parse(render(X, XYZ), XYZ, "vector") == X
