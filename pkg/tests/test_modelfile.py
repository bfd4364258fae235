import pytest

from msbrst.modelfile import (
    ModelFileError,
    ModelValidationError,
    bundled_names,
    bundled_text,
    load_model,
    loads,
)

HEAD = "[space]\nN = 2\nn = 1\ncoords = q p\n"


def test_bundled_models_load():
    names = bundled_names()
    for name in ["symplectic_r2", "symplectic_r4", "volume_r3", "dw2"]:
        assert name in names
    for name in names:
        m = load_model(name)
        assert m.name == name and m.omega.degree == m.n + 1


def test_volume_variants():
    for name, g in [("volume_r3_t1", 1), ("volume_r3", 2), ("volume_r3_t3", 3)]:
        m = load_model(name)
        assert m.n == 2 and m.dim_g == g


def test_model_file_path(tmp_path):
    p = tmp_path / "mine.model"
    p.write_text(bundled_text("symplectic_r2"))
    m = load_model(str(p))
    assert m.dim == 2 and m.lie.labels == ("rot",)


def test_parse_error_position():
    with pytest.raises(ModelFileError) as e:
        loads(HEAD + "[omega]\ndq^^dp\n", source="bad.model")
    assert (e.value.line, e.value.col) == (6, 4)
    assert str(e.value).startswith("bad.model:6:4:")


def test_non_closed_omega_names_check():
    text = "[space]\nN = 3\nn = 1\ncoords = x y z\n[omega]\nx dy^dz\n"
    with pytest.raises(ModelValidationError) as e:
        loads(text)
    assert e.value.check_name == "omega.closed"
    assert loads(text, check=False).omega.degree == 2


def test_wrong_degree_omega():
    with pytest.raises(ModelFileError):
        loads(HEAD + "[omega]\nq dq\n")


def test_missing_section():
    with pytest.raises(ModelFileError):
        loads(HEAD)


def test_non_invariant_action_rejected():
    text = HEAD + "[omega]\ndq^dp\n[liealgebra]\ndim = 1\nlabels = t\n[action]\nt = q d/dq\n"
    with pytest.raises(ModelValidationError) as e:
        loads(text)
    assert e.value.check_name == "action.preserves_omega.t"


def test_unknown_action_label():
    text = HEAD + "[omega]\ndq^dp\n[liealgebra]\ndim = 1\nlabels = t\n[action]\ns = d/dq\n"
    with pytest.raises(ModelFileError) as e:
        loads(text)
    assert e.value.line == 11


def test_zero_action_field_loads():
    text = HEAD + "[omega]\ndq^dp\n[liealgebra]\ndim = 1\nlabels = t\n[action]\nt = 0\n[generators]\nq\np\n"
    m = loads(text)
    assert not m.action[0] and m.action[0].degree == 1
    assert not m.currents[0].F


def test_comments_and_structure_constants():
    text = bundled_text("symplectic_aff")
    m = loads("# header\n" + text)
    assert not m.lie.is_abelian()
