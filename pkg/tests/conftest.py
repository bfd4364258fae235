import sys
from functools import lru_cache

import pytest
from hypothesis import settings

from msbrst.modelfile import load_model
from msbrst.notation import parse

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

XYZ = ("x", "y", "z")


def form(text, names=XYZ):
    return parse(text, names)


def vec(text, names=XYZ):
    return parse(text, names, "vector")


@lru_cache(maxsize=None)
def bundled(name):
    return load_model(name)


@pytest.fixture
def r2():
    return bundled("symplectic_r2")


@pytest.fixture
def r4():
    return bundled("symplectic_r4")


@pytest.fixture
def vol():
    return bundled("volume_r3")


@pytest.fixture
def dw():
    return bundled("dw2")


@pytest.fixture
def aff():
    return bundled("symplectic_aff")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
