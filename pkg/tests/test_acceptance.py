"""Acceptance criteria 1-8, run on every bundled model.

Each criterion prints one PASS/FAIL line; the lines are collected again in
the pytest terminal summary.  Run directly with ``python3 tests/test_acceptance.py``.
"""

import random
import subprocess
import sys
from math import comb

from msbrst.action import cocycle
from msbrst.brst import brst_h0, brst_report, module_report
from msbrst.exalg import ext_d
from msbrst.koszul import (
    ObservableAlgebra,
    Truncation,
    assemble_koszul_complex,
    check_w_derivation,
    graded_pieces,
    koszul_homology,
)
from msbrst.modelfile import bundled_names, load_model
from msbrst.mstruct import KINDS, check_algebra_identities
from msbrst.notation import parse

SAMPLES = 100
RESULTS: dict[int, tuple[bool, str]] = {}


def models():
    return [load_model(name) for name in bundled_names()]


def record(n, ok, detail):
    RESULTS[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def held(check):
    k, total = check.detail.split()[0].split("/")
    return int(k), int(total)


def test_criterion_1_bracket_identities():
    bad = []
    n = 0
    for m in models():
        for kind in KINDS:
            c = check_algebra_identities(m, kind, SAMPLES).checks[0]
            k, total = held(c)
            n += 1
            if not c.ok or k != total or total < SAMPLES:
                bad.append(f"{m.name}:{kind}")
    record(1, not bad, f"{n} suites of {SAMPLES} samples" + (f"; failing {bad}" if bad else ""))


def test_criterion_2_koszul_suite():
    bad = []
    count = 0
    rng = random.Random(2)
    for m in models():
        alg = ObservableAlgebra(m)
        for pc in graded_pieces(alg, Truncation(m.dmax, m.lmax), with_alpha=False):
            asm = assemble_koszul_complex(alg, pc)
            count += sum(len(v) for v in asm.chains.values())
            if not asm.zero_composites:
                bad.append(f"{m.name}:{pc.label}")
        samples = []
        for _ in range(50):
            v = tuple(rng.randrange(alg.g) for _ in range(rng.randrange(3)))
            u = tuple(rng.randrange(alg.g) for _ in range(rng.randrange(3)))
            samples.append((v, u))
        if not check_w_derivation(alg, samples).ok:
            bad.append(f"{m.name}:sign rule")
    parity = all(((n - 1) * (n - 2) - 1) % 2 == 1 for n in range(1, 17))
    record(2, not bad and parity, f"d_K^2 = 0 on {count} basis elements, sign rule and parity fact" + (f"; failing {bad}" if bad else ""))


def test_criterion_3_koszul_homology():
    r4 = koszul_homology(load_model("symplectic_r4"))
    h0 = r4.h0_by_coeff_degree()
    ok = h0 == {d: comb(d + 2, 2) for d in range(4)}
    ok &= all(not r.homology for r in r4.interior() if r.degree > 0)
    for name in ["volume_r3", "dw2"]:
        t = koszul_homology(load_model(name))
        ok &= all(not r.homology for r in t.interior() if r.degree > 0)
        ok &= all(r.homology == r.oracle for r in t.interior() if r.degree == 0)
    record(3, ok, f"symplectic_r4 H0 = {[h0[d] for d in sorted(h0)]}")


def test_criterion_4_module_structure():
    bad = []
    broke = []
    for m in models():
        rep = module_report(m, samples=50)
        for c in rep.checks:
            if c.name == "module.left_order_control":
                if c.ok:
                    broke.append(m.name)
            elif not c.ok:
                bad.append(f"{m.name}:{c.name}")
        if held(rep["module.current_bracket_rule"])[1] < 50:
            bad.append(f"{m.name}:too few samples")
    record(4, not bad and bool(broke), f"left order breaks on {broke}" + (f"; failing {bad}" if bad else ""))


def test_criterion_5_brst_differentials():
    bad = []
    n = 0
    for m in models():
        rep = brst_report(m)
        n += int(rep["brst.total_nilpotent"].detail.split()[0])
        bad += [f"{m.name}:{c.name}" for c in rep.checks if not c.ok]
    record(5, not bad, f"d^2, [d, d_K], D^2 vanish on {n} basis elements" + (f"; failing {bad}" if bad else ""))


def test_criterion_6_brst_h0():
    bad = []
    pieces = 0
    for m in models():
        t = brst_h0(m)
        pieces += len(t.interior())
        bad += [f"{m.name}:{r.piece}" for r in t.interior() if r.h0 != r.oracle]
    r4 = brst_h0(load_model("symplectic_r4")).h0_by_coeff_degree()
    ok = not bad and r4 == {d: d + 1 for d in range(4)}
    record(6, ok, f"{pieces} interior pieces match; symplectic_r4 H0 = {[r4[d] for d in sorted(r4)]}" + (f"; failing {bad}" if bad else ""))


def test_criterion_7_cocycle():
    vol = load_model("volume_r3")
    cc = cocycle(vol, 0, 1)
    names = vol.coords
    ok = cc.form == parse("dz", names) and cc.kind == "exact" and cc.primitive == parse("z", names)
    closed = 0
    for m in models():
        for b in range(m.dim_g):
            for c in range(m.dim_g):
                ok &= not ext_d(cocycle(m, b, c).form)
                closed += 1
    record(7, ok, f"c(dx, dy) = {vol.show(cc.form)} = d({vol.show(cc.primitive)}); {closed} cocycles closed")


def test_criterion_8_determinism():
    diff = []
    for name in bundled_names():
        cmd = [sys.executable, "-m", "msbrst", "full-report", "--model", name]
        a = subprocess.run(cmd, capture_output=True).stdout
        b = subprocess.run(cmd, capture_output=True).stdout
        if a != b or not a:
            diff.append(name)
    record(8, not diff, f"full-report byte-identical on {len(bundled_names())} models" + (f"; differs on {diff}" if diff else ""))


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except AssertionError:
                pass
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
