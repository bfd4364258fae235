"""Command-line front end: ``msbrst <command> --model NAME_OR_PATH [options]``."""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from dataclasses import dataclass, field

from .action import check_action
from .brst import brst_h0, check_brst, module_report
from .koszul import ModelError, ObservableAlgebra, Truncation, check_koszul, koszul_homology
from .modelfile import ModelFileError, ModelValidationError, bundled_names, load_model
from .mstruct import KINDS, MultisymplecticModel, NotHamiltonian, check_algebra_identities, check_multisymplectic
from .notation import ParseError
from .report import ValidationReport, check, format_record, format_table

COMMANDS = ("check-model", "verify-identities", "koszul-homology", "brst-cohomology", "full-report")


@dataclass
class Section:
    title: str
    report: ValidationReport
    tables: list[tuple[str, list[dict], list[str]]] = field(default_factory=list)
    seconds: float = 0.0


@dataclass
class RunReport:
    command: str
    model: str
    sections: list[Section] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(s.report.ok for s in self.sections)

    def counts(self) -> tuple[int, int]:
        checks = [c for s in self.sections for c in s.report.checks]
        return len(checks), sum(not c.ok for c in checks)

    def render(self, fmt: str, timing: bool = False) -> str:
        total, failed = self.counts()
        status = "pass" if self.ok else "fail"
        lines = []
        if fmt == "records":
            lines.append(format_record({"record": "run", "command": self.command, "model": self.model}))
            for s in self.sections:
                for rec in s.report.records():
                    lines.append(format_record({"section": s.title, **rec}))
                for _, rows, _ in s.tables:
                    lines.extend(format_record({"section": s.title, **r}) for r in rows)
                if timing:
                    lines.append(format_record({"record": "timing", "section": s.title, "seconds": f"{s.seconds:.3f}"}))
            lines.append(format_record({"record": "summary", "status": status, "checks": total, "failed": failed}))
            return "\n".join(lines) + "\n"
        lines.append(f"{self.command} on {self.model}")
        for s in self.sections:
            head = f"== {s.title} =="
            if timing:
                head += f" ({s.seconds:.3f} s)"
            lines += ["", head]
            rows = [{"check": c.name, "status": c.status, "detail": c.detail} for c in s.report.checks]
            lines.append(format_table(rows, ["check", "status", "detail"]))
            for title, trows, cols in s.tables:
                lines += ["", title, format_table(trows, cols)]
        lines += ["", f"{status}: {total - failed}/{total} checks passed"]
        return "\n".join(lines) + "\n"


def _timed(title, fn) -> Section:
    t = time.perf_counter()
    sec = fn()
    sec.title = title
    sec.seconds = time.perf_counter() - t
    return sec


def section_model(model: MultisymplecticModel) -> Section:
    rep = check_multisymplectic(model)
    if model.lie is not None:
        rep.extend(check_action(model))
    letters_ok = True
    for F in model.generators:
        try:
            model.letters
        except NotHamiltonian as e:
            rep.add(check("letters.hamiltonian", False, str(e)))
            letters_ok = False
            break
    if letters_ok:
        rep.add(check("letters.hamiltonian", True, f"{len(model.generators)} letters"))
        if model.lie is not None:
            try:
                alg = ObservableAlgebra(model)
                alg.deltas
                alg.rho_table
                rep.add(check("letters.closed_under_action", True, ""))
            except ModelError as e:
                rep.add(check("letters.closed_under_action", False, str(e)))
    return Section("model", rep)


def section_identities(model: MultisymplecticModel, samples: int) -> Section:
    rep = ValidationReport(model.name)
    for kind in KINDS:
        rep.extend(check_algebra_identities(model, kind, samples))
    return Section("identities", rep)


HOM_COLS = ["piece", "form_degree", "coeff_degree", "degree", "dim", "rank", "homology", "oracle", "boundary"]
BRST_COLS = ["piece", "form_degree", "coeff_degree", "dim_minus1", "dim_0", "dim_1", "h0", "oracle", "boundary"]


def _blank(rows: list[dict]) -> list[dict]:
    return [{k: ("-" if v is None else v) for k, v in r.items()} for r in rows]


def _need_truncation(model: MultisymplecticModel, trunc: Truncation) -> None:
    alg = ObservableAlgebra(model)
    low = min((alg.delta_weights[a][1] for a in range(alg.g)), default=0)
    if trunc.dmax < low or trunc.lmax < 1:
        raise ModelError(f"truncation dmax={trunc.dmax}, lmax={trunc.lmax} holds no current multiples")


def section_koszul(model: MultisymplecticModel, trunc: Truncation) -> Section:
    _need_truncation(model, trunc)
    rep = check_koszul(model, trunc)
    rows = koszul_homology(model, trunc).records()
    return Section("koszul", rep, [("Koszul homology", _blank(rows), HOM_COLS)])


def section_brst(model: MultisymplecticModel, trunc: Truncation, samples: int) -> Section:
    _need_truncation(model, trunc)
    rep = module_report(model, trunc, samples=max(50, samples // 2))
    rep.extend(check_brst(model, trunc))
    rows = brst_h0(model, trunc).records()
    return Section("brst", rep, [("BRST degree-zero cohomology", _blank(rows), BRST_COLS)])


def run(command: str, model: MultisymplecticModel, samples: int = 100) -> RunReport:
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    trunc = Truncation(model.dmax, model.lmax)
    rr = RunReport(command, model.name)
    if command in ("check-model", "full-report"):
        rr.sections.append(_timed("model", lambda: section_model(model)))
    if command in ("verify-identities", "full-report"):
        rr.sections.append(_timed("identities", lambda: section_identities(model, samples)))
    if command in ("koszul-homology", "full-report"):
        rr.sections.append(_timed("koszul", lambda: section_koszul(model, trunc)))
    if command in ("brst-cohomology", "full-report"):
        rr.sections.append(_timed("brst", lambda: section_brst(model, trunc, samples)))
    return rr


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="msbrst", description="Exact checks of multisymplectic observables, Koszul homology and BRST cohomology.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--model", required=True, help=f"model file path or bundled name ({', '.join(bundled_names())})")
    p.add_argument("--samples", type=int, default=100, help="samples per identity suite (default 100)")
    p.add_argument("--dmax", type=int, help="override the maximal coefficient degree")
    p.add_argument("--lmax", type=int, help="override the maximal word length")
    p.add_argument("--seed", type=int, help="override the sampler seed")
    p.add_argument("--format", choices=("table", "records"), default="table")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--timing", action="store_true", help="include wall-clock timings (output is then not reproducible)")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        model = load_model(args.model)
        over = {k: v for k, v in (("dmax", args.dmax), ("lmax", args.lmax), ("seed", args.seed)) if v is not None}
        if over:
            model = dataclasses.replace(model, **over)
        if args.samples < 1:
            raise ValueError("--samples must be positive")
        report = run(args.command, model, args.samples)
    except (ModelFileError, ModelValidationError, ParseError, ModelError, ValueError) as e:
        print(f"msbrst: error: {e}", file=sys.stderr)
        return 2
    text = report.render(args.format, args.timing)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
