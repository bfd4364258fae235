"""Reader for the plain-text ``.model`` format and the bundled models.

Sections, in any order::

    [space]        N = 3 / n = 2 / coords = x y z / name = ...
    [omega]        the (n+1)-form, possibly over several lines
    [theta]        optional potential with -d(theta) = omega
    [liealgebra]   dim = 2 / labels = a b / lines "a b c : value" for C^a_bc
    [action]       label = vector field
    [generators]   one Hamiltonian form per line
    [truncation]   dmax = 4 / lmax = 3
    [seed]         value = 0

``#`` starts a comment.
"""

from __future__ import annotations

import re
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .action import LieAlgebraSpec
from .exalg import PolyMultivector
from .mstruct import MultisymplecticModel
from .notation import ParseError, parse

SECTIONS = ("space", "omega", "theta", "liealgebra", "action", "generators", "truncation", "seed")
REQUIRED = ("space", "omega")


class ModelValidationError(ValueError):
    def __init__(self, source: str, check_name: str, detail: str):
        super().__init__(f"{source}: validation failed: {check_name}" + (f" ({detail})" if detail else ""))
        self.check_name = check_name


class ModelFileError(ValueError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None, source: str = "<model>"):
        where = source
        if line is not None:
            where += f":{line}"
            if col is not None:
                where += f":{col}"
        super().__init__(f"{where}: {msg}")
        self.line, self.col = line, col


def bundled_names() -> list[str]:
    root = resources.files("msbrst") / "models"
    return sorted(p.name[: -len(".model")] for p in root.iterdir() if p.name.endswith(".model"))


def bundled_text(name: str) -> str:
    return (resources.files("msbrst") / "models" / f"{name}.model").read_text()


def _sections(text: str, source: str) -> dict[str, list[tuple[int, int, str]]]:
    out: dict[str, list] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        body = line.strip()
        if not body:
            continue
        col = len(line) - len(line.lstrip()) + 1
        m = re.fullmatch(r"\[(\w+)\]", body)
        if m:
            current = m.group(1).lower()
            if current not in SECTIONS:
                raise ModelFileError(f"unknown section [{current}]", lineno, col, source)
            if current in out:
                raise ModelFileError(f"duplicate section [{current}]", lineno, col, source)
            out[current] = []
            continue
        if current is None:
            raise ModelFileError("content before the first section", lineno, col, source)
        out[current].append((lineno, col, body))
    for s in REQUIRED:
        if s not in out:
            raise ModelFileError(f"missing section [{s}]", source=source)
    return out


def _keyvals(lines, source) -> dict[str, tuple[int, int, str]]:
    kv = {}
    for lineno, col, body in lines:
        if "=" not in body:
            raise ModelFileError("expected key = value", lineno, col, source)
        k, v = body.split("=", 1)
        kv[k.strip().lower()] = (lineno, col + body.index("=") + 1, v.strip())
    return kv


def _int(kv, key, source, default=None) -> int:
    if key not in kv:
        if default is None:
            raise ModelFileError(f"missing key {key!r}", source=source)
        return default
    lineno, col, v = kv[key]
    try:
        return int(v)
    except ValueError:
        raise ModelFileError(f"{key} must be an integer, got {v!r}", lineno, col, source) from None


def _parse_at(text, names, kind, lineno, col, source):
    try:
        return parse(text, names, kind)
    except ParseError as e:
        c = col + (e.col or 0)
        raise ModelFileError(e.msg, lineno, c, source) from None


def validate(model: MultisymplecticModel, source: str) -> MultisymplecticModel:
    """Raise on the first failing structural check; precompute the currents."""
    from .action import check_action
    from .mstruct import check_multisymplectic

    for c in check_multisymplectic(model).checks:
        if not c.ok:
            raise ModelValidationError(source, c.name, c.detail)
    if model.lie is not None:
        for c in check_action(model).checks:
            if not c.ok:
                raise ModelValidationError(source, c.name, c.detail)
        model.currents
    return model


def loads(text: str, name: str = "model", source: str | None = None, check: bool = True) -> MultisymplecticModel:
    source = source or name
    sec = _sections(text, source)
    dims = {}
    for lineno, col, body in sec["space"]:
        k, _, v = body.partition("=")
        dims[k.strip()] = (lineno, col, v.strip())
    try:
        N = int(dims["N"][2])
        n = int(dims["n"][2])
    except KeyError as e:
        raise ModelFileError(f"[space] needs key {e.args[0]!r}", source=source) from None
    except ValueError:
        raise ModelFileError("[space] N and n must be integers", source=source) from None
    if "coords" in dims:
        coords = tuple(dims["coords"][2].split())
        if len(coords) != N:
            lineno, col, _ = dims["coords"]
            raise ModelFileError(f"{len(coords)} coordinate names for N = {N}", lineno, col, source)
    else:
        coords = tuple(f"x{i}" for i in range(N))
    if "name" in dims:
        name = dims["name"][2]
    if not 1 <= n <= N - 1:
        raise ModelFileError(f"need 1 <= n <= N-1, got n = {n}, N = {N}", source=source)

    def joined(key):
        lines = sec.get(key, [])
        if not lines:
            return None
        lineno, col, _ = lines[0]
        return _parse_at(" ".join(b for _, _, b in lines), coords, "form", lineno, col, source)

    omega = joined("omega")
    if omega.degree != n + 1:
        raise ModelFileError(f"omega has degree {omega.degree}, expected n+1 = {n + 1}", sec["omega"][0][0], None, source)
    theta = joined("theta")

    lie = None
    action = ()
    if "liealgebra" in sec:
        lines = sec["liealgebra"]
        kv = _keyvals([l for l in lines if "=" in l[2]], source)
        dim = _int(kv, "dim", source)
        labels = tuple(kv["labels"][2].split()) if "labels" in kv else tuple(f"e{i + 1}" for i in range(dim))
        if len(labels) != dim:
            raise ModelFileError(f"{len(labels)} labels for dim = {dim}", kv["labels"][0], kv["labels"][1], source)
        pos = {l: i for i, l in enumerate(labels)}
        triples = {}
        for lineno, col, body in lines:
            if "=" in body:
                continue
            m = re.fullmatch(r"(\S+)\s+(\S+)\s+(\S+)\s*:\s*(\S+)", body)
            if not m:
                raise ModelFileError("expected 'a b c : value'", lineno, col, source)
            idx = []
            for g in (1, 2, 3):
                if m.group(g) not in pos:
                    raise ModelFileError(f"unknown label {m.group(g)!r}", lineno, col + m.start(g), source)
                idx.append(pos[m.group(g)])
            try:
                val = Fraction(m.group(4))
            except (ValueError, ZeroDivisionError):
                raise ModelFileError(f"bad constant {m.group(4)!r}", lineno, col + m.start(4), source) from None
            triples[tuple(idx)] = val
        lie = LieAlgebraSpec.from_triples(labels, triples)
        fields = {}
        for lineno, col, body in sec.get("action", []):
            k, eq, v = body.partition("=")
            if not eq:
                raise ModelFileError("expected label = vector field", lineno, col, source)
            k = k.strip()
            if k not in pos:
                raise ModelFileError(f"unknown label {k!r}", lineno, col, source)
            vcol = col + body.index("=") + 1 + (len(v) - len(v.lstrip()))
            X = _parse_at(v.strip(), coords, "vector", lineno, vcol, source)
            if X and X.degree != 1:
                raise ModelFileError("action fields must be vector fields", lineno, vcol, source)
            fields[k] = X if X else PolyMultivector(len(coords), 1)
        missing = [l for l in labels if l not in fields]
        if missing:
            raise ModelFileError(f"no action field for {', '.join(missing)}", source=source)
        action = tuple(fields[l] for l in labels)
    elif "action" in sec:
        raise ModelFileError("[action] without [liealgebra]", source=source)

    gens = []
    for lineno, col, body in sec.get("generators", []):
        gens.append(_parse_at(body, coords, "form", lineno, col, source))

    tr = _keyvals(sec.get("truncation", []), source)
    seed = _keyvals(sec.get("seed", []), source)
    model = MultisymplecticModel(
        name=name,
        coords=coords,
        n=n,
        omega=omega,
        theta=theta,
        lie=lie,
        action=action,
        generators=tuple(gens),
        dmax=_int(tr, "dmax", source, 3),
        lmax=_int(tr, "lmax", source, 3),
        seed=_int(seed, "value", source, 0),
    )
    return validate(model, source) if check else model


def load_model(spec: str | Path, check: bool = True) -> MultisymplecticModel:
    """Load a model from a path, or by bundled name, and validate it."""
    p = Path(spec)
    if p.suffix == ".model" or p.exists():
        try:
            text = p.read_text()
        except OSError as e:
            raise ModelFileError(f"cannot read model file: {e.strerror}", source=str(p)) from None
        return loads(text, p.stem, str(p), check)
    name = str(spec)
    if name not in bundled_names():
        raise ModelFileError(f"no such model file or bundled model; bundled: {', '.join(bundled_names())}", source=name)
    return loads(bundled_text(name), name, f"{name}.model", check)
