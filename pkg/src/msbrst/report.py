"""Check records and their two renderings (aligned table, key=value lines)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    name: str
    status: str  # "pass", "fail" or "warn"
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status != "fail"


def passed(name: str, detail: str = "") -> Check:
    return Check(name, "pass", detail)


def failed(name: str, detail: str = "") -> Check:
    return Check(name, "fail", detail)


def check(name: str, ok: bool, detail: str = "") -> Check:
    return Check(name, "pass" if ok else "fail", detail)


@dataclass
class ValidationReport:
    subject: str
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, c: Check) -> Check:
        self.checks.append(c)
        return c

    def extend(self, other: "ValidationReport") -> None:
        self.checks.extend(other.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def records(self) -> list[dict]:
        return [
            {"record": "check", "subject": self.subject, "name": c.name, "status": c.status, "detail": c.detail}
            for c in self.checks
        ]


def _value(v) -> str:
    s = str(v)
    if s and all(ch.isalnum() or ch in "._-/()^,:" for ch in s):
        return s
    return json.dumps(s, ensure_ascii=False)


def format_record(rec: dict) -> str:
    """One record per line: ``key=value`` pairs, values JSON-quoted when needed."""
    return " ".join(f"{k}={_value(v)}" for k, v in rec.items())


def format_table(rows: list[dict], columns: list[str]) -> str:
    cells = [[str(r.get(c, "")) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    line = "  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()
    rule = "  ".join("-" * w for w in widths)
    body = ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join([line, rule] + body)
