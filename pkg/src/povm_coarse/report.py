"""Reports shared by the CLI commands and the built-in scenarios."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np


@dataclass
class Check:
    """One verdict: a measured number compared against a tolerance."""

    name: str
    passed: bool
    value: float | int | None = None
    tol: float | None = None
    detail: str = ""
    informational: bool = False


@dataclass
class Report:
    command: str
    checks: list[Check] = field(default_factory=list)
    data: dict[str, Any] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    status: int | None = None

    def add(self, name: str, passed: bool, value=None, tol=None, detail: str = "") -> Check:
        c = Check(name, bool(passed), _plain(value), tol, detail)
        self.checks.append(c)
        return c

    def verdict(self, name: str, holds: bool, value=None, tol=None, detail: str = "") -> Check:
        """A finding about the input that does not decide the exit status."""
        c = Check(name, bool(holds), _plain(value), tol, detail, informational=True)
        self.checks.append(c)
        return c

    def bound(self, name: str, value: float, tol: float, detail: str = "") -> Check:
        """Pass when ``value < tol``."""
        return self.add(name, value < tol, float(value), tol, detail)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    def exit_status(self) -> int:
        if self.status is not None:
            return self.status
        return 0 if self.passed else 1

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "status": self.exit_status(),
            "passed": self.passed,
            "tolerances": self.tolerances,
            "checks": [asdict(c) for c in self.checks],
            "data": _plain(self.data),
        }

    def dumps_json(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    def render_text(self) -> str:
        lines = [f"# {self.command}"]
        if self.tolerances:
            lines.append("tolerances: " + ", ".join(f"{k}={v:g}" for k, v in self.tolerances.items()))
        for c in self.checks:
            if c.informational:
                mark = "YES " if c.passed else "NO  "
            else:
                mark = "PASS" if c.passed else "FAIL"
            parts = [f"{mark} {c.name}"]
            if c.value is not None:
                parts.append(f"value={_fmt(c.value)}")
            if c.tol is not None:
                parts.append(f"tol={c.tol:g}")
            if c.detail:
                parts.append(c.detail)
            lines.append("  ".join(parts))
        for key, value in self.data.items():
            if key == "document":
                continue
            lines.append(f"{key}: {_short(value)}")
        lines.append(f"status: {self.exit_status()}")
        return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.3e}"
    return str(v)


def _short(v) -> str:
    text = json.dumps(_plain(v))
    return text if len(text) <= 400 else text[:397] + "..."


def _plain(v):
    """Recursively turn numpy scalars/arrays and complex numbers into JSON-ready values."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, (np.floating,)):
        return float(v)
    return v
