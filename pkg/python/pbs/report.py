"""Verification reports: check records and deterministic emitters."""

from __future__ import annotations

import csv
import io
import json
import math
import platform
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
import scipy

ReportFormat = Literal["json", "csv", "md"]

_CSV_HEADER = ("id", "description", "measured", "expected", "tolerance", "passed")


def _as_float(value: Any) -> float | None:
    if value is None:
        return None
    if isinstance(value, str):
        return float(value)  # "inf", "-inf", "nan"
    return float(value)


@dataclass(frozen=True, slots=True)
class CheckRecord:
    """One verification check: passed iff |measured - expected| <= tolerance."""

    check_id: str
    description: str
    measured: float | None
    expected: float
    tolerance: float
    passed: bool

    @classmethod
    def compare(
        cls,
        check_id: str,
        description: str,
        measured: float | None,
        expected: float = 0.0,
        tolerance: float = 0.0,
    ) -> CheckRecord:
        """Build a record and decide pass/fail."""
        ok = (
            measured is not None
            and math.isfinite(measured)
            and abs(measured - expected) <= tolerance
        )
        return cls(
            check_id,
            description,
            None if measured is None else float(measured),
            float(expected),
            float(tolerance),
            ok,
        )

    @classmethod
    def flag(cls, check_id: str, description: str, ok: bool) -> CheckRecord:
        """Boolean check recorded as measured 1/0 against expected 1."""
        return cls(check_id, description, 1.0 if ok else 0.0, 1.0, 0.0, ok)

    def to_dict(self) -> dict[str, Any]:
        """Ordered mapping used by every emitter."""
        return {
            "id": self.check_id,
            "description": self.description,
            "measured": self.measured,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def environment_stamp() -> dict[str, str]:
    """Library versions; no timestamps so reruns stay byte-identical."""
    from . import __version__  # pylint: disable=import-outside-toplevel

    return {
        "pbs": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


@dataclass(frozen=True, slots=True)
class VerificationReport:
    """Checks sorted by id, config echo, environment metadata and notes."""

    suite: str
    checks: tuple[CheckRecord, ...]
    config: Mapping[str, Any] = field(default_factory=dict)
    environment: Mapping[str, str] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.checks, key=lambda c: c.check_id))
        object.__setattr__(self, "checks", ordered)

    @property
    def passed(self) -> bool:
        """True when every check passed."""
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> tuple[CheckRecord, ...]:
        """Failed checks."""
        return tuple(c for c in self.checks if not c.passed)

    def merged(
        self, other: VerificationReport, suite: str | None = None
    ) -> VerificationReport:
        """Concatenate checks and notes of two reports."""
        return VerificationReport(
            suite or self.suite,
            self.checks + other.checks,
            self.config or other.config,
            self.environment or other.environment,
            self.notes + other.notes,
        )

    def with_context(
        self, config: Mapping[str, Any], environment: Mapping[str, str] | None = None
    ) -> VerificationReport:
        """Attach the config echo and environment metadata."""
        return VerificationReport(
            self.suite,
            self.checks,
            dict(config),
            dict(environment if environment is not None else environment_stamp()),
            self.notes,
        )

    def to_dict(self) -> dict[str, Any]:
        """Ordered mapping for the JSON emitter."""
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "config": dict(self.config),
            "metadata": dict(self.environment),
            "notes": list(self.notes),
        }


def format_float(value: float) -> str:
    """17 significant digits; non-finite values become JSON strings."""
    if math.isnan(value):
        return '"nan"'
    if math.isinf(value):
        return '"inf"' if value > 0 else '"-inf"'
    return format(value, ".17g")


def dumps(value: Any, indent: int = 0) -> str:
    """Canonical JSON text: insertion-ordered keys, fixed float format."""
    pad = "  " * (indent + 1)
    close = "  " * indent
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    if isinstance(value, (complex, np.complexfloating)):
        return dumps({"re": value.real, "im": value.imag}, indent)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, Mapping):
        if not value:
            return "{}"
        items = [
            f"{pad}{json.dumps(str(k))}: {dumps(v, indent + 1)}"
            for k, v in value.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        seq = list(value)
        if not seq:
            return "[]"
        items = [f"{pad}{dumps(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value).strip('"')
    return str(value)


def to_csv(rows: Iterable[Iterable[Any]], header: Iterable[str]) -> str:
    """CSV text with fixed float formatting and LF line endings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _to_markdown(report: VerificationReport) -> str:
    lines = [
        f"# {report.suite}",
        "",
        f"Overall: {'PASS' if report.passed else 'FAIL'}",
        "",
        "| " + " | ".join(_CSV_HEADER) + " |",
        "|" + "---|" * len(_CSV_HEADER),
    ]
    for c in report.checks:
        cells = [_csv_cell(v) for v in c.to_dict().values()]
        lines.append("| " + " | ".join(cells) + " |")
    if report.notes:
        lines.append("")
        lines.extend(f"- {note}" for note in report.notes)
    return "\n".join(lines) + "\n"


def emit(report: VerificationReport, fmt: ReportFormat = "json") -> bytes:
    """Serialize a report; identical inputs give identical bytes."""
    if fmt == "json":
        text = dumps(report.to_dict()) + "\n"
    elif fmt == "csv":
        text = to_csv((c.to_dict().values() for c in report.checks), _CSV_HEADER)
    elif fmt == "md":
        text = _to_markdown(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    return text.encode("utf-8")


def from_json(text: str | bytes) -> VerificationReport:
    """Parse a JSON report produced by :func:`emit`."""
    data = json.loads(text)
    checks = tuple(
        CheckRecord(
            str(c["id"]),
            str(c["description"]),
            _as_float(c["measured"]),
            float(_as_float(c["expected"]) or 0.0),
            float(_as_float(c["tolerance"]) or 0.0),
            bool(c["passed"]),
        )
        for c in data["checks"]
    )
    return VerificationReport(
        str(data["suite"]),
        checks,
        dict(data.get("config", {})),
        dict(data.get("metadata", {})),
        tuple(data.get("notes", ())),
    )


def _flat_items(value: Any, prefix: str = "") -> Iterable[tuple[str, Any]]:
    if isinstance(value, Mapping):
        for key, item in value.items():
            yield from _flat_items(item, f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(value, (list, tuple, np.ndarray)):
        for index, item in enumerate(value):
            yield from _flat_items(item, f"{prefix}.{index}")
    elif isinstance(value, (complex, np.complexfloating)):
        yield f"{prefix}.re", float(value.real)
        yield f"{prefix}.im", float(value.imag)
    else:
        yield prefix, value


def emit_mapping(data: Mapping[str, Any], fmt: ReportFormat = "json") -> bytes:
    """Serialize a command payload; csv and md flatten it to key/value rows."""
    if fmt == "json":
        text = dumps(data) + "\n"
    elif fmt == "csv":
        text = to_csv(_flat_items(data), ("key", "value"))
    elif fmt == "md":
        lines = ["| key | value |", "|---|---|"]
        lines.extend(f"| {k} | {_csv_cell(v)} |" for k, v in _flat_items(data))
        text = "\n".join(lines) + "\n"
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    return text.encode("utf-8")
