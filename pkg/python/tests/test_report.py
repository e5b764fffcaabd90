"""Report record and emitter tests."""

# pylint: disable=missing-function-docstring,missing-class-docstring
# pylint: disable=too-few-public-methods,no-self-use
# flake8: noqa: D102,D103

from __future__ import annotations

import json
import math

import pytest

from pbs.report import (
    CheckRecord,
    VerificationReport,
    dumps,
    emit,
    emit_mapping,
    format_float,
    from_json,
    to_csv,
)

ENV = {"pbs": "0.0.0", "python": "3.x", "numpy": "x", "scipy": "y"}


def _report() -> VerificationReport:
    checks = (
        CheckRecord.compare("b.second", "second check", 2e-11, 0.0, 1e-10),
        CheckRecord.compare("a.first", "first check", 0.5, 0.0, 1e-10),
        CheckRecord.flag("c.flag", "flag check", True),
    )
    return VerificationReport("unit", checks, {"k": 0.5}, ENV, ("note one",))


class TestCheckRecord:
    def test_compare(self) -> None:
        assert CheckRecord.compare("x", "", 1e-12, 0.0, 1e-10).passed
        assert not CheckRecord.compare("x", "", 1.0, 0.0, 1e-10).passed

    def test_non_finite_fails(self) -> None:
        assert not CheckRecord.compare("x", "", math.nan, 0.0, 1.0).passed
        assert not CheckRecord.compare("x", "", math.inf, 0.0, math.inf).passed
        assert not CheckRecord.compare("x", "", None).passed

    def test_flag(self) -> None:
        record = CheckRecord.flag("x", "flag", False)
        assert record.measured == 0.0
        assert not record.passed


class TestReport:
    def test_checks_sorted_and_failures(self) -> None:
        report = _report()
        assert [c.check_id for c in report.checks] == ["a.first", "b.second", "c.flag"]
        assert not report.passed
        assert [c.check_id for c in report.failures] == ["a.first"]

    def test_merge(self) -> None:
        other = VerificationReport("other", (CheckRecord.flag("0.zero", "", True),))
        merged = _report().merged(other, suite="all")
        assert merged.suite == "all"
        assert merged.checks[0].check_id == "0.zero"
        assert merged.notes == ("note one",)


class TestEmit:
    def test_json_is_deterministic(self) -> None:
        assert emit(_report(), "json") == emit(_report(), "json")

    def test_json_round_trip(self) -> None:
        text = emit(_report(), "json")
        data = json.loads(text)
        keys = ["suite", "passed", "checks", "config", "metadata", "notes"]
        assert list(data) == keys
        back = from_json(text)
        assert back.checks == _report().checks
        assert back.notes == ("note one",)
        assert back.environment == ENV

    def test_non_finite_values_are_strings(self) -> None:
        record = CheckRecord.compare("x", "", math.inf, 0.0, 1.0)
        report = VerificationReport("inf", (record,), environment=ENV)
        data = json.loads(emit(report, "json"))
        assert data["checks"][0]["measured"] == "inf"
        assert from_json(emit(report, "json")).checks[0].measured == math.inf

    def test_csv(self) -> None:
        lines = emit(_report(), "csv").decode().splitlines()
        assert lines[0] == "id,description,measured,expected,tolerance,passed"
        assert lines[1].startswith("a.first,first check,0.5,")
        assert lines[1].endswith(",false")
        assert len(lines) == 4

    def test_markdown(self) -> None:
        text = emit(_report(), "md").decode()
        assert text.startswith("# unit\n")
        assert "Overall: FAIL" in text
        assert "- note one" in text

    def test_unknown_format(self) -> None:
        with pytest.raises(ValueError):
            emit(_report(), "xml")  # type: ignore[arg-type]


class TestSerialization:
    def test_float_format(self) -> None:
        assert format_float(0.1) == "0.10000000000000001"
        assert format_float(-math.inf) == '"-inf"'
        assert format_float(math.nan) == '"nan"'

    def test_complex_values(self) -> None:
        assert json.loads(dumps({"z": 1 + 2j})) == {"z": {"re": 1.0, "im": 2.0}}

    def test_unsupported_type(self) -> None:
        with pytest.raises(TypeError):
            dumps(object())

    def test_csv_rows(self) -> None:
        text = to_csv([(1, 0.25, None, True)], ("a", "b", "c", "d"))
        assert text == "a,b,c,d\n1,0.25,,true\n"


class TestEmitMapping:
    def test_json(self) -> None:
        data = json.loads(emit_mapping({"n": 3, "z": 0.5 - 1j}))
        assert data == {"n": 3, "z": {"re": 0.5, "im": -1}}

    def test_csv_flattens(self) -> None:
        payload = {"z": 0.5 - 1j, "sub": {"ok": True}, "rows": [[1.0, 2.0]]}
        text = emit_mapping(payload, "csv").decode("utf-8")
        assert text.splitlines() == [
            "key,value",
            "z.re,0.5",
            "z.im,-1",
            "sub.ok,true",
            "rows.0.0,1",
            "rows.0.1,2",
        ]

    def test_markdown(self) -> None:
        text = emit_mapping({"bound_slack": 0.25}, "md").decode("utf-8")
        assert text == "| key | value |\n|---|---|\n| bound_slack | 0.25 |\n"

    def test_unknown_format(self) -> None:
        with pytest.raises(ValueError):
            emit_mapping({}, "xml")  # type: ignore[arg-type]
