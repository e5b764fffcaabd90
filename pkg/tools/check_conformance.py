#!/usr/bin/env python3
"""Exact-value conformance check for the pbs package.

Runs the shared fixture ``spec/conformance/poly.json`` against the package:

* ``hermite`` cases go through the command line (``poly --emit csv``) and
  MUST match the recursion coefficients exactly;
* ``laguerre`` cases MUST match ``laguerre_exact`` as fractions;
* ``moments`` cases MUST match the Gauss-Laguerre radial moments within the
  fixture tolerance.

Set ``CONFORMANCE_STRICT=1`` to fail when the CLI cannot be run, rather than
only when a case disagrees.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import shutil
import subprocess
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

ROOT = Path(__file__).resolve().parent.parent
FIXTURE = ROOT / "spec" / "conformance" / "poly.json"
sys.path.insert(0, str(ROOT / "python"))


def choose_python_cmd() -> list[str]:
    for candidate in (["python3"], ["python"]):
        if shutil.which(candidate[0]):
            return candidate
    return ["python3"]


def cli_coefficients(nmax: int) -> dict[int, dict[int, Fraction]] | None:
    env = {**os.environ, "PYTHONPATH": "python"}
    env.pop("PBS_CONFIG", None)
    args = ["-m", "pbs", "poly", "--nmax", str(nmax), "--emit", "csv"]
    proc = subprocess.run(
        choose_python_cmd() + args,
        cwd=ROOT,
        env=env,
        capture_output=True,
        text=True,
        check=False,
    )
    if proc.returncode != 0:
        print(proc.stderr.strip(), file=sys.stderr)
        return None
    table: dict[int, dict[int, Fraction]] = {}
    for row in csv.DictReader(io.StringIO(proc.stdout)):
        coeff = Fraction(int(row["numerator"]), int(row["denominator"]))
        table.setdefault(int(row["n"]), {})[int(row["power"])] = coeff
    return table


def check_hermite(cases: list[dict[str, Any]]) -> list[str] | None:
    table = cli_coefficients(max(case["n"] for case in cases))
    if table is None:
        return None
    failures: list[str] = []
    for case in cases:
        expected = {
            j: Fraction(c) for j, c in enumerate(case["coefficients"]) if Fraction(c)
        }
        got = table.get(case["n"], {})
        if got != expected:
            failures.append(f"hermite/n={case['n']}: expected {expected}, got {got}")
    return failures


def check_laguerre(cases: list[dict[str, Any]]) -> list[str]:
    from pbs.polyengine import laguerre_exact

    failures: list[str] = []
    for case in cases:
        got = laguerre_exact(case["n"], Fraction(case["x"]))
        if got != Fraction(case["value"]):
            failures.append(
                f"laguerre/n={case['n']} x={case['x']}: "
                f"expected {case['value']}, got {got}"
            )
    return failures


def check_moments(block: dict[str, Any]) -> list[str]:
    from pbs.quadrature import moment_check

    failures: list[str] = []
    tol = float(block["tolerance"])
    for case in block["test_cases"]:
        got = 2.0 * math.pi * moment_check(case["order"]).value
        if abs(got - case["value"]) > tol * case["value"]:
            failures.append(
                f"moments/order={case['order']}: expected {case['value']}, got {got!r}"
            )
    return failures


def main() -> int:
    strict = os.environ.get("CONFORMANCE_STRICT") == "1"
    fixture = json.loads(FIXTURE.read_text(encoding="utf-8"))

    failures: list[str] = []
    hermite = check_hermite(fixture["hermite"]["test_cases"])
    if hermite is None:
        print("hermite cases skipped: CLI did not run.", file=sys.stderr)
        if strict:
            return 1
    else:
        failures += hermite
    failures += check_laguerre(fixture["laguerre"]["test_cases"])
    failures += check_moments(fixture["moments"])

    if failures:
        print(f"Conformance FAILED: {len(failures)} mismatch(es)")
        for failure in failures:
            print(f"    - {failure}")
        return 1
    print("Conformance PASS")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
