#!/usr/bin/env python3
"""Byte-for-byte determinism check for pbs reports.

Runs each listed command twice with the same configuration and asserts the
two outputs are identical. Reports carry no timestamps and all random
sampling is seeded, so any difference is a defect.

Set ``DETERMINISM_SUITES`` to a comma-separated list to restrict the suites
(default: ``poly,validate,biorth``).
"""

from __future__ import annotations

import os
import shutil
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def choose_python_cmd() -> list[str]:
    for candidate in (["python3"], ["python"]):
        if shutil.which(candidate[0]):
            return candidate
    return ["python3"]


def run_once(args: list[str]) -> bytes | None:
    env = {**os.environ, "PYTHONPATH": "python"}
    env.pop("PBS_CONFIG", None)
    proc = subprocess.run(
        choose_python_cmd() + ["-m", "pbs", *args],
        cwd=ROOT,
        env=env,
        capture_output=True,
        check=False,
    )
    # exit 1 only means a failed check; the report is still emitted
    if proc.returncode not in (0, 1):
        print(proc.stderr.decode("utf-8", "replace").strip(), file=sys.stderr)
        return None
    return proc.stdout


def main() -> int:
    raw = os.environ.get("DETERMINISM_SUITES", "poly,validate,biorth")
    suites = [s.strip() for s in raw.split(",") if s.strip()]
    commands = [["poly", "--nmax", "12", "--emit", "csv"]]
    for suite in suites:
        commands.append(["report", "--suite", suite, "--format", "json"])
        commands.append(["report", "--suite", suite, "--format", "csv"])

    mismatches = 0
    for args in commands:
        label = " ".join(args)
        first = run_once(args)
        second = run_once(args)
        if first is None or second is None:
            print(f"FAIL: {label} (command error)")
            mismatches += 1
        elif first != second:
            print(f"FAIL: {label} (outputs differ)")
            mismatches += 1
        else:
            print(f"PASS: {label} ({len(first)} bytes)")

    if mismatches:
        print(f"Determinism FAILED: {mismatches} command(s)")
        return 1
    print("Determinism PASS")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
