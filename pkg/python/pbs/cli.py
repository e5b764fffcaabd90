#!/usr/bin/env python3
"""CLI entrypoints for verification suites and data dumps."""

# pyright: reportUnusedCallResult=false,reportAny=false
# pylint: disable=import-outside-toplevel,too-many-locals
# flake8: noqa: E501

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Any

from .config import Config, ConfigError, load_config, parse_complex

logger = logging.getLogger(__name__)

COMMANDS = ("validate", "poly", "states", "biorth", "norms", "bcs", "weak", "report")


def _print_usage() -> None:
    print(
        """pbs python CLI

Usage:
  python -m pbs <command> [--config FILE] [--set key=value ...] [--out PATH]
                         [--format json|csv|md] [-v]

Commands:
  validate  Check the defining identities of the configured family and presets.
  poly      Exact recursion polynomials (--emit csv dumps coefficients).
  states    Ladder action, factorization, metric (--emit csv dumps values).
  biorth    Gram matrix <Psi_m, phi_n> as JSON.
  norms     Closed-form norms, asymptotics, moments, growth radii.
  bcs       Bi-coherent state at --z: normalization, eigen residual, resolution.
  weak      Weak functionals F(z)[v], G(z)[v] on a bump.
  report    Run --suite NAME (or all) and emit the report.

Examples:
  python -m pbs validate
  python -m pbs poly --nmax 10 --emit csv
  python -m pbs bcs --z 1+0.5i --nmax 40
  python -m pbs report --suite all --format md --set k=1.0

Environment:
  PBS_CONFIG=<path>   JSON config file used when --config is absent
  PBS_LOG_LEVEL=DEBUG|INFO|WARNING
"""
    )


def _env_level(default: str = "WARNING") -> str:
    raw = os.environ.get("PBS_LOG_LEVEL", default).strip().upper()
    return raw if raw in {"DEBUG", "INFO", "WARNING", "ERROR"} else default


def _common_parser(prog: str) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog=f"pbs {prog}")
    ap.add_argument("--config", type=str, default=None)
    ap.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE"
    )
    ap.add_argument("--out", type=str, default=None)
    ap.add_argument("--format", choices=["json", "csv", "md"], default="json")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    return ap


def _setup_logging(verbose: int) -> None:
    level = _env_level()
    if verbose == 1:
        level = "INFO"
    elif verbose >= 2:
        level = "DEBUG"
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )


def _write(payload: bytes, out: str | None) -> None:
    if out:
        Path(out).write_bytes(payload)
        return
    sys.stdout.write(payload.decode("utf-8"))
    sys.stdout.flush()


def _load(ns: argparse.Namespace, extra: dict[str, Any] | None = None) -> Config:
    _setup_logging(ns.verbose)
    overrides = list(ns.overrides)
    for key, value in (extra or {}).items():
        if value is not None:
            overrides.append(f"{key}={value}")
    config = load_config(ns.config, overrides)
    config.family()  # surface s_A syntax errors as config errors
    return config


def _run_suite_mode(suite: str, ns: argparse.Namespace, config: Config) -> None:
    from .report import emit
    from .suites import run_suite

    report = run_suite(config, suite)
    _write(emit(report, ns.format), ns.out)
    if not report.passed:
        for check in report.failures:
            logger.warning("FAIL %s: measured %r", check.check_id, check.measured)
        sys.exit(1)


def _run_poly_mode(argv: list[str]) -> None:
    ap = _common_parser("poly")
    ap.add_argument("--nmax", type=int, default=None)
    ap.add_argument("--emit", choices=["csv", "report"], default="report")
    ns = ap.parse_args(argv)
    config = _load(ns, {"nmax": ns.nmax})
    if ns.emit == "report":
        _run_suite_mode("poly", ns, config)
        return
    from .polyengine import pn_sequence
    from .report import to_csv

    rows = [
        (n, power, c.numerator, c.denominator)
        for n, p in enumerate(pn_sequence(config.nmax))
        for power, c in enumerate(p.coefficients)
        if c
    ]
    header = ("n", "power", "numerator", "denominator")
    _write(to_csv(rows, header).encode("utf-8"), ns.out)


def _parse_grid(raw: str) -> tuple[float, float, int]:
    parts = raw.split(":")
    if len(parts) != 3:
        raise ConfigError("grid", "expected LO:HI:STEPS")
    lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    if steps < 2 or not hi > lo:
        raise ConfigError("grid", "need HI > LO and STEPS >= 2")
    return lo, hi, steps


def _run_states_mode(argv: list[str]) -> None:
    ap = _common_parser("states")
    ap.add_argument("--nmax", type=int, default=None)
    ap.add_argument("--grid", type=str, default="-10:10:201")
    ap.add_argument("--emit", choices=["csv", "report"], default="report")
    ns = ap.parse_args(argv)
    config = _load(ns, {"nmax": ns.nmax})
    if ns.emit == "report":
        _run_suite_mode("states", ns, config)
        return
    import numpy as np

    from .report import to_csv
    from .states import eigenstate

    lo, hi, steps = _parse_grid(ns.grid)
    xs = np.linspace(lo, hi, steps)
    fam = config.family()
    rows = []
    for n in range(config.nmax + 1):
        phi = eigenstate(fam, "A", n).values(xs)
        psi = eigenstate(fam, "B", n).values(xs)
        for x, a, b in zip(xs, phi, psi):
            rows.append((n, float(x), a.real, a.imag, b.real, b.imag))
    header = ("n", "x", "phi_re", "phi_im", "psi_re", "psi_im")
    _write(to_csv(rows, header).encode("utf-8"), ns.out)


def _run_biorth_mode(argv: list[str]) -> None:
    ap = _common_parser("biorth")
    ap.add_argument("--nmax", type=int, default=None)
    ap.add_argument("--tol", type=float, default=None)
    ns = ap.parse_args(argv)
    config = _load(ns, {"nmax": ns.nmax})
    import numpy as np

    from .quadrature import gram_matrix
    from .report import emit_mapping

    fam = config.family()
    gram = gram_matrix(fam, config.nmax, config.quadrature)
    deviation = float(np.max(np.abs(gram - np.eye(config.nmax + 1))))
    tol = ns.tol if ns.tol is not None else config.tolerance("biorth")
    payload = {
        "family": fam.label,
        "k": fam.k,
        "nmax": config.nmax,
        "max_deviation": deviation,
        "tolerance": tol,
        "passed": deviation <= tol,
        "gram": [[[float(v.real), float(v.imag)] for v in row] for row in gram],
    }
    _write(emit_mapping(payload, ns.format), ns.out)
    if deviation > tol:
        sys.exit(1)


def _run_bcs_mode(argv: list[str]) -> None:
    ap = _common_parser("bcs")
    ap.add_argument("--z", type=str, default=None)
    ap.add_argument("--nmax", type=int, default=None)
    ap.add_argument("--side", choices=["A", "B"], default="A")
    ap.add_argument(
        "--resolution", nargs=3, metavar=("R", "NR", "NTHETA"), default=None
    )
    ns = ap.parse_args(argv)
    config = _load(ns, {"z": ns.z})
    from .bicoherent import bcs_state, eigen_residual, resolution_check
    from .quadrature import NonIntegrable
    from .report import emit_mapping
    from .weakstates import bump

    fam = config.family()
    z = config.z_value
    state = bcs_state(fam, ns.side, z, ns.nmax)
    res = eigen_residual(fam, ns.side, z, state.nmax, config.quadrature)

    def _num(value: float | NonIntegrable) -> Any:
        return "non-integrable" if isinstance(value, NonIntegrable) else value

    payload: dict[str, Any] = {
        "family": fam.label,
        "side": ns.side,
        "z": z,
        "nmax": state.nmax,
        "normalization": float(state.coefficients[0].real),
        "tail_bound": state.tail_bound,
        "eigen_residual": {
            "analytic_tail": res.analytic_tail,
            "boundary_weight": res.boundary_weight,
            "residual_norm": _num(res.residual_norm),
            "relative": _num(res.relative),
        },
    }
    if ns.resolution is not None:
        radius = float(ns.resolution[0])
        grid = (int(ns.resolution[1]), int(ns.resolution[2]))
        center, width = config.bump_center, config.bump_width
        v = bump(center, width)
        w = bump(center + 0.25 * width, 0.75 * width)
        out = resolution_check(
            v, w, fam, config.resolution_nmax, radius, grid, spec=config.quadrature
        )
        payload["resolution_value"] = out.value
        payload["reference_inner"] = out.reference
        payload["radial_oracle"] = out.radial_oracle
        payload["partial_sum"] = out.partial_sum
        payload["cutoff_tail"] = out.cutoff_tail
    _write(emit_mapping(payload, ns.format), ns.out)


def _parse_bump(raw: str) -> tuple[float, float]:
    parts = raw.split(",")
    if len(parts) != 2:
        raise ConfigError("bump", "expected CENTER,WIDTH")
    return float(parts[0]), float(parts[1])


def _run_weak_mode(argv: list[str]) -> None:
    ap = _common_parser("weak")
    ap.add_argument("--z", type=str, default=None)
    ap.add_argument("--bump", type=str, default=None)
    ap.add_argument("--nmax", type=int, default=None)
    ns = ap.parse_args(argv)
    extra: dict[str, Any] = {"z": ns.z}
    if ns.bump is not None:
        center, width = _parse_bump(ns.bump)
        extra["bump.center"] = center
        extra["bump.width"] = width
    config = _load(ns, extra)
    from .report import emit_mapping
    from .weakstates import (
        V0MembershipError,
        bump,
        functional_bound,
        v0_membership,
        weak_eigen_check,
        weak_functional,
    )

    fam = config.family()
    z = config.z_value
    v = bump(config.bump_center, config.bump_width)
    membership = v0_membership(v, fam)
    payload: dict[str, Any] = {"family": fam.label, "z": z, "member": membership.member}
    if not membership:
        payload["reason"] = membership.reason
        _write(emit_mapping(payload, ns.format), ns.out)
        sys.exit(1)
    try:
        eig = weak_eigen_check(fam, z, v, ns.nmax, config.quadrature)
    except V0MembershipError as exc:  # pragma: no cover - guarded above
        raise ConfigError("bump", str(exc)) from exc
    spec = config.quadrature
    f_value = weak_functional(fam, "f", z, v, eig.nmax, spec)
    g_value = weak_functional(fam, "g", z, v, eig.nmax, spec)
    f_bound = functional_bound(fam, "f", z, v, eig.nmax, spec)
    g_bound = functional_bound(fam, "g", z, v, eig.nmax, spec)
    payload.update(
        {
            "nmax": eig.nmax,
            "F_value": f_value,
            "G_value": g_value,
            "F_bound": f_bound,
            "G_bound": g_bound,
            "bound_slack": min(f_bound - abs(f_value), g_bound - abs(g_value)),
            "eigen_residual_A": eig.residual_f,
            "eigen_residual_B": eig.residual_g,
        }
    )
    _write(emit_mapping(payload, ns.format), ns.out)


def _run_simple_suite(suite: str, argv: list[str]) -> None:
    ap = _common_parser(suite)
    ns = ap.parse_args(argv)
    _run_suite_mode(suite, ns, _load(ns))


def _run_report_mode(argv: list[str]) -> None:
    ap = _common_parser("report")
    ap.add_argument("--suite", type=str, default="all")
    ns = ap.parse_args(argv)
    from .suites import SUITE_NAMES

    if ns.suite != "all" and ns.suite not in SUITE_NAMES:
        raise ConfigError("suite", f"unknown suite {ns.suite!r}")
    _run_suite_mode(ns.suite, ns, _load(ns))


def main() -> None:
    """Pbs main entrypoint."""
    if len(sys.argv) < 2 or sys.argv[1] in {"-h", "--help", "help"}:
        _print_usage()
        return
    cmd, rest = sys.argv[1], sys.argv[2:]
    try:
        if cmd == "poly":
            _run_poly_mode(rest)
        elif cmd == "states":
            _run_states_mode(rest)
        elif cmd == "biorth":
            _run_biorth_mode(rest)
        elif cmd == "bcs":
            _run_bcs_mode(rest)
        elif cmd == "weak":
            _run_weak_mode(rest)
        elif cmd == "report":
            _run_report_mode(rest)
        elif cmd in {"validate", "norms"}:
            _run_simple_suite(cmd, rest)
        else:
            print(f"Unknown command: {cmd}", file=sys.stderr)
            sys.exit(2)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(2)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(1)
