"""Verification suites: each returns a VerificationReport, run sequentially."""

# pylint: disable=too-many-locals,too-many-statements

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import replace
from typing import Final

import numpy as np

from .bicoherent import (
    asymptotic_check,
    bcs_state,
    combined_radius,
    deviation_slope,
    eigen_residual,
    log_norm_formula,
    normalization,
    radius_estimate,
    resolution_check,
    resolution_plan,
)
from .config import Config
from .polyengine import (
    hermite_closed_form,
    hermite_eval,
    laguerre_exact,
    laguerre_neg_sq,
    physicists_hermite,
    pn,
)
from .quadrature import (
    NON_INTEGRABLE,
    gauss_legendre,
    gram_matrix,
    l2_norm_sq,
    moment_check,
    node_doubling_gap,
    pair_inner,
)
from .report import CheckRecord, VerificationReport
from .states import (
    apply_hamiltonian,
    apply_ladder,
    apply_number,
    eigenstate,
    factorize,
    metric_residual,
    numeric_ladder_residual,
)
from .superpotential import (
    PbsFamily,
    preset_family,
    sample_grid,
    sup_norm_bounds,
    validate_pbs,
)
from .weakstates import (
    bump,
    continuity_probe,
    functional_bound,
    quasi_basis_convergence,
    v0_membership,
    weak_eigen_check,
    weak_functional,
)

logger = logging.getLogger(__name__)

SUITE_PRESETS: Final = ("bounded-cos", "asymmetric-k", "quartic-nonL2")
SUITE_NAMES: Final = ("validate", "poly", "states", "biorth", "norms", "bcs", "weak")

_POLY_NMAX: Final = 50
_LADDER_NMAX: Final = 30
_GRAM_NMAX: Final = 20
_ASYMPTOTIC_N: Final = 2000
_MOMENT_MAX: Final = 15


def _presets(config: Config) -> list[PbsFamily]:
    return [
        preset_family(name, config.k, config.norm_split) for name in SUITE_PRESETS
    ]


def _families(config: Config) -> list[PbsFamily]:
    return [config.family(), *_presets(config)]


def _max_abs(values: np.ndarray) -> float:
    return float(np.max(np.abs(values))) if np.size(values) else 0.0


def run_validate(config: Config) -> VerificationReport:
    """Defining identities of the configured family and the presets."""
    grid = sample_grid(config.seed)
    tol = config.tolerance("identity")
    report = VerificationReport("validate", ())
    checks = []
    for fam in _families(config):
        sub = validate_pbs(
            fam, grid, tol, norm_tolerance=config.tolerance("norm_product")
        )
        renamed = tuple(
            replace(c, check_id=f"validate.{fam.label}.{c.check_id.split('.', 1)[1]}")
            for c in sub.checks
        )
        report = report.merged(
            VerificationReport("validate", renamed, notes=sub.notes)
        )
        vac_a = eigenstate(fam, "A", 0)
        lowered = apply_ladder(fam, "A", vac_a)
        checks.append(
            CheckRecord.flag(
                f"validate.{fam.label}.vacuum_annihilated",
                "A phi_0 = 0 exactly",
                lowered.is_zero,
            )
        )
        checks.append(
            CheckRecord.compare(
                f"validate.{fam.label}.vacuum_pairing",
                "<Psi_0, phi_0> = 1",
                abs(pair_inner(eigenstate(fam, "B", 0), vac_a, config.quadrature) - 1),
                0.0,
                config.tolerance("biorth"),
            )
        )
    return report.merged(VerificationReport("validate", tuple(checks)))


def run_poly(config: Config) -> VerificationReport:
    """Exact recursion identities, Hermite evaluation, Laguerre values."""
    checks = []
    closed_ok = all(pn(n) == hermite_closed_form(n) for n in range(_POLY_NMAX + 1))
    checks.append(
        CheckRecord.flag(
            "poly.closed_form", f"P_n equals He_n for n <= {_POLY_NMAX}", closed_ok
        )
    )
    lower_ok = all(
        pn(n).derivative() == pn(n - 1).scale(n) for n in range(1, _POLY_NMAX + 1)
    )
    checks.append(CheckRecord.flag("poly.lowering", "P_n' = n P_{n-1}", lower_ok))
    raise_ok = all(pn(n).raise_() == pn(n + 1) for n in range(_POLY_NMAX))
    checks.append(CheckRecord.flag("poly.raising", "u P_n - P_n' = P_{n+1}", raise_ok))
    comm_ok = all(
        pn(n).raise_().lower() - pn(n).lower().raise_() == pn(n)
        for n in range(_POLY_NMAX + 1)
    )
    checks.append(CheckRecord.flag("poly.commutator", "(AB - BA) P_n = P_n", comm_ok))

    ys = np.linspace(-5.0, 5.0, 101)
    worst = 0.0
    for n in range(31):
        exact = physicists_hermite(n)
        numeric = hermite_eval(n, ys)
        reference = exact.evaluate(ys)
        magnitude = sum(
            abs(float(c)) * np.abs(ys) ** j for j, c in enumerate(exact.coefficients)
        )
        worst = max(worst, _max_abs((numeric - reference) / (1.0 + magnitude)))
    checks.append(
        CheckRecord.compare(
            "poly.hermite_eval", "recurrence H_n against closed form", worst, 0.0, 1e-10
        )
    )
    lag = math.exp(laguerre_neg_sq(2, 1.0)[0])
    checks.append(
        CheckRecord.compare(
            "poly.laguerre_small",
            "L_2(-1) = 7/2",
            lag,
            float(laguerre_exact(2, -1)),
            1e-14,
        )
    )
    log_big, _ = laguerre_neg_sq(5000, config.k)
    checks.append(
        CheckRecord.flag(
            "poly.laguerre_large", "log L_5000(-k^2) finite", math.isfinite(log_big)
        )
    )
    return VerificationReport("poly", tuple(checks))


def run_states(config: Config) -> VerificationReport:
    """Ladder action, factorization, metric and sup-norm bounds."""
    grid = sample_grid(config.seed)
    checks = []
    notes = []
    fam = config.family()
    ladder_ok = True
    number_ok = True
    ham_ok = True
    for n in range(_LADDER_NMAX + 1):
        phi_n = eigenstate(fam, "A", n)
        psi_n = eigenstate(fam, "B", n)
        up = apply_ladder(fam, "B", phi_n)
        ladder_ok &= up.weights[-1] == math.sqrt(n + 1) and up.n == n + 1
        up_b = apply_ladder(fam, "Adag", psi_n)
        ladder_ok &= up_b.weights[-1] == math.sqrt(n + 1) and up_b.n == n + 1
        if n:
            down = apply_ladder(fam, "A", phi_n)
            ladder_ok &= down.weights[-1] == math.sqrt(n) and down.n == n - 1
        num = apply_number(fam, phi_n)
        number_ok &= (num.is_zero and n == 0) or (num.weights[-1] == n and num.n == n)
        h2 = apply_hamiltonian(fam, "H2", psi_n)
        ham_ok &= h2.weights[-1] == n + 1 and h2.n == n
    checks.append(
        CheckRecord.flag(
            "states.ladder", "B phi_n = sqrt(n+1) phi_{n+1} exactly", ladder_ok
        )
    )
    checks.append(
        CheckRecord.flag("states.number", "N phi_n = n phi_n exactly", number_ok)
    )
    checks.append(
        CheckRecord.flag("states.hamiltonian", "H2 Psi_n = (n+1) Psi_n", ham_ok)
    )

    numeric = max(
        numeric_ladder_residual(fam, op, eigenstate(fam, side, n), grid)
        for n in (0, 3, 7)
        for op, side in (("A", "A"), ("B", "A"), ("Adag", "B"), ("Bdag", "B"))
    )
    checks.append(
        CheckRecord.compare(
            "states.ladder_numeric",
            "exact ladder image against finite differences",
            numeric,
            0.0,
            1e-6,
        )
    )

    fac = factorize(fam)
    fac_worst = max(fac.residual(s, n, grid) for n in range(16) for s in ("A", "B"))
    checks.append(
        CheckRecord.compare(
            "states.factorization",
            "phi_n = c_n rho_A and Psi_n = c_n rho_B",
            fac_worst,
            0.0,
            config.tolerance("factorization"),
        )
    )
    checks.append(
        CheckRecord.compare(
            "states.reciprocity",
            "rho_A conj(rho_B) = 1",
            fac.reciprocity_residual(grid),
            0.0,
            config.tolerance("factorization"),
        )
    )
    metric = metric_residual(fam, 10, grid)
    checks.append(
        CheckRecord.compare(
            "states.metric",
            "S Psi_n = phi_n",
            None if metric.division_by_zero else metric.max_residual,
            0.0,
            config.tolerance("metric"),
        )
    )

    bounded = preset_family("bounded-cos", config.k, config.norm_split)
    sup = sup_norm_bounds(bounded)
    checks.append(
        CheckRecord.flag(
            "states.sup_norm",
            "grid sup of rho_A, rho_B below analytic bounds",
            sup.measured_a <= sup.sup_a + 1e-9
            and sup.measured_b <= sup.sup_b + 1e-9,
        )
    )
    notes.append(
        f"bounded-cos: sup rho_A {sup.measured_a:.6g} <= {sup.sup_a:.6g}, "
        f"sup rho_B {sup.measured_b:.6g} <= {sup.sup_b:.6g}"
    )
    return VerificationReport("states", tuple(checks), notes=tuple(notes))


def run_biorth(config: Config) -> VerificationReport:
    """Gram matrices of the presets and their family independence."""
    checks = []
    spec = config.quadrature
    grams = {}
    for fam in _presets(config):
        gram = gram_matrix(fam, _GRAM_NMAX, spec)
        grams[fam.label] = gram
        checks.append(
            CheckRecord.compare(
                f"biorth.{fam.label}.identity",
                f"max |<Psi_m, phi_n> - delta| for m, n <= {_GRAM_NMAX}",
                _max_abs(gram - np.eye(_GRAM_NMAX + 1)),
                0.0,
                config.tolerance("biorth"),
            )
        )
    labels = list(grams)
    spread = max(_max_abs(grams[a] - grams[labels[0]]) for a in labels[1:])
    checks.append(
        CheckRecord.compare(
            "biorth.family_independence",
            "Gram matrix identical across superpotentials",
            spread,
            0.0,
            config.tolerance("family_independence"),
        )
    )
    fam = config.family()
    psi_top = eigenstate(fam, "B", _GRAM_NMAX)
    phi_top = eigenstate(fam, "A", _GRAM_NMAX)
    gap = node_doubling_gap(lambda s: pair_inner(psi_top, phi_top, s), spec)
    checks.append(
        CheckRecord.compare(
            "biorth.node_doubling",
            "pairing stable under node doubling",
            gap,
            0.0,
            spec.tolerance,
        )
    )
    return VerificationReport("biorth", tuple(checks))


def run_norms(config: Config) -> VerificationReport:
    """Closed-form norms, asymptotics, moments and growth radii."""
    checks = []
    notes = []
    spec = config.quadrature
    asym = preset_family("asymmetric-k", config.k, config.norm_split)
    worst = 0.0
    norms_a = []
    for n in range(config.nmax + 1):
        for side in ("A", "B"):
            measured = l2_norm_sq(eigenstate(asym, side, n), spec)
            if measured is NON_INTEGRABLE:
                worst = math.inf
                continue
            formula = math.exp(2.0 * log_norm_formula(asym, side, n))
            worst = max(worst, abs(float(measured) - formula) / formula)
            if side == "A":
                norms_a.append(math.sqrt(float(measured)))
    checks.append(
        CheckRecord.compare(
            "norms.closed_form",
            f"quadrature norms against Laguerre closed form, n <= {config.nmax}",
            worst,
            0.0,
            config.tolerance("norm_formula"),
        )
    )

    if config.k != 0:
        geometric = np.geomspace(100, _ASYMPTOTIC_N, 24).astype(int)
        ns = [int(n) for n in np.unique(geometric)]
        rows = asymptotic_check(config.k, ns)
        last = rows[-1]
        checks.append(
            CheckRecord.compare(
                "norms.asymptotic_ratio",
                f"||phi_n|| / asymptote at n = {last.n}",
                last.ratio,
                1.0,
                config.tolerance("asymptotic"),
            )
        )
        checks.append(
            CheckRecord.compare(
                "norms.asymptotic_slope",
                "log-log slope of |ratio - 1| over 100..1600",
                deviation_slope(rows),
                -0.5,
                config.tolerance("asymptotic_slope"),
            )
        )
    else:
        notes.append("k = 0: asymptotic form undefined, skipped")

    moments = max(
        moment_check(j, spec).relative_error for j in range(_MOMENT_MAX + 1)
    )
    checks.append(
        CheckRecord.compare(
            "norms.moments",
            f"radial moments of the resolution measure, order <= {_MOMENT_MAX}",
            moments,
            0.0,
            config.tolerance("moment"),
        )
    )

    quartic = preset_family("quartic-nonL2", config.k, config.norm_split)
    flagged = l2_norm_sq(eigenstate(quartic, "B", 0), spec) is NON_INTEGRABLE
    checks.append(
        CheckRecord.flag(
            "norms.non_integrable", "quartic Psi_0 flagged non-integrable", flagged
        )
    )

    if config.k != 0 and len(norms_a) >= 32:
        r = math.exp(abs(config.k))
        fit_a = radius_estimate(norms_a, m_profile="inv_eighth_root", r=r)
        notes.append(
            f"asymmetric-k growth: A={fit_a.a:.6g} r={fit_a.r:.6g} "
            f"M={fit_a.m_profile} rho={fit_a.rho}"
        )
        checks.append(
            CheckRecord.compare(
                "norms.radius_asymmetric",
                "M/r for asymmetric family equals e^(-|k|)",
                fit_a.m_limit / fit_a.r,
                math.exp(-abs(config.k)),
                1e-12,
            )
        )
    bounded = preset_family("bounded-cos", config.k, config.norm_split)
    sup = sup_norm_bounds(bounded)
    bounded_norms = []
    for n in range(max(config.nmax, 31) + 1):
        measured = l2_norm_sq(eigenstate(bounded, "A", n), spec)
        bounded_norms.append(
            math.inf if measured is NON_INTEGRABLE else math.sqrt(float(measured))
        )
    if all(math.isfinite(v) for v in bounded_norms):
        fit_phi = radius_estimate(
            bounded_norms, m_profile="constant", r=1.0, a=sup.sup_a
        )
        fit_psi = replace(fit_phi, a=sup.sup_b)
        checks.append(
            CheckRecord.flag(
                "norms.radius_bounded",
                "bounded-cos: ||phi_n|| <= ||rho_A|| with r = 1",
                fit_phi.certified,
            )
        )
        notes.append(f"bounded-cos radius: {combined_radius(fit_phi, fit_psi)}")
    else:
        checks.append(
            CheckRecord.flag("norms.radius_bounded", "bounded-cos norms finite", False)
        )
    return VerificationReport("norms", tuple(checks), notes=tuple(notes))


def run_bcs(config: Config) -> VerificationReport:
    """Bi-coherent normalization, eigen residuals and resolution of the identity."""
    checks = []
    notes = []
    spec = config.quadrature
    asym = preset_family("asymmetric-k", config.k, config.norm_split)

    worst_norm = 0.0
    for r in np.linspace(0.0, 3.0, 13):
        worst_norm = max(
            worst_norm, abs(normalization(r, 80) - math.exp(-(r**2) / 2.0))
        )
    checks.append(
        CheckRecord.compare(
            "bcs.normalization",
            "N(|z|) against exp(-|z|^2/2), nmax = 80",
            worst_norm,
            0.0,
            config.tolerance("normalization"),
        )
    )

    analytic = 0.0
    numeric = 0.0
    for z in (config.z_value, 0.5, 1j, 1.5 - 1.5j, 2.0):
        for side in ("A", "B"):
            res = eigen_residual(asym, side, z, None, spec)
            analytic = max(analytic, abs(res.boundary_weight - res.analytic_tail))
            rel = res.relative
            numeric = max(numeric, math.inf if rel is NON_INTEGRABLE else float(rel))
    checks.append(
        CheckRecord.compare(
            "bcs.eigen_boundary",
            "residual coefficient equals N|z|^(M+1)/sqrt(M!)",
            analytic,
            0.0,
            config.tolerance("eigen_analytic"),
        )
    )
    checks.append(
        CheckRecord.compare(
            "bcs.eigen_numeric",
            "relative L2 residual of A f(z) - z f(z)",
            numeric,
            0.0,
            config.tolerance("eigen_numeric"),
        )
    )

    v = bump(config.bump_center, config.bump_width)
    w = bump(config.bump_center + 0.25 * config.bump_width, 0.75 * config.bump_width)
    disc = (config.resolution_nmax, config.resolution_radius, config.resolution_grid)
    fixed = resolution_check(v, w, asym, *disc, "psi_phi", spec)
    checks.append(
        CheckRecord.compare(
            "bcs.resolution_oracle",
            "disc integral against radially weighted partial sum",
            abs(fixed.value - fixed.radial_oracle),
            0.0,
            config.tolerance("resolution_oracle"),
        )
    )
    if fixed.cutoff_warning:
        notes.append(
            f"R={fixed.radius:g}, nmax={fixed.nmax}: radial cutoff leaves "
            f"{fixed.cutoff_tail:.3g} of the partial sum"
        )
    notes.append(
        f"R={fixed.radius:g}, nmax={fixed.nmax}: |integral - <v, w>| = "
        f"{fixed.reference_gap:.3g}"
    )

    tol = config.tolerance("resolution")
    for pair, (left, right) in (("pair", (v, w)), ("norm", (v, v))):
        plan = resolution_plan(left, right, asym, tol, spec)
        notes.append(
            f"resolution {pair}: nmax={plan.nmax} R={plan.radius:.4g} "
            f"series tail {plan.series_tail:.3g}"
        )
        values = {}
        for ordering in ("psi_phi", "phi_psi"):
            res = resolution_check(
                left,
                right,
                asym,
                plan.nmax,
                plan.radius,
                config.resolution_grid,
                ordering,
                spec,
            )
            values[ordering] = res.value
            checks.append(
                CheckRecord.compare(
                    f"bcs.resolution_{pair}_{ordering}",
                    f"disc integral ({ordering}) against <v, w>, "
                    f"nmax = {plan.nmax}, R = {plan.radius:.4g}",
                    res.reference_gap,
                    0.0,
                    tol,
                )
            )
        checks.append(
            CheckRecord.compare(
                f"bcs.resolution_{pair}_orderings",
                "both orderings give the same integral",
                abs(values["psi_phi"] - values["phi_psi"]),
                0.0,
                2.0 * tol,
            )
        )
    return VerificationReport("bcs", tuple(checks), notes=tuple(notes))


def run_weak(config: Config) -> VerificationReport:
    """Weak states on the non-square-integrable quartic family."""
    checks = []
    notes = []
    spec = config.quadrature
    quartic = preset_family("quartic-nonL2", config.k, config.norm_split)
    z = config.z_value
    v = bump(0.0, 1.5)
    w = bump(0.3, 1.2)

    checks.append(
        CheckRecord.flag(
            "weak.v0_membership",
            "bump lies in the domain",
            bool(v0_membership(v, quartic)),
        )
    )

    eig = weak_eigen_check(quartic, z, v, None, spec)
    checks.append(
        CheckRecord.compare(
            "weak.eigen_f",
            "<A-dagger v, f(z)> - z <v, f(z)>",
            eig.residual_f,
            0.0,
            config.tolerance("weak_eigen"),
        )
    )
    checks.append(
        CheckRecord.compare(
            "weak.eigen_g",
            "<B v, g(z)> - z <v, g(z)>",
            eig.residual_g,
            0.0,
            config.tolerance("weak_eigen"),
        )
    )

    quasi_tol = config.tolerance("quasi_basis")
    conv = quasi_basis_convergence(v, w, quartic, quasi_tol, spec=spec)
    checks.append(
        CheckRecord.compare(
            "weak.quasi_basis",
            "sum_(n<=N) <v, phi_n><Psi_n, w> stays within tol of <v, w> "
            f"from N = {conv.settled_at}",
            conv.worst_after,
            0.0,
            quasi_tol,
        )
    )
    checks.append(
        CheckRecord.flag(
            "weak.quasi_basis_decay",
            "partial-sum error at N = 60 below the error at N = 10",
            conv.errors[60] < conv.errors[10],
        )
    )
    notes.append(
        "quasi-basis errors by N: "
        + ", ".join(f"{n}:{conv.errors[n]:.3g}" for n in (10, 20, 40, 60, 200, 1000))
        + f"; settled at N = {conv.settled_at}"
    )

    asym = preset_family("asymmetric-k", config.k, config.norm_split)
    nmax = 40
    nodes, weights = gauss_legendre(
        *v.support, spec.legendre_points, spec.legendre_panels
    )
    truncated = bcs_state(asym, "A", z, nmax).values(nodes)
    direct = complex(np.sum(weights * np.conj(truncated) * v.values(nodes)))
    functional = weak_functional(asym, "f", z, v, nmax, spec)
    checks.append(
        CheckRecord.compare(
            "weak.functional_pairing",
            "F(z)[v] equals the direct pairing of the truncated state",
            abs(functional - direct),
            0.0,
            config.tolerance("weak_pairing"),
        )
    )

    scales = [0.5**j for j in range(8)] + [0.0]
    rows = continuity_probe(quartic, z, v, scales, "f", None, spec)
    ratios = [
        rows[j + 1].value / rows[j].value
        for j in range(len(rows) - 2)
        if rows[j].value > 0
    ]
    halving = max(abs(r - 0.5) / 0.5 for r in ratios) if ratios else math.inf
    checks.append(
        CheckRecord.compare(
            "weak.continuity",
            "|F[v_k] - F[v]| halves with the perturbation",
            halving,
            0.0,
            config.tolerance("continuity"),
        )
    )
    checks.append(
        CheckRecord.flag(
            "weak.continuity_bound",
            "perturbation within ||conj(rho_A) p|| N sum |z|^n / sqrt(n!)",
            all(r.value <= r.bound * (1.0 + 1e-9) + 1e-300 for r in rows),
        )
    )
    bound = functional_bound(quartic, "f", z, v, eig.nmax, spec)
    value = abs(weak_functional(quartic, "f", z, v, eig.nmax, spec))
    checks.append(
        CheckRecord.flag(
            "weak.functional_bound",
            "|F(z)[v]| within its bound",
            value <= bound * (1.0 + 1e-9),
        )
    )
    return VerificationReport("weak", tuple(checks), notes=tuple(notes))


_RUNNERS: Final[dict[str, Callable[[Config], VerificationReport]]] = {
    "validate": run_validate,
    "poly": run_poly,
    "states": run_states,
    "biorth": run_biorth,
    "norms": run_norms,
    "bcs": run_bcs,
    "weak": run_weak,
}


def run_suite(config: Config, suite: str = "all") -> VerificationReport:
    """Run one suite (or all, in a fixed order) and attach the config echo."""
    names = SUITE_NAMES if suite == "all" else (suite,)
    report = VerificationReport(suite, ())
    for name in names:
        if name not in _RUNNERS:
            raise ValueError(
                f"unknown suite {name!r}; expected one of {SUITE_NAMES} or 'all'"
            )
        logger.info("running suite %s", name)
        report = report.merged(_RUNNERS[name](config), suite=suite)
    return report.with_context(config.to_dict())
