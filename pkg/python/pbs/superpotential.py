"""Pseudo-bosonic families built from a superpotential.

A family is fixed by ``k`` and an antiderivative ``s_A``. The ladder pair is
``A = d/dx + w_A`` and ``B = -d/dx + w_B``, with ``w_A = s_A'`` and
``w_A + w_B = x + k``, so that ``[A, B] = 1`` on smooth functions.
"""

# pylint: disable=too-many-instance-attributes,too-many-arguments

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Final, Literal

import numpy as np
import numpy.typing as npt

from .exprlang import (
    Expr,
    ExprLike,
    X,
    as_expr,
    branch_cut_exposed,
    conjugate,
    cos,
    differentiate,
    evaluate,
    exp,
)
from .report import CheckRecord, VerificationReport

if TYPE_CHECKING:
    from .states import StateFn

logger = logging.getLogger(__name__)

Side = Literal["A", "B"]
NormSplit = Literal["symmetric", "phi_unit"]
IntegrabilityClass = Literal[
    "exp-decay", "square-integrable-only", "non-square-integrable"
]

NORM_SPLITS: Final = ("symmetric", "phi_unit")
PRESET_NAMES: Final = ("bounded-cos", "asymmetric-k", "quartic-nonL2", "exponential")

# |k| beyond this makes e^{k^2} overflow double precision.
MAX_ABS_K: Final = 50.0

NORM_PRODUCT_TOL: Final = 1e-14

DEFAULT_SEED: Final = 20240101

# Probe ranges for the integrability heuristic.
_PROBE_INNER: Final = 10.0
_PROBE_OUTER: Final = 50.0
_DECAY_SLOPE_MIN: Final = 0.05
_LOG_GROWTH_MIN: Final = 0.55


class BoundedPhiRequiredError(ValueError):
    """Operation needs a family built from a bounded Phi."""


@dataclass(frozen=True, slots=True)
class PbsFamily:
    """Superpotential family with its normalization split."""

    label: str
    k: float
    s_a: Expr
    s_b: Expr
    w_a: Expr
    w_b: Expr
    n_phi: complex
    n_psi: complex
    norm_split: str = "symmetric"
    phi: Expr | None = None

    @property
    def norm_product(self) -> complex:
        """N_phi * conj(N_psi)."""
        return self.n_phi * self.n_psi.conjugate()

    def exponent(self, side: Side) -> Expr:
        """Exponent e such that the side's states carry exp(-e)."""
        if side == "A":
            return self.s_a
        if side == "B":
            return conjugate(self.s_b)
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")

    def scale(self, side: Side) -> complex:
        """Normalization constant of the side."""
        if side == "A":
            return self.n_phi
        if side == "B":
            return self.n_psi
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")


@dataclass(frozen=True, slots=True)
class HamiltonianData:
    """H1 = BA and H2 = AB as -d^2/dx^2 + q1 d/dx + V."""

    q1: Expr
    v1: Expr
    v2: Expr

    def level_shift_residual(self, grid: npt.ArrayLike) -> float:
        """max |V2 - V1 - 1| on grid."""
        diff = evaluate(self.v2, grid) - evaluate(self.v1, grid) - 1.0
        return float(np.max(np.abs(diff)))


def norm_product_target(k: float) -> float:
    """Value of N_phi conj(N_psi) that makes <Psi_0, phi_0> = 1."""
    return math.exp(-k * k / 2.0) / math.sqrt(2.0 * math.pi)


def _split_norms(k: float, norm_split: str) -> tuple[complex, complex]:
    target = norm_product_target(k)
    if norm_split == "symmetric":
        half = math.exp(-k * k / 4.0) / (2.0 * math.pi) ** 0.25
        return complex(half), complex(half)
    if norm_split == "phi_unit":
        return complex(1.0), complex(target)
    raise ValueError(f"norm_split must be one of {NORM_SPLITS}, got {norm_split!r}")


def _check_k(k: float) -> float:
    k = float(k)
    if not math.isfinite(k):
        raise ValueError("k must be finite")
    if abs(k) > MAX_ABS_K:
        raise ValueError(f"|k| must be <= {MAX_ABS_K}, got {k}")
    return k


def gaussian_exponent(k: float) -> Expr:
    """x^2/2 + k x, the sum s_A + s_B for every family."""
    return X**2 / 2 + k * X


def build_family(
    s_a: ExprLike,
    k: float,
    norm_split: str = "symmetric",
    label: str = "custom",
    phi: Expr | None = None,
) -> PbsFamily:
    """Family from an antiderivative s_A (deterministic tree construction)."""
    k = _check_k(k)
    s_a = as_expr(s_a)
    s_b = gaussian_exponent(k) - s_a
    w_a = differentiate(s_a)
    w_b = (X + k) - w_a
    n_phi, n_psi = _split_norms(k, norm_split)
    logger.debug("built family %s: s_A=%s k=%r", label, s_a, k)
    return PbsFamily(label, k, s_a, s_b, w_a, w_b, n_phi, n_psi, norm_split, phi)


def bounded_phi_family(
    phi: ExprLike,
    k: float,
    norm_split: str = "symmetric",
    label: str = "bounded-phi",
) -> PbsFamily:
    """s_A = x^2/4 + k x/2 + Phi, so w_A = x/2 + k/2 + Phi'."""
    k = _check_k(k)
    phi = as_expr(phi)
    s_a = X**2 / 4 + (k / 2) * X + phi
    return build_family(s_a, k, norm_split, label, phi)


def preset_family(
    name: str, k: float = 0.5, norm_split: str = "symmetric"
) -> PbsFamily:
    """Named reference families."""
    if name == "bounded-cos":
        return bounded_phi_family(cos(X), k, norm_split, label=name)
    if name == "asymmetric-k":
        return build_family(X**2 / 4, k, norm_split, label=name)
    if name == "quartic-nonL2":
        return build_family(X**2 / 2 + X**4, k, norm_split, label=name)
    if name == "exponential":
        return build_family(exp(X) + k * X, k, norm_split, label=name)
    raise ValueError(f"unknown preset {name!r}; expected one of {PRESET_NAMES}")


def sample_grid(
    seed: int = DEFAULT_SEED,
    lo: float = -20.0,
    hi: float = 20.0,
    n_cheb: int = 512,
    n_random: int = 16,
) -> npt.NDArray[np.float64]:
    """Chebyshev points on [lo, hi] plus seeded uniform points, sorted."""
    j = np.arange(n_cheb)
    cheb = 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos(np.pi * (j + 0.5) / n_cheb)
    rng = np.random.default_rng(seed)
    extra = rng.uniform(lo, hi, size=n_random)
    return np.sort(np.concatenate([cheb, extra]))


def hamiltonian_data(f: PbsFamily) -> HamiltonianData:
    """q1 = w_B - w_A, V1 = w_A w_B - w_A', V2 = w_A w_B + w_B'."""
    q1 = f.w_b - f.w_a
    v1 = f.w_a * f.w_b - differentiate(f.w_a)
    v2 = f.w_a * f.w_b + differentiate(f.w_b)
    return HamiltonianData(q1, v1, v2)


def vacuum(f: PbsFamily, side: Side) -> StateFn:
    """phi_0 (side A) or Psi_0 (side B)."""
    from .states import eigenstate  # pylint: disable=import-outside-toplevel

    return eigenstate(f, side, 0)


def _tail_class(re_s: npt.NDArray[np.float64], ax: npt.NDArray[np.float64]) -> str:
    slope = float(np.polyfit(ax, re_s, 1)[0])
    if slope >= _DECAY_SLOPE_MIN:
        return "exp-decay"
    far = ax >= 0.5 * _PROBE_OUTER
    growth = re_s[far] / np.log(ax[far])
    if float(np.min(growth)) > _LOG_GROWTH_MIN:
        return "square-integrable-only"
    return "non-square-integrable"


_CLASS_ORDER: Final = ("exp-decay", "square-integrable-only", "non-square-integrable")


def classify_integrability(f: PbsFamily) -> dict[Side, str]:
    """Heuristic decay class of |exp(-s)| per side, probed on 10 <= |x| <= 50."""
    tail = np.linspace(_PROBE_INNER, _PROBE_OUTER, 81)
    result: dict[Side, str] = {}
    side: Side
    for side in ("A", "B"):
        expo = f.exponent(side)
        classes = []
        for sign in (1.0, -1.0):
            re_s = evaluate(expo, sign * tail).real
            if not np.all(np.isfinite(re_s)):
                classes.append("non-square-integrable")
                continue
            classes.append(_tail_class(re_s, tail))
        result[side] = max(classes, key=_CLASS_ORDER.index)
    return result


def _relative(
    residual: npt.NDArray[np.complex128], scale: npt.NDArray[np.float64]
) -> float:
    return float(np.max(np.abs(residual) / (1.0 + scale)))


def validate_pbs(
    f: PbsFamily,
    samples: npt.ArrayLike | None = None,
    tolerance: float = 1e-10,
    norm_tolerance: float = NORM_PRODUCT_TOL,
) -> VerificationReport:
    """Check the defining identities of a family on sample points.

    Residuals are measured relative to ``1 + |largest term|`` at each point so
    exponentially growing superpotentials are judged at their own scale. The
    normalization product is judged against ``norm_tolerance``.
    """
    # pylint: disable=import-outside-toplevel,too-many-locals
    from .weakstates import TestFunction

    xs = sample_grid() if samples is None else np.asarray(samples, dtype=np.float64)
    w_a = evaluate(f.w_a, xs)
    w_b = evaluate(f.w_b, xs)
    u = xs + f.k
    constraint = _relative(w_a + w_b - u, np.abs(w_a) + np.abs(w_b) + np.abs(u))

    s_a = evaluate(f.s_a, xs)
    s_b = evaluate(f.s_b, xs)
    gauss = xs**2 / 2 + f.k * xs
    antiderivative = _relative(s_a + s_b - gauss, np.abs(s_a) + np.abs(s_b))

    lo, hi = float(np.min(xs)), float(np.max(xs))
    bump = TestFunction(0.5 * (lo + hi), 0.49 * (hi - lo))
    v = bump.values(xs)
    dv = bump.derivative(xs, 1)
    d2v = bump.derivative(xs, 2)
    dw_a = evaluate(differentiate(f.w_a), xs)
    dw_b = evaluate(differentiate(f.w_b), xs)
    # A B v = -v'' + (w_B - w_A) v' + (w_A w_B + w_B') v
    # B A v = -v'' + (w_B - w_A) v' + (w_A w_B - w_A') v
    ab = -d2v + (w_b - w_a) * dv + (w_a * w_b + dw_b) * v
    ba = -d2v + (w_b - w_a) * dv + (w_a * w_b - dw_a) * v
    term_scale = np.abs(d2v) + np.abs((w_b - w_a) * dv) + np.abs(w_a * w_b * v)
    commutator = _relative(ab - ba - v, term_scale)

    ham = hamiltonian_data(f)
    shift = evaluate(ham.v2, xs) - evaluate(ham.v1, xs) - 1.0
    level_shift = _relative(shift, np.abs(w_a * w_b))

    target = norm_product_target(f.k)
    norm_gap = abs(f.norm_product - target) / target

    checks = [
        CheckRecord.compare(
            "pbs.constraint", "w_A + w_B - (x + k)", constraint, 0.0, tolerance
        ),
        CheckRecord.compare(
            "pbs.antiderivative",
            "s_A + s_B - (x^2/2 + k x)",
            antiderivative,
            0.0,
            tolerance,
        ),
        CheckRecord.compare(
            "pbs.commutator",
            "([A, B] - 1) v on a smooth bump",
            commutator,
            0.0,
            tolerance,
        ),
        CheckRecord.compare(
            "pbs.level_shift", "V2 - V1 - 1", level_shift, 0.0, tolerance
        ),
        CheckRecord.compare(
            "pbs.norm_product",
            "relative gap of N_phi conj(N_psi) to its target",
            norm_gap,
            0.0,
            norm_tolerance,
        ),
    ]
    notes = []
    if branch_cut_exposed(f.s_a, xs) or branch_cut_exposed(f.w_a, xs):
        notes.append(f"{f.label}: sqrt/log branch cut reached on sample points")
    classes = classify_integrability(f)
    notes.append(
        f"{f.label}: integrability (heuristic) A={classes['A']} B={classes['B']}"
    )
    return VerificationReport(f"validate:{f.label}", tuple(checks), notes=tuple(notes))


@dataclass(frozen=True, slots=True)
class SupNormBounds:
    """Analytic and measured sup norms of rho_A and rho_B."""

    sup_a: float
    sup_b: float
    measured_a: float
    measured_b: float
    phi_min: float
    phi_max: float


def sup_norm_bounds(
    f: PbsFamily,
    phi_min: float | None = None,
    phi_max: float | None = None,
    grid: npt.ArrayLike | None = None,
) -> SupNormBounds:
    """||rho_A|| <= |N_phi|(2pi)^(1/4) e^(k^2/4 - m); ||rho_B|| uses e^(k^2/4 + M)."""
    if f.phi is None:
        raise BoundedPhiRequiredError(
            f"family {f.label!r} was not built from a bounded Phi"
        )
    xs = (
        np.linspace(-20.0, 20.0, 10001)
        if grid is None
        else np.asarray(grid, dtype=np.float64)
    )
    phi_vals = evaluate(f.phi, xs)
    if np.max(np.abs(phi_vals.imag)) > 1e-12:
        raise BoundedPhiRequiredError("Phi must be real on the real line")
    m = float(np.min(phi_vals.real)) if phi_min is None else float(phi_min)
    big_m = float(np.max(phi_vals.real)) if phi_max is None else float(phi_max)
    quarter = (2.0 * math.pi) ** 0.25
    sup_a = abs(f.n_phi) * quarter * math.exp(f.k**2 / 4.0 - m)
    sup_b = abs(f.n_psi) * quarter * math.exp(f.k**2 / 4.0 + big_m)

    from .states import factorize  # pylint: disable=import-outside-toplevel

    fac = factorize(f)
    measured_a = float(np.max(np.abs(evaluate(fac.rho_a, xs))))
    measured_b = float(np.max(np.abs(evaluate(fac.rho_b, xs))))
    return SupNormBounds(sup_a, sup_b, measured_a, measured_b, m, big_m)
