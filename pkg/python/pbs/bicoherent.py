"""Bi-coherent states, norm growth and the resolution of the identity."""

# pylint: disable=too-many-arguments,too-many-locals,too-many-instance-attributes

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Final

import numpy as np
import numpy.typing as npt
from scipy.special import gammainc, gammaincc, gammaln, logsumexp

from .exprlang import X, evaluate
from .polyengine import laguerre_neg_sq
from .quadrature import (
    DEFAULT_SPEC,
    CompactFunction,
    NonIntegrable,
    QuadratureSpec,
    gauss_legendre,
    inner_vector,
    l2_norm_sq,
    simpson_inner,
)
from .states import StateFn, apply_ladder, linear_combination
from .superpotential import PbsFamily, Side, sample_grid

logger = logging.getLogger(__name__)

MAX_NMAX: Final = 500
RESOLUTION_CAP: Final = 2000
_RADIAL_PANEL: Final = 6.0
_TREND_TOL: Final = 1e-8
DEFAULT_TAIL_TOL: Final = 1e-12

# log M_n and lim M_n / M_{n+1} for the declared profiles
_LogProfile = Callable[[npt.NDArray[np.float64]], npt.NDArray[np.float64]]
_M_PROFILES: Final[dict[str, tuple[_LogProfile, float]]] = {
    "constant": (lambda n: np.zeros_like(n), 1.0),
    "inv_eighth_root": (lambda n: -np.log(np.maximum(n, 1.0)) / 8.0, 1.0),
}


class TailBoundError(ValueError):
    """Truncation cap reached before the tail bound met its tolerance."""


class FamilyShapeError(ValueError):
    """Closed-form norms need the family s_A = x^2/4."""


def log_normalization(z: complex, nmax: int) -> float:
    """log N(|z|) with N = (sum_{n<=nmax} |z|^(2n)/n!)^(-1/2)."""
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    r = abs(z)
    if r == 0:
        return 0.0
    n = np.arange(nmax + 1, dtype=np.float64)
    return -0.5 * float(logsumexp(2.0 * n * math.log(r) - gammaln(n + 1)))


def normalization(z: complex, nmax: int) -> float:
    """N(|z|) of the truncated state; tends to exp(-|z|^2/2)."""
    return math.exp(log_normalization(z, nmax))


def tail_bound(z: complex, nmax: int) -> float:
    """|z|^(nmax+1) / sqrt((nmax+1)!)."""
    r = abs(z)
    if r == 0:
        return 0.0
    return math.exp((nmax + 1) * math.log(r) - 0.5 * float(gammaln(nmax + 2)))


def boundary_term(z: complex, nmax: int) -> float:
    """Truncation defect N(|z|) |z|^(nmax+1) / sqrt(nmax!) of the eigen equation."""
    r = abs(z)
    if r == 0:
        return 0.0
    log_val = log_normalization(z, nmax) + (nmax + 1) * math.log(r) - 0.5 * float(
        gammaln(nmax + 1)
    )
    return math.exp(log_val)


def auto_nmax(z: complex, tol: float = DEFAULT_TAIL_TOL, cap: int = MAX_NMAX) -> int:
    """Smallest nmax with tail bound and boundary term below tol."""
    for nmax in range(cap + 1):
        if tail_bound(z, nmax) < tol and boundary_term(z, nmax) < tol:
            return nmax
    raise TailBoundError(f"|z|={abs(z)!r} needs nmax > {cap} for tolerance {tol!r}")


@dataclass(frozen=True, slots=True)
class BcsState:
    """Truncated bi-coherent state N(|z|) sum z^n/sqrt(n!) state_n."""

    family: PbsFamily
    side: Side
    z: complex
    nmax: int
    state: StateFn
    tail_bound: float

    @property
    def coefficients(self) -> tuple[complex, ...]:
        """Expansion coefficients on the eigenstates."""
        return self.state.weights

    def values(self, x: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        """Pointwise values."""
        return self.state.values(x)


def bcs_coefficients(z: complex, nmax: int) -> tuple[complex, ...]:
    """N(|z|) z^n / sqrt(n!) for n = 0..nmax."""
    norm = normalization(z, nmax)
    coeffs = [complex(norm)]
    for n in range(1, nmax + 1):
        coeffs.append(coeffs[-1] * z / math.sqrt(n))
    return tuple(coeffs)


def bcs_state(
    f: PbsFamily,
    side: Side,
    z: complex,
    nmax: int | None = None,
    *,
    tol: float = DEFAULT_TAIL_TOL,
    auto_raise: bool = False,
    cap: int = MAX_NMAX,
) -> BcsState:
    """f(z) on side A or g(z) on side B, truncated at nmax.

    ``nmax=None`` picks the smallest admissible truncation; ``auto_raise``
    lifts an explicit nmax until the tail bound is met. A fixed nmax whose
    bound is not met is kept and its bound recorded.
    """
    z = complex(z)
    if nmax is None:
        nmax = auto_nmax(z, tol, cap)
    elif nmax < 0:
        raise ValueError("nmax must be >= 0")
    elif auto_raise and tail_bound(z, nmax) >= tol:
        nmax = max(nmax, auto_nmax(z, tol, cap))
    bound = tail_bound(z, nmax)
    if bound >= tol:
        logger.info(
            "bcs_state |z|=%g nmax=%d: tail bound %.3g above %.3g",
            abs(z),
            nmax,
            bound,
            tol,
        )
    state = StateFn(f, side, bcs_coefficients(z, nmax), f.scale(side), f.exponent(side))
    return BcsState(f, side, z, nmax, state, bound)


@dataclass(frozen=True, slots=True)
class EigenResidual:
    """Defect of a f(z) = z f(z) (or B-dagger g(z) = z g(z)) after truncation."""

    analytic_tail: float
    boundary_weight: float
    residual_norm: float | NonIntegrable
    state_norm: float | NonIntegrable

    @property
    def relative(self) -> float | NonIntegrable:
        """residual_norm / state_norm."""
        if isinstance(self.residual_norm, NonIntegrable) or isinstance(
            self.state_norm, NonIntegrable
        ):
            return self.residual_norm
        if self.state_norm == 0:
            return self.residual_norm
        return self.residual_norm / self.state_norm


def eigen_residual(
    f: PbsFamily,
    side: Side,
    z: complex,
    nmax: int | None = None,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> EigenResidual:
    """Exact coefficient residual plus its L2 norm where defined."""
    bcs = bcs_state(f, side, z, nmax)
    lowering = "A" if side == "A" else "Bdag"
    image = apply_ladder(f, lowering, bcs.state)
    residual = linear_combination([image, bcs.state], [1.0, -bcs.z])
    weights = residual.weights
    boundary_weight = abs(weights[bcs.nmax]) if len(weights) > bcs.nmax else 0.0
    res_sq = l2_norm_sq(residual, spec)
    state_sq = l2_norm_sq(bcs.state, spec)
    res_norm = res_sq if isinstance(res_sq, NonIntegrable) else math.sqrt(res_sq)
    state_norm = (
        state_sq if isinstance(state_sq, NonIntegrable) else math.sqrt(state_sq)
    )
    return EigenResidual(
        boundary_term(z, bcs.nmax), boundary_weight, res_norm, state_norm
    )


def _require_asymmetric(f: PbsFamily) -> None:
    xs = sample_grid()
    gap = evaluate(f.s_a - X**2 / 4, xs)
    if np.max(np.abs(gap) / (1.0 + xs**2)) > 1e-12:
        raise FamilyShapeError(f"family {f.label!r} is not s_A = x^2/4")


def log_norm_formula(f: PbsFamily, side: Side, n: int) -> float:
    """log ||phi_n|| or log ||Psi_n|| for s_A = x^2/4 (Laguerre closed form)."""
    _require_asymmetric(f)
    log_lag, _ = laguerre_neg_sq(n, f.k)
    log_sq = (
        2.0 * math.log(abs(f.scale(side))) + 0.5 * math.log(2.0 * math.pi) + log_lag
    )
    if side == "B":
        log_sq += 2.0 * f.k * f.k
    return 0.5 * log_sq


def norm_formula(f: PbsFamily, side: Side, n: int) -> float:
    """||phi_n|| (side A) or ||Psi_n|| (side B) for s_A = x^2/4."""
    return math.exp(log_norm_formula(f, side, n))


@dataclass(frozen=True, slots=True)
class AsymptoticRow:
    """Exact norm against its large-n asymptote."""

    n: int
    log_norm: float
    log_asymptote: float

    @property
    def ratio(self) -> float:
        """||state_n|| / asymptote."""
        return math.exp(self.log_norm - self.log_asymptote)

    @property
    def deviation(self) -> float:
        """|ratio - 1|."""
        return abs(math.expm1(self.log_norm - self.log_asymptote))


def asymptotic_check(
    k: float, n_list: Sequence[int], side: Side = "A"
) -> list[AsymptoticRow]:
    """Compare ||state_n|| with (2|k|)^(-1/4) e^(-k^2/4) e^(|k| sqrt n) n^(-1/8).

    Normalization constants are set to 1 on both sides; they cancel in the
    ratio. Side B carries an extra e^(k^2) on both quantities.
    """
    if k == 0:
        raise ValueError("the asymptotic form needs k != 0")
    rows = []
    ak = abs(k)
    side_shift = k * k if side == "B" else 0.0
    for n in n_list:
        if n < 1:
            raise ValueError("asymptotic rows need n >= 1")
        log_lag, _ = laguerre_neg_sq(n, k)
        log_norm = 0.5 * (0.5 * math.log(2.0 * math.pi) + log_lag) + side_shift
        log_asym = (
            -0.25 * math.log(2.0 * ak)
            - 0.25 * k * k
            + ak * math.sqrt(n)
            - math.log(n) / 8.0
            + side_shift
        )
        rows.append(AsymptoticRow(int(n), log_norm, log_asym))
    return rows


def deviation_slope(
    rows: Sequence[AsymptoticRow], n_lo: int = 100, n_hi: int = 1600
) -> float:
    """Slope of log|ratio - 1| against log n over n_lo..n_hi."""
    picked = [r for r in rows if n_lo <= r.n <= n_hi and r.deviation > 0]
    if len(picked) < 2:
        raise ValueError("need at least two rows in range")
    log_n = np.log([r.n for r in picked])
    log_dev = np.log([r.deviation for r in picked])
    return float(np.polyfit(log_n, log_dev, 1)[0])


@dataclass(frozen=True, slots=True)
class GrowthFit:
    """||state_n|| <= A r^n M_n fitted from a norm sequence."""

    a: float
    r: float
    m_profile: str
    m_limit: float
    rho: float
    certified: bool


def radius_estimate(
    norms: Sequence[float],
    alpha: str | Sequence[float] = "sqrt",
    m_profile: str = "auto",
    r: float | None = None,
    a: float | None = None,
) -> GrowthFit:
    """Fit growth constants and the convergence radius rho = alpha_bar min(1, M/r).

    With ``a`` given the bound is checked as stated; otherwise ``a`` is the
    tightest constant. With ``r`` absent, log r is the least-squares slope over
    the second half, and the fit is certified only when the excess over
    A r^n M_n has no rising trend on the last quarter.
    """
    values = np.asarray(norms, dtype=np.float64)
    if values.size < 32:
        raise ValueError("need at least 32 norms")
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise ValueError("norms must be finite and positive")
    if isinstance(alpha, str):
        if alpha != "sqrt":
            raise ValueError(f"unknown alpha sequence {alpha!r}")
        alpha_bar = math.inf
    else:
        alpha_arr = np.asarray(alpha, dtype=np.float64)
        alpha_bar = float(alpha_arr[-1])
    profiles = list(_M_PROFILES) if m_profile == "auto" else [m_profile]
    n = np.arange(values.size, dtype=np.float64)
    logs = np.log(values)
    best: GrowthFit | None = None
    for name in profiles:
        if name not in _M_PROFILES:
            raise ValueError(f"unknown M profile {name!r}")
        log_m, m_limit = _M_PROFILES[name]
        d = logs - log_m(n)
        half = values.size // 2
        cut = 3 * values.size // 4
        if r is None:
            slope, _ = np.polyfit(n[half:], d[half:], 1)
            log_r = max(0.0, float(slope))
        else:
            log_r = math.log(r)
        excess = d - n * log_r
        if a is None:
            a_fit = math.exp(float(np.max(excess)))
            # the envelope must have stopped rising over the last quarter
            trend = float(np.polyfit(n[cut:], excess[cut:], 1)[0])
            certified = trend <= _TREND_TOL * max(1.0, abs(log_r))
        else:
            a_fit = float(a)
            certified = bool(np.all(excess <= math.log(a_fit) + 1e-12))
        r_fit = math.exp(log_r)
        ratio = min(1.0, m_limit / r_fit)
        rho = math.inf if math.isinf(alpha_bar) else alpha_bar * ratio
        fit = GrowthFit(a_fit, r_fit, name, m_limit, rho, certified)
        if best is None or (fit.certified and not best.certified) or (
            fit.certified == best.certified and fit.a < best.a
        ):
            best = fit
    assert best is not None
    return best


def combined_radius(
    fit_phi: GrowthFit, fit_psi: GrowthFit, alpha_bar: float = math.inf
) -> float:
    """alpha_bar min(1, M_phi/r_phi, M_psi/r_psi)."""
    ratio = min(1.0, fit_phi.m_limit / fit_phi.r, fit_psi.m_limit / fit_psi.r)
    return math.inf if math.isinf(alpha_bar) else alpha_bar * ratio


@dataclass(frozen=True, slots=True)
class ResolutionResult:
    """Resolution-of-identity integral over |z| <= R with its oracles."""

    value: complex
    radial_oracle: complex
    partial_sum: complex
    reference: complex
    cutoff_tail: float
    nmax: int = 0
    radius: float = 0.0

    @property
    def cutoff_warning(self) -> bool:
        """Truncated radial measure differs from the plain partial sum."""
        return self.cutoff_tail > 1e-10

    @property
    def reference_gap(self) -> float:
        """|value - <v, w>|."""
        return abs(self.value - self.reference)


def _pairing_vectors(
    v: CompactFunction,
    w: CompactFunction,
    f: PbsFamily,
    nmax: int,
    ordering: str,
    spec: QuadratureSpec,
) -> tuple[npt.NDArray[np.complex128], npt.NDArray[np.complex128]]:
    """a_n, b_n with <v, g(z)><f(z), w> = N^2 sum a_n b_n |z|^(2n)/n! after angles."""
    if ordering == "psi_phi":
        return (
            inner_vector(v, f, "B", nmax, spec),
            np.conj(inner_vector(w, f, "A", nmax, spec)),
        )
    if ordering == "phi_psi":
        return (
            inner_vector(v, f, "A", nmax, spec),
            np.conj(inner_vector(w, f, "B", nmax, spec)),
        )
    raise ValueError(f"ordering must be 'psi_phi' or 'phi_psi', got {ordering!r}")


def resolution_check(
    v: CompactFunction,
    w: CompactFunction,
    f: PbsFamily,
    nmax: int = 25,
    radius: float = 6.0,
    grid: tuple[int, int] = (200, 128),
    ordering: str = "psi_phi",
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> ResolutionResult:
    """int <v, g(z)><f(z), w> dnu(z) (or the swapped ordering) on |z| <= radius.

    ``grid`` is (radial nodes per panel, angular nodes). Radial panels are at
    most ``_RADIAL_PANEL`` wide and the angular count is raised above nmax so
    distinct powers never alias.
    """
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    if not radius > 0:
        raise ValueError("radius must be > 0")
    a, b = _pairing_vectors(v, w, f, nmax, ordering, spec)
    n_r, n_theta = grid
    if n_theta <= nmax:
        n_theta = 1 << nmax.bit_length()
        logger.debug("angular nodes raised to %d for nmax=%d", n_theta, nmax)
    panels = max(1, math.ceil(radius / _RADIAL_PANEL))
    r, w_r = gauss_legendre(0.0, radius, n_r, panels)
    n = np.arange(nmax + 1, dtype=np.float64)
    # N(r) z^n / sqrt(n!) times the measure's N(r)^-1 e^(-r^2/2), kept below 1
    log_c = np.outer(np.log(r), n) - 0.5 * gammaln(n + 1)[None, :]
    c = np.exp(log_c - 0.5 * (r**2)[:, None])
    # rows: sum_n x_n e^(+i n theta) and sum_n y_n e^(-i n theta) on the angle grid
    left = n_theta * np.fft.ifft(c * a[None, :], n=n_theta, axis=1)
    right = np.fft.fft(c * b[None, :], n=n_theta, axis=1)
    # dnu = N(r)^-2 e^(-r^2) r dr dtheta / pi
    weights = (w_r * r / math.pi)[:, None] * (2.0 * math.pi / n_theta)
    value = complex(np.sum(weights * left * right))
    oracle = complex(np.sum(gammainc(n + 1, radius**2) * a * b))
    partial = complex(np.sum(a * b))
    cutoff_tail = abs(partial - oracle)
    if cutoff_tail > 1e-10:
        logger.warning(
            "radial cutoff R=%g leaves %.3g of the partial sum", radius, cutoff_tail
        )
    reference = simpson_inner(v, w)
    return ResolutionResult(
        value, oracle, partial, reference, cutoff_tail, nmax, float(radius)
    )


@dataclass(frozen=True, slots=True)
class ResolutionPlan:
    """Truncation and radius that keep the disc integral within tol of <v, w>."""

    nmax: int
    radius: float
    series_tail: float
    radial_tail: float
    converged: bool


def resolution_plan(
    v: CompactFunction,
    w: CompactFunction,
    f: PbsFamily,
    tol: float = 1e-6,
    spec: QuadratureSpec = DEFAULT_SPEC,
    cap: int = RESOLUTION_CAP,
) -> ResolutionPlan:
    """Size nmax from the pairing tail and R from the incomplete gamma weights.

    Both orderings are scanned to ``cap``; nmax is the first order after
    which sum |a_n b_n| stays below tol/4, and R^2 the first value where the
    weights 1 - P(n+1, R^2) leave less than tol/4 of the kept terms.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    products = np.zeros(cap + 1)
    for ordering in ("psi_phi", "phi_psi"):
        a, b = _pairing_vectors(v, w, f, cap, ordering, spec)
        products = np.maximum(products, np.abs(a * b))
    budget = 0.25 * tol
    # tails[m] = sum_{n > m} |a_n b_n| up to the cap
    tails = np.concatenate([np.cumsum(products[::-1])[::-1][1:], [0.0]])
    below = np.nonzero(tails <= budget)[0]
    nmax = int(below[0])
    converged = nmax < cap
    if not converged:
        logger.warning("pairing tail still %.3g at the cap %d", tails[-2], cap)
    kept = products[: nmax + 1]
    n = np.arange(nmax + 1, dtype=np.float64)
    r_sq = float(nmax + 1)
    while True:
        radial_tail = float(np.sum(gammaincc(n + 1, r_sq) * kept))
        if radial_tail <= budget:
            break
        r_sq += max(1.0, math.sqrt(r_sq) / 4.0)
    logger.debug(
        "resolution plan: nmax=%d R=%.4g tail=%.3g", nmax, math.sqrt(r_sq), tails[nmax]
    )
    return ResolutionPlan(
        nmax, math.sqrt(r_sq), float(tails[nmax]), radial_tail, converged
    )
