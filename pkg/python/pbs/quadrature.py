"""Quadrature for pairings, norms and test-function integrals.

Biorthogonal pairings reduce exactly to Gauss-Hermite sums because
``conj(Psi_m) phi_n`` carries the Gaussian ``exp(-x^2/2 - k x)`` for every
family. Norms use Gauss-Hermite when the exponent is exactly quadratic and
composite Gauss-Legendre over the significant window otherwise.
"""

# pylint: disable=too-many-locals

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Final, Protocol

import numpy as np
import numpy.typing as npt
from scipy.special import roots_hermite, roots_laguerre, roots_legendre

from .exprlang import evaluate
from .polyengine import pn_values
from .states import (
    FamilyMismatchError,
    SideMismatchError,
    StateFn,
    factorize,
    oscillator_values,
)
from .superpotential import PbsFamily, Side, classify_integrability

logger = logging.getLogger(__name__)

MIN_NODES: Final = 16

# Window search for non-Gaussian weights.
_PROBE: Final = np.linspace(-60.0, 60.0, 12001)
_WINDOW_DROP: Final = 80.0
_PANEL_WIDTH: Final = 2.0
_DEGREE_PER_PANEL: Final = 64


class NonIntegrable:
    """Sentinel for states that are not square integrable."""

    _instance: NonIntegrable | None = None

    def __new__(cls) -> NonIntegrable:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NON_INTEGRABLE"

    def __bool__(self) -> bool:
        return False


NON_INTEGRABLE: Final = NonIntegrable()


@dataclass(frozen=True, slots=True)
class QuadratureSpec:
    """Node counts and tolerance for every quadrature in the package."""

    hermite_points: int = 200
    legendre_points: int = 128
    tolerance: float = 1e-10
    laguerre_points: int = 64
    legendre_panels: int = 8

    def __post_init__(self) -> None:
        for name in ("hermite_points", "legendre_points", "laguerre_points"):
            if getattr(self, name) < MIN_NODES:
                raise ValueError(f"{name} must be >= {MIN_NODES}")
        if self.legendre_panels < 1:
            raise ValueError("legendre_panels must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")

    def doubled(self) -> QuadratureSpec:
        """Same spec with every node count doubled."""
        return replace(
            self,
            hermite_points=2 * self.hermite_points,
            legendre_points=2 * self.legendre_points,
            laguerre_points=2 * self.laguerre_points,
        )


DEFAULT_SPEC: Final = QuadratureSpec()


class CompactFunction(Protocol):
    """Function with compact support on the real line."""

    @property
    def support(self) -> tuple[float, float]: ...

    def values(self, x: npt.ArrayLike) -> npt.NDArray[np.complex128]: ...


@lru_cache(maxsize=32)
def _hermite_rule(n: int) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    x, w = roots_hermite(n)
    return np.asarray(x), np.asarray(w)


@lru_cache(maxsize=32)
def _legendre_rule(n: int) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    x, w = roots_legendre(n)
    return np.asarray(x), np.asarray(w)


@lru_cache(maxsize=8)
def _laguerre_rule(n: int) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    x, w = roots_laguerre(n)
    return np.asarray(x), np.asarray(w)


def gauss_legendre(
    a: float, b: float, n: int, panels: int = 1
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    t, w = _legendre_rule(n)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _gaussian_prefactor(scale_1: complex, scale_2: complex, k: float) -> complex:
    """conj(scale_1) scale_2 e^(k^2/2) sqrt(2), combined in log space."""
    if scale_1 == 0 or scale_2 == 0:
        return 0j
    log_mag = math.log(abs(scale_1)) + math.log(abs(scale_2)) + 0.5 * k * k
    phase = (scale_1.conjugate() * scale_2) / (abs(scale_1) * abs(scale_2))
    return phase * math.exp(log_mag) * math.sqrt(2.0)


def pair_inner(
    s1: StateFn, s2: StateFn, spec: QuadratureSpec = DEFAULT_SPEC
) -> complex:
    """<s1, s2> for s1 on side B and s2 on side A (Gauss-Hermite, exact in degree)."""
    if s1.family != s2.family:
        raise FamilyMismatchError("pairing states of different families")
    if s1.side != "B" or s2.side != "A":
        raise SideMismatchError("pair_inner expects a side-B bra and a side-A ket")
    if not s1.weights or not s2.weights:
        return 0j
    y, w = _hermite_rule(spec.hermite_points)
    u = math.sqrt(2.0) * y
    m = max(len(s1.weights), len(s2.weights)) - 1
    basis = pn_values(m, u)
    bra = np.tensordot(np.asarray(s1.weights), basis[: len(s1.weights)], axes=1)
    ket = np.tensordot(np.asarray(s2.weights), basis[: len(s2.weights)], axes=1)
    total = np.sum(w * np.conj(bra) * ket)
    return complex(_gaussian_prefactor(s1.scale, s2.scale, s1.family.k) * total)


def gram_matrix(
    f: PbsFamily, nmax: int, spec: QuadratureSpec = DEFAULT_SPEC
) -> npt.NDArray[np.complex128]:
    """G[m, n] = <Psi_m, phi_n> for m, n <= nmax."""
    y, w = _hermite_rule(spec.hermite_points)
    basis = pn_values(nmax, math.sqrt(2.0) * y)
    gram = (np.conj(basis) * w) @ basis.T
    return _gaussian_prefactor(f.n_psi, f.n_phi, f.k) * gram


def node_doubling_gap(
    fn: Callable[[QuadratureSpec], complex], spec: QuadratureSpec = DEFAULT_SPEC
) -> float:
    """|fn(spec) - fn(doubled spec)|."""
    return abs(fn(spec) - fn(spec.doubled()))


def _support_rule(
    support: tuple[float, float], spec: QuadratureSpec, degree: int = 0
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Composite rule on a support; panels grow with the polynomial degree."""
    lo, hi = support
    panels = max(spec.legendre_panels, math.ceil(degree / _DEGREE_PER_PANEL))
    return gauss_legendre(lo, hi, spec.legendre_points, panels)


def test_inner(
    v: CompactFunction, s: StateFn, spec: QuadratureSpec = DEFAULT_SPEC
) -> complex:
    """<v, s> over the support of v."""
    x, w = _support_rule(v.support, spec)
    return complex(np.sum(w * np.conj(v.values(x)) * s.values(x)))


test_inner.__test__ = False  # type: ignore[attr-defined]


def inner_vector(
    v: CompactFunction,
    f: PbsFamily,
    side: Side,
    nmax: int,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> npt.NDArray[np.complex128]:
    """<v, phi_n> (side A) or <v, Psi_n> (side B) for n = 0..nmax."""
    x, w = _support_rule(v.support, spec, nmax)
    with np.errstate(over="ignore", under="ignore"):
        envelope = f.scale(side) * np.exp(-evaluate(f.exponent(side), x))
    weighted = w * np.conj(v.values(x)) * envelope
    return pn_values(nmax, x + f.k) @ weighted


def bump_inner(
    v: CompactFunction, g: CompactFunction, spec: QuadratureSpec = DEFAULT_SPEC
) -> complex:
    """<v, g> over the intersection of supports."""
    lo = max(v.support[0], g.support[0])
    hi = min(v.support[1], g.support[1])
    if hi <= lo:
        return 0j
    x, w = _support_rule((lo, hi), spec)
    return complex(np.sum(w * np.conj(v.values(x)) * g.values(x)))


def oscillator_coefficients(
    v: CompactFunction,
    f: PbsFamily,
    side: Side,
    nmax: int,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> npt.NDArray[np.complex128]:
    """<conj(rho) v, c_n> for the side's rho; equals inner_vector by factorization."""
    fac = factorize(f)
    rho = fac.rho_a if side == "A" else fac.rho_b
    x, w = _support_rule(v.support, spec, nmax)
    with np.errstate(over="ignore", under="ignore"):
        rho_vals = evaluate(rho, x)
    weighted = w * rho_vals * np.conj(v.values(x))
    return oscillator_values(nmax, x, f.k) @ weighted


def adaptive_simpson(
    fn: Callable[[npt.NDArray[np.float64]], npt.ArrayLike],
    a: float,
    b: float,
    tol: float = 1e-12,
    max_depth: int = 40,
) -> complex:
    """Adaptive Simpson integral of fn over [a, b] with an explicit stack."""

    def at(x: float) -> complex:
        return complex(np.asarray(fn(np.array([x])), dtype=np.complex128)[0])

    fa, fm, fb = at(a), at(0.5 * (a + b)), at(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    total = 0j
    while stack:
        lo, hi, f_lo, f_mid, f_hi, area, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        f_left = at(0.5 * (lo + mid))
        f_right = at(0.5 * (mid + hi))
        left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_left + f_mid)
        right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_right + f_hi)
        delta = left + right - area
        if depth >= max_depth or abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
            continue
        child_eps = max(0.5 * eps, 1e-17)
        stack.append((mid, hi, f_mid, f_right, f_hi, right, child_eps, depth + 1))
        stack.append((lo, mid, f_lo, f_left, f_mid, left, child_eps, depth + 1))
    return total


def simpson_inner(
    v: CompactFunction, g: CompactFunction, tol: float = 1e-12
) -> complex:
    """Independent reference for <v, g>."""
    lo = max(v.support[0], g.support[0])
    hi = min(v.support[1], g.support[1])
    if hi <= lo:
        return 0j
    return adaptive_simpson(lambda x: np.conj(v.values(x)) * g.values(x), lo, hi, tol)


def _quadratic_fit(s: StateFn) -> tuple[float, float, float] | None:
    """(a, b, c) when Re e(x) == a x^2 + b x + c with a > 0, else None."""
    pts = np.array([-1.0, 0.0, 1.0])
    r = s.exponent_values(pts).real
    a = 0.5 * (r[2] + r[0] - 2.0 * r[1])
    b = 0.5 * (r[2] - r[0])
    c = r[1]
    if not a > 0:
        return None
    probe = np.linspace(-20.0, 20.0, 41)
    actual = s.exponent_values(probe).real
    model = a * probe**2 + b * probe + c
    if np.max(np.abs(actual - model) / (1.0 + np.abs(actual))) > 1e-9:
        return None
    return float(a), float(b), float(c)


def _log_density(s: StateFn, x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """log |s(x)|^2."""
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        poly = np.abs(s.poly_values(x))
        return 2.0 * (np.log(abs(s.scale)) + np.log(poly) - s.exponent_values(x).real)


def l2_norm_sq(
    s: StateFn, spec: QuadratureSpec = DEFAULT_SPEC
) -> float | NonIntegrable:
    """||s||^2, or NON_INTEGRABLE when the side's weight is not square integrable."""
    if s.is_zero:
        return 0.0
    if classify_integrability(s.family)[s.side] == "non-square-integrable":
        return NON_INTEGRABLE
    fit = _quadratic_fit(s)
    if fit is not None:
        a, b, c = fit
        mu = -b / (2.0 * a)
        root = math.sqrt(2.0 * a)
        y, w = _hermite_rule(spec.hermite_points)
        x = mu + y / root
        log_pref = 2.0 * math.log(abs(s.scale)) - 2.0 * c + b * b / (2.0 * a)
        poly_sq = np.abs(s.poly_values(x)) ** 2
        return float(math.exp(log_pref) / root * np.sum(w * poly_sq))
    dens = _log_density(s, _PROBE)
    peak = float(np.max(dens))
    if not math.isfinite(peak):
        return NON_INTEGRABLE
    significant = np.nonzero(dens >= peak - _WINDOW_DROP)[0]
    if significant[0] == 0 or significant[-1] == len(_PROBE) - 1:
        logger.warning("state %s still significant at the probe edge", s.family.label)
        return NON_INTEGRABLE
    step = float(_PROBE[1] - _PROBE[0])
    lo = float(_PROBE[significant[0]]) - step
    hi = float(_PROBE[significant[-1]]) + step
    panels = max(spec.legendre_panels, math.ceil((hi - lo) / _PANEL_WIDTH))
    x, w = gauss_legendre(lo, hi, spec.legendre_points, panels)
    return float(np.sum(w * np.exp(_log_density(s, x))))


@dataclass(frozen=True, slots=True)
class MomentCheck:
    """int_0^inf r^(2 order + 1) e^(-r^2) dr / pi against order! / (2 pi)."""

    order: int
    value: float
    target: float

    @property
    def relative_error(self) -> float:
        """|value - target| / target."""
        return abs(self.value - self.target) / self.target


def moment_check(order: int, spec: QuadratureSpec = DEFAULT_SPEC) -> MomentCheck:
    """Radial moment of the resolution measure via Gauss-Laguerre in t = r^2."""
    if order < 0:
        raise ValueError("order must be >= 0")
    t, w = _laguerre_rule(spec.laguerre_points)
    value = float(np.sum(w * t**order)) / (2.0 * math.pi)
    return MomentCheck(order, value, math.factorial(order) / (2.0 * math.pi))
