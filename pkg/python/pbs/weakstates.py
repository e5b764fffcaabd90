"""Weak bi-coherent states as functionals on compactly supported test functions.

When |exp(-s)| is not square integrable the series for f(z) and g(z) only
make sense paired with a test function: F(z)[v] = <f(z), v> and
G(z)[v] = <g(z), v>.
"""

# pylint: disable=too-many-arguments,too-many-locals

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Final, Literal

import numpy as np
import numpy.typing as npt

from .bicoherent import TailBoundError, auto_nmax, bcs_coefficients, tail_bound
from .exprlang import ExprDomainError, conjugate, evaluate
from .quadrature import (
    DEFAULT_SPEC,
    CompactFunction,
    QuadratureSpec,
    gauss_legendre,
    inner_vector,
    oscillator_coefficients,
    simpson_inner,
)
from .states import factorize
from .superpotential import PbsFamily, Side

logger = logging.getLogger(__name__)

WeakSide = Literal["f", "g"]

_MEMBERSHIP_POINTS: Final = 4097
_DEFAULT_TAIL_TOL: Final = 1e-12
QUASI_BASIS_CAP: Final = 2000


class V0MembershipError(ValueError):
    """Test function whose ladder images are not smooth on its support."""


def _state_side(side: WeakSide) -> Side:
    if side == "f":
        return "A"
    if side == "g":
        return "B"
    raise ValueError(f"side must be 'f' or 'g', got {side!r}")


@dataclass(frozen=True, slots=True)
class TestFunction:
    """amplitude * exp(-1 / (1 - t^2)), t = (x - center) / width, zero for |t| >= 1."""

    __test__ = False

    center: float
    width: float
    amplitude: complex = 1.0 + 0j

    def __post_init__(self) -> None:
        if not (math.isfinite(self.width) and self.width > 0):
            raise ValueError("width must be finite and > 0")
        if not math.isfinite(self.center):
            raise ValueError("center must be finite")

    @property
    def support(self) -> tuple[float, float]:
        """Closed support interval."""
        return (self.center - self.width, self.center + self.width)

    def derivative(
        self, x: npt.ArrayLike, order: int = 1
    ) -> npt.NDArray[np.complex128]:
        """Analytic derivative of order 0, 1 or 2."""
        if order not in (0, 1, 2):
            raise ValueError("order must be 0, 1 or 2")
        xs = np.asarray(x, dtype=np.float64)
        t = (xs - self.center) / self.width
        out = np.zeros(xs.shape, dtype=np.complex128)
        inside = np.abs(t) < 1.0
        ti = t[inside]
        q = 1.0 - ti * ti
        g = -1.0 / q
        base = np.exp(g)
        if order == 0:
            vals = base
        else:
            g1 = -2.0 * ti / (q * q)
            if order == 1:
                vals = g1 * base / self.width
            else:
                g2 = -2.0 / (q * q) - 8.0 * ti * ti / (q * q * q)
                vals = (g2 + g1 * g1) * base / self.width**2
        out[inside] = self.amplitude * vals
        return out

    def values(self, x: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        """Pointwise values."""
        return self.derivative(x, 0)

    def __mul__(self, factor: complex) -> TestFunction:
        return TestFunction(self.center, self.width, self.amplitude * factor)

    __rmul__ = __mul__

    def __add__(self, other: TestFunction | TestCombination) -> TestCombination:
        return TestCombination((self,)) + other


@dataclass(frozen=True, slots=True)
class TestCombination:
    """Finite sum of bumps; support is the hull of the terms' supports."""

    __test__ = False

    terms: tuple[TestFunction, ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("a combination needs at least one term")

    @property
    def support(self) -> tuple[float, float]:
        """Hull of the supports."""
        return (
            min(t.support[0] for t in self.terms),
            max(t.support[1] for t in self.terms),
        )

    def derivative(
        self, x: npt.ArrayLike, order: int = 1
    ) -> npt.NDArray[np.complex128]:
        """Sum of term derivatives."""
        return np.sum([t.derivative(x, order) for t in self.terms], axis=0)

    def values(self, x: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        """Pointwise values."""
        return self.derivative(x, 0)

    def __add__(self, other: TestFunction | TestCombination) -> TestCombination:
        extra = other.terms if isinstance(other, TestCombination) else (other,)
        return TestCombination(self.terms + extra)

    def __mul__(self, factor: complex) -> TestCombination:
        return TestCombination(tuple(t * factor for t in self.terms))

    __rmul__ = __mul__


SmoothTest = TestFunction | TestCombination


def bump(center: float, width: float, amplitude: complex = 1.0) -> TestFunction:
    """Standard mollifier bump."""
    return TestFunction(float(center), float(width), complex(amplitude))


@dataclass(frozen=True, slots=True)
class LadderImage:
    """A-dagger v = -v' + conj(w_A) v, or B v = -v' + w_B v."""

    base: SmoothTest
    family: PbsFamily
    operator: Literal["Adag", "B"]

    @property
    def support(self) -> tuple[float, float]:
        """Support of the base function."""
        return self.base.support

    def values(self, x: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        """Pointwise values."""
        xs = np.asarray(x, dtype=np.float64)
        w = conjugate(self.family.w_a) if self.operator == "Adag" else self.family.w_b
        return -self.base.derivative(xs, 1) + evaluate(w, xs) * self.base.values(xs)


@dataclass(frozen=True, slots=True)
class V0Membership:
    """Whether A-dagger v and B v are smooth and compactly supported."""

    member: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.member


def v0_membership(v: SmoothTest, f: PbsFamily) -> V0Membership:
    """Check that w_A and w_B are finite on the support of v."""
    lo, hi = v.support
    xs = np.concatenate([np.linspace(lo, hi, _MEMBERSHIP_POINTS), [0.5 * (lo + hi)]])
    for name, w in (("w_A", f.w_a), ("w_B", f.w_b)):
        try:
            vals = evaluate(w, xs)
        except ExprDomainError as exc:
            return V0Membership(False, f"{name}: {exc}")
        if not np.all(np.isfinite(vals)):
            return V0Membership(False, f"{name} is not finite on the support")
    return V0Membership(True)


def _functional_nmax(z: complex, nmax: int | None, tol: float) -> int:
    if nmax is None:
        return auto_nmax(z, tol)
    bound = tail_bound(z, nmax)
    if bound >= tol:
        raise TailBoundError(f"nmax={nmax} leaves tail bound {bound:.3g} >= {tol:.3g}")
    return nmax


def weak_functional(
    f: PbsFamily,
    side: WeakSide,
    z: complex,
    v: CompactFunction,
    nmax: int | None = None,
    spec: QuadratureSpec = DEFAULT_SPEC,
    tol: float = _DEFAULT_TAIL_TOL,
) -> complex:
    """F(z)[v] (side f) or G(z)[v] (side g): N sum conj(z)^n/sqrt(n!) <state_n, v>."""
    state_side = _state_side(side)
    z = complex(z)
    nmax = _functional_nmax(z, nmax, tol)
    coeffs = np.conj(np.asarray(bcs_coefficients(z, nmax)))
    pairings = np.conj(inner_vector(v, f, state_side, nmax, spec))
    return complex(np.sum(coeffs * pairings))


@dataclass(frozen=True, slots=True)
class WeakFunctional:
    """F(z) or G(z) bound to a family; call it on a test function."""

    family: PbsFamily
    side: WeakSide
    z: complex
    nmax: int | None = None

    def __call__(
        self, v: CompactFunction, spec: QuadratureSpec = DEFAULT_SPEC
    ) -> complex:
        return weak_functional(self.family, self.side, self.z, v, self.nmax, spec)


def _ket_pairing(
    f: PbsFamily,
    side: Side,
    z: complex,
    v: CompactFunction,
    nmax: int,
    spec: QuadratureSpec,
) -> complex:
    """<v, f(z)> = N sum z^n/sqrt(n!) <v, state_n>."""
    coeffs = np.asarray(bcs_coefficients(z, nmax))
    return complex(np.sum(coeffs * inner_vector(v, f, side, nmax, spec)))


@dataclass(frozen=True, slots=True)
class WeakEigenResult:
    """|<A-dagger v, f(z)> - z <v, f(z)>| and |<B v, g(z)> - z <v, g(z)>|."""

    residual_f: float
    residual_g: float
    nmax: int


def weak_eigen_check(
    f: PbsFamily,
    z: complex,
    v: SmoothTest,
    nmax: int | None = None,
    spec: QuadratureSpec = DEFAULT_SPEC,
    tol: float = _DEFAULT_TAIL_TOL,
) -> WeakEigenResult:
    """Weak form of A f(z) = z f(z) and B-dagger g(z) = z g(z)."""
    membership = v0_membership(v, f)
    if not membership:
        raise V0MembershipError(membership.reason)
    z = complex(z)
    nmax = _functional_nmax(z, nmax, tol)
    a_dag_v = LadderImage(v, f, "Adag")
    b_v = LadderImage(v, f, "B")
    res_f = _ket_pairing(f, "A", z, a_dag_v, nmax, spec) - z * _ket_pairing(
        f, "A", z, v, nmax, spec
    )
    res_g = _ket_pairing(f, "B", z, b_v, nmax, spec) - z * _ket_pairing(
        f, "B", z, v, nmax, spec
    )
    return WeakEigenResult(abs(res_f), abs(res_g), nmax)


@dataclass(frozen=True, slots=True)
class QuasiBasisSums:
    """Partial sums of sum_n <v, phi_n><Psi_n, w> (and the swapped ordering)."""

    n_list: tuple[int, ...]
    phi_psi: tuple[complex, ...]
    psi_phi: tuple[complex, ...]
    oscillator: tuple[complex, ...]
    reference: complex

    def errors(self, ordering: str = "phi_psi") -> tuple[float, ...]:
        """|partial sum - <v, w>| for each N."""
        sums = self.phi_psi if ordering == "phi_psi" else self.psi_phi
        return tuple(abs(s - self.reference) for s in sums)


def quasi_basis_partial_sums(
    v: CompactFunction,
    w: CompactFunction,
    f: PbsFamily,
    n_list: Sequence[int],
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> QuasiBasisSums:
    """Partial sums in both orderings, their oscillator-basis counterpart and <v, w>."""
    if not n_list or min(n_list) < 0:
        raise ValueError("n_list must hold non-negative truncation orders")
    top = max(n_list)
    v_phi = inner_vector(v, f, "A", top, spec)
    v_psi = inner_vector(v, f, "B", top, spec)
    w_phi = inner_vector(w, f, "A", top, spec)
    w_psi = inner_vector(w, f, "B", top, spec)
    phi_psi = np.cumsum(v_phi * np.conj(w_psi))
    psi_phi = np.cumsum(v_psi * np.conj(w_phi))
    # <conj(rho_A) v, c_n><c_n, conj(rho_B) w>
    osc = np.cumsum(
        oscillator_coefficients(v, f, "A", top, spec)
        * np.conj(oscillator_coefficients(w, f, "B", top, spec))
    )
    picked = [int(n) for n in n_list]
    return QuasiBasisSums(
        tuple(picked),
        tuple(complex(phi_psi[n]) for n in picked),
        tuple(complex(psi_phi[n]) for n in picked),
        tuple(complex(osc[n]) for n in picked),
        simpson_inner(v, w),
    )


@dataclass(frozen=True, slots=True)
class QuasiBasisConvergence:
    """Errors |S_N - <v, w>| for N = 0..cap and where they settle below tol."""

    errors: tuple[float, ...]
    tol: float
    settled_at: int | None

    @property
    def settled(self) -> bool:
        """Errors stay below tol from some N on, up to the cap."""
        return self.settled_at is not None

    @property
    def worst_after(self) -> float:
        """Largest error from the settling order to the cap (last error if none)."""
        if self.settled_at is None:
            return self.errors[-1]
        return max(self.errors[self.settled_at :])


def quasi_basis_convergence(
    v: CompactFunction,
    w: CompactFunction,
    f: PbsFamily,
    tol: float = 1e-6,
    cap: int = QUASI_BASIS_CAP,
    ordering: str = "phi_psi",
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> QuasiBasisConvergence:
    """First N after which every partial sum up to cap is within tol of <v, w>."""
    if ordering == "phi_psi":
        terms = inner_vector(v, f, "A", cap, spec) * np.conj(
            inner_vector(w, f, "B", cap, spec)
        )
    elif ordering == "psi_phi":
        terms = inner_vector(v, f, "B", cap, spec) * np.conj(
            inner_vector(w, f, "A", cap, spec)
        )
    else:
        raise ValueError(f"ordering must be 'phi_psi' or 'psi_phi', got {ordering!r}")
    errors = np.abs(np.cumsum(terms) - simpson_inner(v, w))
    # worst error from each N to the cap
    ahead = np.maximum.accumulate(errors[::-1])[::-1]
    below = np.nonzero(ahead <= tol)[0]
    settled_at = int(below[0]) if below.size else None
    if settled_at is None:
        logger.info("partial sums still %.3g away at N=%d", errors[-1], cap)
    return QuasiBasisConvergence(tuple(float(e) for e in errors), tol, settled_at)


@dataclass(frozen=True, slots=True)
class ContinuityRow:
    """|F(z)[v_k] - F(z)[v]| with its a-priori bound."""

    scale: float
    value: float
    bound: float


def weighted_norm(
    v: CompactFunction, f: PbsFamily, side: Side, spec: QuadratureSpec = DEFAULT_SPEC
) -> float:
    """||conj(rho) v|| with rho_A (side A) or rho_B (side B)."""
    fac = factorize(f)
    rho = fac.rho_a if side == "A" else fac.rho_b
    x, w = gauss_legendre(*v.support, spec.legendre_points, spec.legendre_panels)
    dens = np.abs(evaluate(rho, x) * v.values(x)) ** 2
    return math.sqrt(float(np.sum(w * dens)))


def functional_bound(
    f: PbsFamily,
    side: WeakSide,
    z: complex,
    v: CompactFunction,
    nmax: int,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> float:
    """|F(z)[v]| <= ||conj(rho) v|| N sum |z|^n/sqrt(n!)."""
    coeffs = np.abs(np.asarray(bcs_coefficients(z, nmax)))
    return weighted_norm(v, f, _state_side(side), spec) * float(np.sum(coeffs))


def continuity_probe(
    f: PbsFamily,
    z: complex,
    v: TestFunction,
    scales: Sequence[float],
    side: WeakSide = "f",
    nmax: int | None = None,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> list[ContinuityRow]:
    """Perturb v by scale * p with p a narrower bump inside its support."""
    values = [float(s) for s in scales]
    if any(s < 0 for s in values) or any(b >= a for a, b in zip(values, values[1:])):
        raise ValueError("scales must be non-negative and strictly decreasing")
    z = complex(z)
    nmax = _functional_nmax(z, nmax, _DEFAULT_TAIL_TOL)
    probe = bump(v.center + 0.25 * v.width, 0.5 * v.width)
    base = weak_functional(f, side, z, v, nmax, spec)
    unit_bound = functional_bound(f, side, z, probe, nmax, spec)
    rows = []
    for s in values:
        if s == 0:
            rows.append(ContinuityRow(0.0, 0.0, 0.0))
            continue
        perturbed = v + probe * s
        delta = weak_functional(f, side, z, perturbed, nmax, spec) - base
        rows.append(ContinuityRow(s, abs(delta), s * unit_bound))
    return rows
