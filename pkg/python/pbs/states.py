"""Eigenstates of the pseudo-bosonic number operators and the ladder action.

A state is ``scale * sum_n w_n p_n(x + k) * exp(-e(x))`` with ``p_n`` the
normalized recursion polynomials and ``e`` the side's exponent
(``s_A`` for phi_n, ``conj(s_B)`` for Psi_n). Ladder operators map the
polynomial part exactly in rational arithmetic; the image is then stored as
complex double weights, each the square root of an exact rational. Integer
weights such as the eigenvalue n come out exact and sqrt(n + 1) is correctly
rounded. Chained actions are exact only up to float rounding.
"""

# pylint: disable=invalid-name

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Final, Literal

import numpy as np
import numpy.typing as npt

from .exprlang import Const, Expr, ExprDomainError, X, conjugate, evaluate, exp
from .polyengine import ScaledPoly, pn, pn_values
from .superpotential import PbsFamily, Side

logger = logging.getLogger(__name__)

Operator = Literal["A", "B", "Adag", "Bdag"]
Hamiltonian = Literal["H1", "H2"]

# operator -> side it acts on
_LOWERING: Final = {"A": "A", "Bdag": "B"}
_RAISING: Final = {"B": "A", "Adag": "B"}

# Pointwise checks stay where every exponent is representable.
_MAX_EXPONENT: Final = 300.0
_CLIP_ABS_X: Final = 12.0

_QUARTER_2PI: Final = (2.0 * math.pi) ** 0.25


class SideMismatchError(ValueError):
    """Operator applied to a state of the wrong side."""


class FamilyMismatchError(ValueError):
    """States from different families combined."""


@dataclass(frozen=True, slots=True)
class StateFn:
    """Linear combination of p_n(x + k) exp(-exponent) with a side prefactor.

    ``weights`` are complex doubles, not exact rationals.
    """

    family: PbsFamily
    side: Side
    weights: tuple[complex, ...]
    scale: complex
    exponent: Expr

    @property
    def is_zero(self) -> bool:
        """All weights vanish."""
        return all(w == 0 for w in self.weights)

    @property
    def n(self) -> int | None:
        """Index of a pure eigenstate; None for mixtures and the zero state."""
        nonzero = [j for j, w in enumerate(self.weights) if w != 0]
        return nonzero[0] if len(nonzero) == 1 else None

    def poly_values(self, x: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        """sum_n w_n p_n(x + k)."""
        xs = np.asarray(x, dtype=np.float64)
        if not self.weights:
            return np.zeros(xs.shape, dtype=np.complex128)
        basis = pn_values(len(self.weights) - 1, xs + self.family.k)
        w = np.asarray(self.weights, dtype=np.complex128)
        return np.tensordot(w, basis, axes=1)

    def exponent_values(self, x: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        """Exponent e(x) of the exp(-e) factor."""
        return evaluate(self.exponent, np.asarray(x, dtype=np.float64))

    def values(self, x: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        """Pointwise values."""
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            return self.scale * self.poly_values(x) * np.exp(-self.exponent_values(x))

    def scaled(self, factor: complex) -> StateFn:
        """factor * state."""
        return StateFn(
            self.family,
            self.side,
            tuple(factor * w for w in self.weights),
            self.scale,
            self.exponent,
        )


def eigenstate(f: PbsFamily, side: Side, n: int) -> StateFn:
    """phi_n (side A) or Psi_n (side B)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    weights = (0j,) * n + (1 + 0j,)
    return StateFn(f, side, weights, f.scale(side), f.exponent(side))


def linear_combination(states: Sequence[StateFn], coeffs: Sequence[complex]) -> StateFn:
    """sum_j c_j s_j for states of one family and side."""
    if not states or len(states) != len(coeffs):
        raise ValueError("need matching non-empty states and coefficients")
    first = states[0]
    size = max(len(s.weights) for s in states)
    acc = [0j] * size
    for s, c in zip(states, coeffs):
        if s.family != first.family:
            raise FamilyMismatchError("states belong to different families")
        if s.side != first.side:
            raise SideMismatchError("states belong to different sides")
        ratio = c * s.scale / first.scale if first.scale else c
        for j, w in enumerate(s.weights):
            acc[j] += ratio * w
    return StateFn(first.family, first.side, tuple(acc), first.scale, first.exponent)


def _basis_factor(c: Fraction, j: int, m: int) -> float:
    """c * sqrt(j!/m!), the root taken of the exact square c^2 j!/m!."""
    q = c * c * Fraction(math.factorial(j), math.factorial(m))
    root = math.sqrt(q)
    return root if c > 0 else -root


def _apply_poly_map(
    s: StateFn, poly_map: Callable[[ScaledPoly], ScaledPoly]
) -> StateFn:
    acc: dict[int, complex] = {}
    for m, w in enumerate(s.weights):
        if w == 0:
            continue
        for j, c in enumerate(poly_map(pn(m)).expand()):
            if c:
                acc[j] = acc.get(j, 0j) + w * _basis_factor(c, j, m)
    size = max(acc) + 1 if acc else 0
    weights = tuple(acc.get(j, 0j) for j in range(size))
    return StateFn(s.family, s.side, weights, s.scale, s.exponent)


def _require_family(f: PbsFamily, s: StateFn) -> None:
    if s.family != f:
        raise FamilyMismatchError(f"state belongs to family {s.family.label!r}")


def apply_ladder(f: PbsFamily, op: Operator, s: StateFn) -> StateFn:
    """Exact action of A, B (on phi side) or A-dagger, B-dagger (on Psi side)."""
    _require_family(f, s)
    if op in _LOWERING:
        expected = _LOWERING[op]
        poly_map = ScaledPoly.lower
    elif op in _RAISING:
        expected = _RAISING[op]
        poly_map = ScaledPoly.raise_
    else:
        raise ValueError(f"unknown operator {op!r}")
    if s.side != expected:
        raise SideMismatchError(
            f"{op} acts on side {expected}, state is on side {s.side}"
        )
    return _apply_poly_map(s, poly_map)


def _number_map(p: ScaledPoly) -> ScaledPoly:
    return p.lower().raise_()


def _shifted_number_map(p: ScaledPoly) -> ScaledPoly:
    return p.raise_().lower()


def apply_number(f: PbsFamily, s: StateFn) -> StateFn:
    """N = BA on side A, N-dagger = A-dagger B-dagger on side B."""
    _require_family(f, s)
    return _apply_poly_map(s, _number_map)


def apply_hamiltonian(f: PbsFamily, which: Hamiltonian, s: StateFn) -> StateFn:
    """H1 = BA (eigenvalue n) or H2 = AB (eigenvalue n + 1); adjoints on side B."""
    _require_family(f, s)
    if which == "H1":
        return _apply_poly_map(s, _number_map)
    if which == "H2":
        return _apply_poly_map(s, _shifted_number_map)
    raise ValueError(f"unknown hamiltonian {which!r}")


def clipped_grid(f: PbsFamily, grid: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Points with |x| <= 12 where every family exponent stays representable."""
    xs = np.asarray(grid, dtype=np.float64)
    keep = np.abs(xs) <= _CLIP_ABS_X
    with np.errstate(over="ignore", invalid="ignore"):
        for expo in (f.s_a, f.s_b):
            re_s = evaluate(expo, xs).real
            keep &= np.isfinite(re_s) & (np.abs(re_s) <= _MAX_EXPONENT)
        keep &= (xs + f.k) ** 2 / 4 <= _MAX_EXPONENT
    return xs[keep]


def numeric_ladder_residual(
    f: PbsFamily, op: Operator, s: StateFn, grid: npt.ArrayLike, h: float = 1e-5
) -> float:
    """Relative gap between the exact ladder image and the differential operator."""
    xs = clipped_grid(f, grid)
    image = apply_ladder(f, op, s).values(xs)
    v = s.values(xs)
    dv = (s.values(xs + h) - s.values(xs - h)) / (2.0 * h)
    if op == "A":
        direct = dv + evaluate(f.w_a, xs) * v
    elif op == "B":
        direct = -dv + evaluate(f.w_b, xs) * v
    elif op == "Adag":
        direct = -dv + evaluate(conjugate(f.w_a), xs) * v
    else:
        direct = dv + evaluate(conjugate(f.w_b), xs) * v
    scale = 1.0 + float(np.max(np.abs(direct)))
    return float(np.max(np.abs(image - direct))) / scale


@dataclass(frozen=True, slots=True)
class Factorization:
    """phi_n = c_n rho_A and Psi_n = c_n rho_B with c_n the oscillator basis."""

    family: PbsFamily
    rho_a: Expr
    rho_b: Expr

    def oscillator(self, n: int, x: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        """c_n(x) = p_n(u) exp(-u^2/4) / (2 pi)^(1/4), u = x + k."""
        return oscillator_values(n, x, self.family.k)[n]

    def reciprocity_residual(self, grid: npt.ArrayLike) -> float:
        """max |rho_A conj(rho_B) - 1|."""
        xs = clipped_grid(self.family, grid)
        prod = evaluate(self.rho_a, xs) * np.conj(evaluate(self.rho_b, xs))
        return float(np.max(np.abs(prod - 1.0)))

    def residual(self, side: Side, n: int, grid: npt.ArrayLike) -> float:
        """max |state - c_n rho| / max(1, |state|)."""
        xs = clipped_grid(self.family, grid)
        state = eigenstate(self.family, side, n).values(xs)
        rho = self.rho_a if side == "A" else self.rho_b
        product = self.oscillator(n, xs) * evaluate(rho, xs)
        return float(np.max(np.abs(state - product) / np.maximum(1.0, np.abs(state))))


def oscillator_values(
    nmax: int, x: npt.ArrayLike, k: float
) -> npt.NDArray[np.complex128]:
    """c_0..c_nmax on x."""
    u = np.asarray(x, dtype=np.float64) + k
    return pn_values(nmax, u) * (np.exp(-(u**2) / 4.0) / _QUARTER_2PI)


def factorize(f: PbsFamily) -> Factorization:
    """rho_A = N_phi (2pi)^(1/4) e^(u^2/4 - s_A), rho_B with conj(s_B) and N_psi."""
    u_sq = (X + f.k) ** 2 / 4
    rho_a = Const(f.n_phi * _QUARTER_2PI) * exp(u_sq - f.s_a)
    rho_b = Const(f.n_psi * _QUARTER_2PI) * exp(u_sq - conjugate(f.s_b))
    return Factorization(f, rho_a, rho_b)


def metric_multiplier(f: PbsFamily, direction: str = "psi_to_phi") -> Expr:
    """Multiplication operator S with S Psi_n = phi_n (or its inverse)."""
    fac = factorize(f)
    if direction == "psi_to_phi":
        return fac.rho_a / fac.rho_b
    if direction == "phi_to_psi":
        return fac.rho_b / fac.rho_a
    raise ValueError(
        f"direction must be 'psi_to_phi' or 'phi_to_psi', got {direction!r}"
    )


@dataclass(frozen=True, slots=True)
class MetricCheck:
    """Grid check of S Psi_n = phi_n."""

    max_residual: float
    division_by_zero: bool


def metric_residual(f: PbsFamily, nmax: int, grid: npt.ArrayLike) -> MetricCheck:
    """max over n <= nmax of |S Psi_n - phi_n| on the clipped grid."""
    xs = clipped_grid(f, grid)
    try:
        s_vals = evaluate(metric_multiplier(f), xs)
    except ExprDomainError:
        logger.warning("rho_B vanishes on the grid; metric multiplier undefined")
        return MetricCheck(math.inf, True)
    worst = 0.0
    for n in range(nmax + 1):
        phi_n = eigenstate(f, "A", n).values(xs)
        psi_n = eigenstate(f, "B", n).values(xs)
        worst = max(worst, float(np.max(np.abs(s_vals * psi_n - phi_n))))
    return MetricCheck(worst, False)
