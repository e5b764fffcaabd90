"""Exact recursion polynomials and Hermite/Laguerre helpers.

``P_n`` is the monic probabilists' Hermite polynomial in ``u = x + k``
generated by ``P_0 = 1`` and ``P_n = u P_{n-1} - P'_{n-1}``. Coefficients
are kept as :class:`fractions.Fraction` so every identity is checked
exactly.
"""

# pylint: disable=invalid-name

from __future__ import annotations

import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction
from typing import Final

import numpy as np
import numpy.typing as npt
from scipy.special import gammaln, logsumexp

logger = logging.getLogger(__name__)

# Rescale threshold for the log-space Hermite recurrence.
_RESCALE_AT: Final = 1e150


@dataclass(frozen=True, slots=True)
class ScaledPoly:
    """Polynomial in u with exact rational coefficients (ascending powers)."""

    coefficients: tuple[Fraction, ...]

    @classmethod
    def from_coefficients(cls, coeffs: Iterable[Fraction | int]) -> ScaledPoly:
        """Normalize: convert to Fraction and strip trailing zeros."""
        values = [Fraction(c) for c in coeffs]
        while values and values[-1] == 0:
            values.pop()
        return cls(tuple(values))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        """True for the zero polynomial."""
        return not self.coefficients

    def __add__(self, other: ScaledPoly) -> ScaledPoly:
        n = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (Fraction(0),) * (n - len(self.coefficients))
        b = other.coefficients + (Fraction(0),) * (n - len(other.coefficients))
        return ScaledPoly.from_coefficients(x + y for x, y in zip(a, b))

    def __sub__(self, other: ScaledPoly) -> ScaledPoly:
        return self + other.scale(-1)

    def scale(self, factor: Fraction | int) -> ScaledPoly:
        """Multiply by a rational constant."""
        return ScaledPoly.from_coefficients(c * factor for c in self.coefficients)

    def derivative(self) -> ScaledPoly:
        """d/du."""
        return ScaledPoly.from_coefficients(
            c * j for j, c in enumerate(self.coefficients) if j
        )

    def times_u(self) -> ScaledPoly:
        """u * P."""
        if self.is_zero:
            return self
        return ScaledPoly((Fraction(0),) + self.coefficients)

    def lower(self) -> ScaledPoly:
        """Lowering map P -> P'."""
        return self.derivative()

    def raise_(self) -> ScaledPoly:
        """Raising map P -> u P - P'."""
        return self.times_u() - self.derivative()

    def evaluate_exact(self, u: Fraction | int) -> Fraction:
        """Horner evaluation at a rational point."""
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * u + c
        return acc

    def evaluate(self, u: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Horner evaluation in double precision."""
        arr = np.asarray(u, dtype=np.float64)
        acc = np.zeros_like(arr)
        for c in reversed(self.coefficients):
            acc = acc * arr + float(c)
        return acc

    def expand(self) -> tuple[Fraction, ...]:
        """Exact coordinates in the monic basis P_0..P_degree."""
        if self.is_zero:
            return ()
        basis = pn_sequence(self.degree)
        coords = [Fraction(0)] * (self.degree + 1)
        rest = self
        for d in range(self.degree, -1, -1):
            c = rest.coefficients[d] if d < len(rest.coefficients) else Fraction(0)
            if c:
                coords[d] = c
                rest = rest - basis[d].scale(c)
        if not rest.is_zero:  # pragma: no cover - monic basis always peels
            raise ArithmeticError("basis expansion left a remainder")
        return tuple(coords)


ZERO_POLY: Final = ScaledPoly(())
ONE_POLY: Final = ScaledPoly((Fraction(1),))

_PN_CACHE: list[ScaledPoly] = [ONE_POLY]


def pn_sequence(nmax: int) -> list[ScaledPoly]:
    """P_0..P_nmax from the recursion P_n = u P_{n-1} - P'_{n-1}."""
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    while len(_PN_CACHE) <= nmax:
        _PN_CACHE.append(_PN_CACHE[-1].raise_())
    return _PN_CACHE[: nmax + 1]


def pn(n: int) -> ScaledPoly:
    """P_n."""
    return pn_sequence(n)[n]


def hermite_closed_form(n: int) -> ScaledPoly:
    """He_n(u) = sum_m (-1)^m n! / (m! (n-2m)! 2^m) u^(n-2m)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    coeffs = [Fraction(0)] * (n + 1)
    for m in range(n // 2 + 1):
        num = (-1) ** m * math.factorial(n)
        den = math.factorial(m) * math.factorial(n - 2 * m) * 2**m
        coeffs[n - 2 * m] = Fraction(num, den)
    return ScaledPoly.from_coefficients(coeffs)


def physicists_hermite(n: int) -> ScaledPoly:
    """H_n(y) = 2^(n/2) He_n(sqrt(2) y), as exact coefficients in y."""
    he = hermite_closed_form(n)
    coeffs = []
    for j, c in enumerate(he.coefficients):
        # He_n has only powers with n - j even, so 2^((n+j)/2) is an integer
        coeffs.append(c * 2 ** ((n + j) // 2) if c else Fraction(0))
    return ScaledPoly.from_coefficients(coeffs)


def hermite_eval(n: int, y: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Physicists' H_n(y) via H_{j+1} = 2y H_j - 2j H_{j-1}."""
    if n < 0:
        raise ValueError("n must be >= 0")
    arr = np.asarray(y, dtype=np.float64)
    h_prev = np.ones_like(arr)
    if n == 0:
        return h_prev
    h = 2.0 * arr
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(1, n):
            h_prev, h = h, 2.0 * arr * h - 2.0 * j * h_prev
    if not np.all(np.isfinite(h)):
        raise OverflowError(f"H_{n} overflows double precision; use hermite_log_eval")
    return h


def hermite_log_eval(n: int, y: float) -> tuple[float, int]:
    """(log|H_n(y)|, sign) from a rescaled recurrence."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 0.0, 1
    y = float(y)
    h_prev, h = 1.0, 2.0 * y
    log_scale = 0.0
    for j in range(1, n):
        h_prev, h = h, 2.0 * y * h - 2.0 * j * h_prev
        mag = abs(h)
        if mag > _RESCALE_AT:
            h_prev /= mag
            h /= mag
            log_scale += math.log(mag)
    if h == 0:
        return -math.inf, 0
    return log_scale + math.log(abs(h)), 1 if h > 0 else -1


def pn_values(nmax: int, u: npt.ArrayLike) -> npt.NDArray[np.complex128]:
    """Normalized p_n(u) = P_n(u)/sqrt(n!) for n = 0..nmax, shape (nmax+1, *u.shape).

    Uses p_{n+1} = (u p_n - sqrt(n) p_{n-1}) / sqrt(n+1), which avoids the
    factorial growth of P_n.
    """
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    arr = np.asarray(u, dtype=np.complex128)
    out = np.empty((nmax + 1,) + arr.shape, dtype=np.complex128)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = arr
    for n in range(1, nmax):
        out[n + 1] = (arr * out[n] - math.sqrt(n) * out[n - 1]) / math.sqrt(n + 1)
    return out


def laguerre_neg_sq(n: int, k: float) -> tuple[float, int]:
    """(log L_n(-k^2), sign); every term of the sum is positive."""
    if n < 0:
        raise ValueError("n must be >= 0")
    k = float(k)
    if n == 0 or k == 0:
        return 0.0, 1
    m = np.arange(n + 1, dtype=np.float64)
    log_terms = (
        gammaln(n + 1)
        - gammaln(m + 1)
        - gammaln(n - m + 1)
        + 2.0 * m * math.log(abs(k))
        - gammaln(m + 1)
    )
    return float(logsumexp(log_terms)), 1


def laguerre_exact(n: int, x: Fraction | int) -> Fraction:
    """L_n(x) = sum_m C(n, m) (-x)^m / m!, exactly."""
    if n < 0:
        raise ValueError("n must be >= 0")
    x = Fraction(x)
    return sum(
        (
            Fraction(math.comb(n, m)) * (-x) ** m / math.factorial(m)
            for m in range(n + 1)
        ),
        Fraction(0),
    )
