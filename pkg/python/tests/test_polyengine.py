"""Recursion polynomial and special function tests."""

# pylint: disable=missing-function-docstring,missing-class-docstring
# pylint: disable=too-few-public-methods,no-self-use
# flake8: noqa: D102,D103

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from pbs.polyengine import (
    ONE_POLY,
    ScaledPoly,
    hermite_closed_form,
    hermite_eval,
    hermite_log_eval,
    laguerre_exact,
    laguerre_neg_sq,
    physicists_hermite,
    pn,
    pn_sequence,
    pn_values,
)


class TestRecursion:
    def test_first_polynomials(self) -> None:
        seq = pn_sequence(3)
        assert seq[0] == ONE_POLY
        assert seq[1].coefficients == (Fraction(0), Fraction(1))
        assert seq[2].coefficients == (Fraction(-1), Fraction(0), Fraction(1))
        assert seq[3].coefficients == (
            Fraction(0),
            Fraction(-3),
            Fraction(0),
            Fraction(1),
        )

    @pytest.mark.parametrize("n", [0, 1, 5, 12, 40])
    def test_matches_closed_form_exactly(self, n: int) -> None:
        assert pn(n) == hermite_closed_form(n)

    @pytest.mark.parametrize("n", [1, 4, 17])
    def test_lowering_gives_n_times_previous(self, n: int) -> None:
        assert pn(n).lower() == pn(n - 1).scale(n)

    @pytest.mark.parametrize("n", [0, 3, 11])
    def test_raising_gives_next(self, n: int) -> None:
        assert pn(n).raise_() == pn(n + 1)

    def test_commutator_on_monomial_basis(self) -> None:
        p = ScaledPoly.from_coefficients([2, 0, Fraction(1, 3), 5])
        assert p.raise_().lower() - p.lower().raise_() == p

    def test_negative_order_rejected(self) -> None:
        with pytest.raises(ValueError):
            pn_sequence(-1)

    def test_parity(self) -> None:
        for n in range(9):
            coeffs = pn(n).coefficients
            assert all(c == 0 for j, c in enumerate(coeffs) if (n - j) % 2)


class TestScaledPoly:
    def test_trailing_zeros_stripped(self) -> None:
        p = ScaledPoly.from_coefficients([1, 2, 0, 0])
        assert p.degree == 1
        assert ScaledPoly.from_coefficients([0, 0]).is_zero

    def test_expand_recovers_basis_coordinates(self) -> None:
        p = pn(4).scale(3) + pn(2).scale(Fraction(-1, 2)) + pn(0)
        coords = p.expand()
        assert coords == (
            Fraction(1),
            Fraction(0),
            Fraction(-1, 2),
            Fraction(0),
            Fraction(3),
        )

    def test_expand_monomial(self) -> None:
        # u^2 = P_2 + P_0
        assert ScaledPoly.from_coefficients([0, 0, 1]).expand() == (
            Fraction(1),
            Fraction(0),
            Fraction(1),
        )

    def test_exact_and_float_evaluation_agree(self) -> None:
        p = pn(7)
        assert float(p.evaluate_exact(Fraction(3, 2))) == pytest.approx(
            float(p.evaluate(1.5))
        )


class TestNormalizedValues:
    def test_against_exact_polynomials(self) -> None:
        u = np.linspace(-4.0, 4.0, 33)
        values = pn_values(15, u)
        for n in range(16):
            expected = pn(n).evaluate(u) / math.sqrt(math.factorial(n))
            np.testing.assert_allclose(values[n].real, expected, rtol=1e-10, atol=1e-10)
        assert np.all(values.imag == 0)

    def test_complex_argument_shape(self) -> None:
        u = np.array([[0.5 + 1j, -1.0], [2.0, 0.0]])
        assert pn_values(4, u).shape == (5, 2, 2)


class TestHermite:
    def test_physicists_coefficients(self) -> None:
        assert physicists_hermite(3).coefficients == (
            Fraction(0),
            Fraction(-12),
            Fraction(0),
            Fraction(8),
        )

    def test_eval_matches_numpy(self) -> None:
        y = np.linspace(-3.0, 3.0, 25)
        for n in (0, 1, 6, 20):
            coef = np.zeros(n + 1)
            coef[n] = 1.0
            expected = np.polynomial.hermite.hermval(y, coef)
            np.testing.assert_allclose(
                hermite_eval(n, y),
                expected,
                rtol=1e-10,
                atol=1e-12 * np.max(np.abs(expected)),
            )

    def test_eval_overflow_raises(self) -> None:
        with pytest.raises(OverflowError):
            hermite_eval(400, 30.0)

    def test_log_eval_small(self) -> None:
        log_mag, sign = hermite_log_eval(3, 2.0)
        assert sign == 1
        assert log_mag == pytest.approx(math.log(40.0))
        log_mag, sign = hermite_log_eval(1, -2.0)
        assert sign == -1
        assert log_mag == pytest.approx(math.log(4.0))

    def test_log_eval_survives_overflow(self) -> None:
        log_mag, sign = hermite_log_eval(400, 30.0)
        assert math.isfinite(log_mag)
        assert sign == 1
        assert log_mag > 700.0


class TestLaguerre:
    def test_exact_value(self) -> None:
        assert laguerre_exact(2, -1) == Fraction(7, 2)

    def test_log_value_matches_exact(self) -> None:
        log_value, sign = laguerre_neg_sq(2, 1.0)
        assert sign == 1
        assert log_value == pytest.approx(math.log(3.5))
        log_value, _ = laguerre_neg_sq(9, 0.5)
        exact = laguerre_exact(9, Fraction(-1, 4))
        assert log_value == pytest.approx(math.log(float(exact)))

    def test_trivial_cases(self) -> None:
        assert laguerre_neg_sq(0, 3.0) == (0.0, 1)
        assert laguerre_neg_sq(7, 0.0) == (0.0, 1)

    def test_large_order_is_finite(self) -> None:
        log_value, sign = laguerre_neg_sq(5000, 1.0)
        assert sign == 1
        assert math.isfinite(log_value)
        assert log_value > 0.0
