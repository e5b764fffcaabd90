"""Pairing, norm and moment quadrature tests."""

# pylint: disable=missing-function-docstring,missing-class-docstring
# pylint: disable=too-few-public-methods,no-self-use
# flake8: noqa: D102,D103

from __future__ import annotations

import math

import numpy as np
import pytest

from pbs.bicoherent import norm_formula
from pbs.quadrature import (
    NON_INTEGRABLE,
    QuadratureSpec,
    adaptive_simpson,
    gauss_legendre,
    gram_matrix,
    inner_vector,
    l2_norm_sq,
    moment_check,
    node_doubling_gap,
    oscillator_coefficients,
    pair_inner,
    test_inner,
)
from pbs.states import SideMismatchError, eigenstate
from pbs.superpotential import PRESET_NAMES, PbsFamily, preset_family
from pbs.weakstates import bump


class TestSpec:
    def test_defaults(self) -> None:
        spec = QuadratureSpec()
        assert spec.hermite_points == 200
        assert spec.doubled().legendre_points == 2 * spec.legendre_points

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"hermite_points": 8},
            {"legendre_points": 15},
            {"tolerance": 0.0},
            {"legendre_panels": 0},
        ],
    )
    def test_invalid(self, kwargs: dict[str, float]) -> None:
        with pytest.raises(ValueError):
            QuadratureSpec(**kwargs)  # type: ignore[arg-type]

    def test_composite_legendre(self) -> None:
        x, w = gauss_legendre(0.0, 3.0, 16, panels=3)
        assert x.shape == (48,)
        assert float(np.sum(w * x**2)) == pytest.approx(9.0, rel=1e-14)


class TestPairing:
    @pytest.mark.parametrize("name", PRESET_NAMES)
    def test_vacua_pair_to_one(self, name: str) -> None:
        f = preset_family(name, 0.5)
        value = pair_inner(eigenstate(f, "B", 0), eigenstate(f, "A", 0))
        assert value == pytest.approx(1.0, abs=1e-12)

    def test_gram_is_identity(self, asymmetric: PbsFamily) -> None:
        gram = gram_matrix(asymmetric, 30)
        np.testing.assert_allclose(gram, np.eye(31), atol=1e-10)

    def test_gram_independent_of_family(
        self, asymmetric: PbsFamily, bounded_cos: PbsFamily
    ) -> None:
        np.testing.assert_allclose(
            gram_matrix(asymmetric, 12),
            gram_matrix(bounded_cos, 12),
            rtol=0,
            atol=1e-15,
        )

    def test_off_diagonal_pair(self, bounded_cos: PbsFamily) -> None:
        psi = eigenstate(bounded_cos, "B", 2)
        value = pair_inner(psi, eigenstate(bounded_cos, "A", 5))
        assert abs(value) < 1e-12

    def test_node_doubling(self, asymmetric: PbsFamily) -> None:
        psi = eigenstate(asymmetric, "B", 7)
        phi = eigenstate(asymmetric, "A", 7)
        assert node_doubling_gap(lambda spec: pair_inner(psi, phi, spec)) < 1e-12

    def test_node_doubling_high_order(self, asymmetric: PbsFamily) -> None:
        psi = eigenstate(asymmetric, "B", 20)
        phi = eigenstate(asymmetric, "A", 20)
        gap = node_doubling_gap(lambda spec: pair_inner(psi, phi, spec))
        assert math.isfinite(gap)
        assert gap <= QuadratureSpec().tolerance

    def test_doubled_gram_is_identity(self, asymmetric: PbsFamily) -> None:
        doubled = QuadratureSpec().doubled()
        assert doubled.hermite_points == 400
        gram = gram_matrix(asymmetric, 20, doubled)
        assert np.all(np.isfinite(gram))
        np.testing.assert_allclose(gram, np.eye(21), atol=1e-10)

    def test_side_order_enforced(self, asymmetric: PbsFamily) -> None:
        phi = eigenstate(asymmetric, "A", 0)
        with pytest.raises(SideMismatchError):
            pair_inner(phi, phi)


class TestNorms:
    @pytest.mark.parametrize("side", ["A", "B"])
    @pytest.mark.parametrize("n", [0, 1, 6, 25])
    def test_gaussian_norms_match_closed_form(
        self, asymmetric: PbsFamily, side: str, n: int
    ) -> None:
        norm_sq = l2_norm_sq(eigenstate(asymmetric, side, n))  # type: ignore[arg-type]
        assert isinstance(norm_sq, float)
        expected = norm_formula(asymmetric, side, n) ** 2  # type: ignore[arg-type]
        assert norm_sq == pytest.approx(expected, rel=1e-10)

    def test_windowed_norm_matches_simpson(self, bounded_cos: PbsFamily) -> None:
        phi = eigenstate(bounded_cos, "A", 2)
        norm_sq = l2_norm_sq(phi)
        reference = adaptive_simpson(
            lambda x: np.abs(phi.values(x)) ** 2, -40.0, 40.0, 1e-13
        )
        assert norm_sq == pytest.approx(reference.real, rel=1e-8)

    def test_non_integrable_side(self, quartic: PbsFamily) -> None:
        result = l2_norm_sq(eigenstate(quartic, "B", 0))
        assert result is NON_INTEGRABLE
        assert not result
        assert repr(result) == "NON_INTEGRABLE"

    def test_integrable_side_of_quartic(self, quartic: PbsFamily) -> None:
        result = l2_norm_sq(eigenstate(quartic, "A", 1))
        assert isinstance(result, float)
        assert result > 0.0


class TestTestFunctionIntegrals:
    def test_against_adaptive_simpson(self, bounded_cos: PbsFamily) -> None:
        v = bump(0.3, 1.2)
        s = eigenstate(bounded_cos, "A", 2)
        fast = test_inner(v, s)
        lo, hi = v.support
        slow = adaptive_simpson(
            lambda x: np.conj(v.values(x)) * s.values(x), lo, hi, 1e-13
        )
        assert fast == pytest.approx(slow, abs=1e-10)

    def test_inner_vector_agrees_with_oscillator_form(
        self, bounded_cos: PbsFamily
    ) -> None:
        v = bump(-0.5, 2.0, 1.0 + 0.5j)
        for side in ("A", "B"):
            direct = inner_vector(v, bounded_cos, side, 15)
            factored = oscillator_coefficients(v, bounded_cos, side, 15)
            scale = float(np.max(np.abs(direct)))
            np.testing.assert_allclose(factored, direct, rtol=0, atol=1e-12 * scale)

    def test_inner_vector_matches_single_states(self, asymmetric: PbsFamily) -> None:
        v = bump(1.0, 1.5)
        vec = inner_vector(v, asymmetric, "B", 4)
        expected = test_inner(v, eigenstate(asymmetric, "B", 3))
        assert vec[3] == pytest.approx(expected, rel=1e-12)

    def test_high_order_vector_resolved(self, asymmetric: PbsFamily) -> None:
        v = bump(0.0, 2.0)
        vec = inner_vector(v, asymmetric, "A", 600)
        fine = inner_vector(v, asymmetric, "A", 600, QuadratureSpec(legendre_panels=40))
        assert np.all(np.isfinite(vec))
        scale = float(np.max(np.abs(fine)))
        np.testing.assert_allclose(vec, fine, rtol=0, atol=1e-10 * scale)


class TestMoments:
    @pytest.mark.parametrize("order", [0, 1, 4, 10])
    def test_radial_moments(self, order: int) -> None:
        check = moment_check(order)
        assert check.target == pytest.approx(math.factorial(order) / (2.0 * math.pi))
        assert check.relative_error < 1e-12

    def test_negative_order(self) -> None:
        with pytest.raises(ValueError):
            moment_check(-1)
