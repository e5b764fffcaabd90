"""Bi-coherent state, norm growth and resolution tests."""

# pylint: disable=missing-function-docstring,missing-class-docstring
# pylint: disable=too-few-public-methods,no-self-use
# flake8: noqa: D102,D103

from __future__ import annotations

import math

import numpy as np
import pytest

from pbs.bicoherent import (
    DEFAULT_TAIL_TOL,
    FamilyShapeError,
    TailBoundError,
    asymptotic_check,
    auto_nmax,
    bcs_coefficients,
    bcs_state,
    boundary_term,
    combined_radius,
    deviation_slope,
    eigen_residual,
    norm_formula,
    normalization,
    radius_estimate,
    resolution_check,
    resolution_plan,
    tail_bound,
)
from pbs.quadrature import NON_INTEGRABLE
from pbs.superpotential import PbsFamily
from pbs.weakstates import bump


class TestNormalization:
    @pytest.mark.parametrize("z", [0.0, 0.7, 1 + 0.5j, -2.5j])
    def test_converges_to_gaussian(self, z: complex) -> None:
        expected = math.exp(-abs(z) ** 2 / 2)
        assert normalization(z, 80) == pytest.approx(expected, rel=1e-12)

    def test_truncated_value(self) -> None:
        # nmax = 1: (1 + |z|^2)^(-1/2)
        assert normalization(2.0, 1) == pytest.approx(1.0 / math.sqrt(5.0))

    def test_coefficients_are_normalized(self) -> None:
        coeffs = np.asarray(bcs_coefficients(1 + 1j, 60))
        assert float(np.sum(np.abs(coeffs) ** 2)) == pytest.approx(1.0, rel=1e-13)


class TestTruncation:
    @pytest.mark.parametrize("z", [0.3, 1.0, 2 + 1j])
    def test_auto_nmax_is_minimal(self, z: complex) -> None:
        n = auto_nmax(z)
        assert tail_bound(z, n) < DEFAULT_TAIL_TOL
        assert boundary_term(z, n) < DEFAULT_TAIL_TOL
        if n > 0:
            assert (
                tail_bound(z, n - 1) >= DEFAULT_TAIL_TOL
                or boundary_term(z, n - 1) >= DEFAULT_TAIL_TOL
            )

    def test_zero_needs_only_vacuum(self, asymmetric: PbsFamily) -> None:
        state = bcs_state(asymmetric, "A", 0.0)
        assert state.nmax == 0
        assert state.coefficients == (1 + 0j,)

    def test_cap_exceeded(self, asymmetric: PbsFamily) -> None:
        with pytest.raises(TailBoundError):
            bcs_state(asymmetric, "A", 50.0)

    def test_fixed_nmax_keeps_bound(self, asymmetric: PbsFamily) -> None:
        state = bcs_state(asymmetric, "A", 2.0, 5)
        assert state.nmax == 5
        assert state.tail_bound == pytest.approx(tail_bound(2.0, 5))
        assert state.tail_bound > DEFAULT_TAIL_TOL

    def test_auto_raise_lifts_nmax(self, asymmetric: PbsFamily) -> None:
        state = bcs_state(asymmetric, "B", 2.0, 5, auto_raise=True)
        assert state.nmax == auto_nmax(2.0)
        assert state.side == "B"


class TestEigenResidual:
    @pytest.mark.parametrize("side", ["A", "B"])
    def test_boundary_weight_is_analytic_tail(
        self, asymmetric: PbsFamily, side: str
    ) -> None:
        res = eigen_residual(asymmetric, side, 1 + 0.5j, 12)  # type: ignore[arg-type]
        assert res.boundary_weight == pytest.approx(res.analytic_tail, rel=1e-10)
        assert isinstance(res.relative, float)

    def test_residual_shrinks_with_nmax(self, asymmetric: PbsFamily) -> None:
        coarse = eigen_residual(asymmetric, "A", 1.0, 8)
        fine = eigen_residual(asymmetric, "A", 1.0, 20)
        assert isinstance(coarse.residual_norm, float)
        assert isinstance(fine.residual_norm, float)
        assert fine.residual_norm < coarse.residual_norm

    def test_non_integrable_side(self, quartic: PbsFamily) -> None:
        res = eigen_residual(quartic, "B", 0.5, 10)
        assert res.residual_norm is NON_INTEGRABLE
        assert res.relative is NON_INTEGRABLE


class TestNorms:
    def test_closed_form_at_zero(self, asymmetric: PbsFamily) -> None:
        # ||phi_0||^2 = |N_phi|^2 sqrt(2 pi) = exp(-k^2/2) for the symmetric split
        assert norm_formula(asymmetric, "A", 0) ** 2 == pytest.approx(math.exp(-0.125))

    def test_requires_quadratic_family(self, bounded_cos: PbsFamily) -> None:
        with pytest.raises(FamilyShapeError):
            norm_formula(bounded_cos, "A", 3)

    @pytest.mark.parametrize("side", ["A", "B"])
    def test_asymptotic_ratio(self, side: str) -> None:
        (row,) = asymptotic_check(1.0, [2000], side)  # type: ignore[arg-type]
        assert abs(row.ratio - 1.0) < 0.05

    def test_deviation_decreases(self) -> None:
        rows = asymptotic_check(0.5, [100, 400, 1600])
        assert rows[2].deviation < rows[0].deviation
        assert deviation_slope(rows) < 0.0

    def test_zero_k_rejected(self) -> None:
        with pytest.raises(ValueError):
            asymptotic_check(0.0, [10])


class TestRadius:
    def test_geometric_growth(self) -> None:
        fit = radius_estimate([2.0**n for n in range(64)], alpha=[3.0] * 64)
        assert fit.r == pytest.approx(2.0)
        assert fit.m_profile == "constant"
        assert fit.a == pytest.approx(1.0)
        assert fit.certified
        assert fit.rho == pytest.approx(1.5)

    def test_bounded_norms(self) -> None:
        fit = radius_estimate([1.0] * 40, m_profile="constant")
        assert fit.r == 1.0
        assert math.isinf(fit.rho)

    def test_combined_radius(self) -> None:
        slow = radius_estimate([1.0] * 40, m_profile="constant")
        fast = radius_estimate([4.0**n for n in range(40)], m_profile="constant")
        assert combined_radius(slow, fast, 2.0) == pytest.approx(0.5)

    def test_factorial_growth_not_certified(self) -> None:
        norms = [math.gamma(n + 1) for n in range(40)]
        assert not radius_estimate(norms).certified
        assert not radius_estimate(norms, m_profile="constant").certified

    def test_given_constants_checked(self) -> None:
        norms = [2.0**n for n in range(40)]
        assert radius_estimate(norms, m_profile="constant", r=2.0, a=1.5).certified
        assert not radius_estimate(norms, m_profile="constant", r=1.5, a=1.5).certified

    @pytest.mark.parametrize(
        "norms", [[1.0] * 10, [1.0] * 31 + [0.0], [1.0] * 31 + [math.inf]]
    )
    def test_invalid_input(self, norms: list[float]) -> None:
        with pytest.raises(ValueError):
            radius_estimate(norms)


class TestResolution:
    def test_grid_matches_radial_oracle(self, asymmetric: PbsFamily) -> None:
        v = bump(0.0, 2.0)
        w = bump(0.5, 1.5)
        out = resolution_check(v, w, asymmetric, nmax=20, radius=6.0)
        tol = 1e-8 * (1 + abs(out.radial_oracle))
        assert out.value == pytest.approx(out.radial_oracle, abs=tol)

    def test_large_radius_recovers_partial_sum(self, asymmetric: PbsFamily) -> None:
        v = bump(0.0, 2.0)
        out = resolution_check(v, bump(0.5, 1.5), asymmetric, nmax=20, radius=10.0)
        assert out.cutoff_tail < 1e-10
        assert not out.cutoff_warning
        tol = 1e-8 * (1 + abs(out.partial_sum))
        assert out.value == pytest.approx(out.partial_sum, abs=tol)

    def test_small_radius_warns(self, asymmetric: PbsFamily) -> None:
        v = bump(0.0, 2.0)
        out = resolution_check(v, v, asymmetric, nmax=10, radius=1.0, grid=(64, 32))
        assert out.cutoff_warning

    def test_orderings_agree_for_equal_bumps(self, bounded_cos: PbsFamily) -> None:
        v = bump(0.2, 1.5)
        a = resolution_check(v, v, bounded_cos, nmax=15, ordering="psi_phi")
        b = resolution_check(v, v, bounded_cos, nmax=15, ordering="phi_psi")
        assert a.radial_oracle == pytest.approx(np.conj(b.radial_oracle), rel=1e-10)

    def test_unknown_ordering(self, asymmetric: PbsFamily) -> None:
        v = bump(0.0, 1.0)
        with pytest.raises(ValueError):
            resolution_check(v, v, asymmetric, ordering="sideways")

    def test_default_disc_matches_radial_oracle(self, asymmetric: PbsFamily) -> None:
        v = bump(0.0, 2.0)
        out = resolution_check(v, v, asymmetric, nmax=25, radius=6.0)
        assert out.nmax == 25
        assert out.radius == 6.0
        assert abs(out.value - out.radial_oracle) <= 1e-8

    def test_angular_grid_raised_above_nmax(self, asymmetric: PbsFamily) -> None:
        v = bump(0.0, 2.0)
        out = resolution_check(v, v, asymmetric, nmax=80, radius=12.0, grid=(64, 16))
        assert np.isfinite(out.value)
        tol = 1e-8 * (1 + abs(out.radial_oracle))
        assert out.value == pytest.approx(out.radial_oracle, abs=tol)

    @pytest.mark.parametrize("ordering", ["psi_phi", "phi_psi"])
    def test_planned_disc_reaches_inner_product(
        self, asymmetric: PbsFamily, ordering: str
    ) -> None:
        v = bump(0.0, 2.0)
        w = bump(0.5, 1.5)
        plan = resolution_plan(v, w, asymmetric, tol=1e-6)
        assert plan.converged
        assert plan.series_tail <= 2.5e-7
        assert plan.radial_tail <= 2.5e-7
        out = resolution_check(
            v, w, asymmetric, plan.nmax, plan.radius, ordering=ordering
        )
        assert out.reference_gap <= 1e-6

    def test_planned_orderings_agree(self, asymmetric: PbsFamily) -> None:
        v = bump(0.0, 2.0)
        w = bump(0.5, 1.5)
        plan = resolution_plan(v, w, asymmetric, tol=1e-6)
        a = resolution_check(v, w, asymmetric, plan.nmax, plan.radius)
        b = resolution_check(
            v, w, asymmetric, plan.nmax, plan.radius, ordering="phi_psi"
        )
        assert abs(a.value - b.value) <= 2e-6
        assert a.reference == b.reference

    def test_plan_rejects_bad_tolerance(self, asymmetric: PbsFamily) -> None:
        v = bump(0.0, 1.0)
        with pytest.raises(ValueError):
            resolution_plan(v, v, asymmetric, tol=0.0)
