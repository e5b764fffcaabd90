"""Weak functional, test function and quasi-basis tests."""

# pylint: disable=missing-function-docstring,missing-class-docstring
# pylint: disable=too-few-public-methods,no-self-use
# flake8: noqa: D102,D103

from __future__ import annotations

import numpy as np
import pytest

from pbs.bicoherent import TailBoundError, bcs_state
from pbs.exprlang import parse
from pbs.quadrature import test_inner
from pbs.superpotential import PbsFamily, build_family
from pbs.weakstates import (
    LadderImage,
    TestCombination,
    TestFunction,
    V0MembershipError,
    WeakFunctional,
    bump,
    continuity_probe,
    functional_bound,
    quasi_basis_convergence,
    quasi_basis_partial_sums,
    v0_membership,
    weak_eigen_check,
    weak_functional,
)


def _central_difference(v: TestFunction, x: np.ndarray, order: int) -> np.ndarray:
    h = 1e-4
    if order == 1:
        return (v.values(x + h) - v.values(x - h)) / (2 * h)
    return (v.values(x + h) - 2 * v.values(x) + v.values(x - h)) / (h * h)


class TestBump:
    def test_support_and_edges(self) -> None:
        v = bump(1.0, 0.5)
        assert v.support == (0.5, 1.5)
        out = v.values(np.array([0.4, 0.5, 1.5, 2.0]))
        assert np.all(out == 0)
        assert v.values(np.array([1.0]))[0] == pytest.approx(np.exp(-1.0))

    @pytest.mark.parametrize("order", [1, 2])
    def test_derivatives_match_finite_differences(self, order: int) -> None:
        v = bump(0.3, 1.2, 2.0)
        x = np.linspace(-0.6, 1.2, 37)
        np.testing.assert_allclose(
            v.derivative(x, order), _central_difference(v, x, order), atol=1e-5
        )

    def test_invalid_width(self) -> None:
        with pytest.raises(ValueError):
            bump(0.0, 0.0)
        with pytest.raises(ValueError):
            TestFunction(0.0, 1.0).derivative(np.zeros(1), 3)

    def test_combinations(self) -> None:
        a = bump(-1.0, 0.5)
        b = bump(1.0, 0.5)
        combo = a + 2 * b
        assert isinstance(combo, TestCombination)
        assert combo.support == (-1.5, 1.5)
        x = np.array([-1.0, 0.0, 1.0])
        np.testing.assert_allclose(combo.values(x), a.values(x) + 2 * b.values(x))


class TestMembership:
    def test_smooth_family(self, asymmetric: PbsFamily) -> None:
        assert v0_membership(bump(0.0, 3.0), asymmetric)

    def test_pole_inside_support(self) -> None:
        f = build_family(parse("x^2/4 + log(x)"), 0.5)
        result = v0_membership(bump(0.0, 1.0), f)
        assert not result
        assert "w_A" in result.reason
        with pytest.raises(V0MembershipError):
            weak_eigen_check(f, 0.5, bump(0.0, 1.0), 10)

    def test_pole_outside_support(self) -> None:
        f = build_family(parse("x^2/4 + log(x)"), 0.5)
        assert v0_membership(bump(2.0, 1.0), f)

    def test_ladder_image_values(self, asymmetric: PbsFamily) -> None:
        v = bump(0.0, 1.0)
        image = LadderImage(v, asymmetric, "B")
        x = np.array([0.0, 0.25])
        # B v = -v' + (x/2 + k) v for s_A = x^2/4
        expected = -v.derivative(x, 1) + (x / 2 + 0.5) * v.values(x)
        np.testing.assert_allclose(image.values(x), expected, rtol=1e-13)
        assert image.support == v.support


class TestFunctionals:
    def test_matches_strong_pairing(self, asymmetric: PbsFamily) -> None:
        z = 0.8 - 0.3j
        v = bump(0.5, 1.5)
        state = bcs_state(asymmetric, "A", z, 30)
        direct = np.conj(test_inner(v, state.state))
        value = weak_functional(asymmetric, "f", z, v, 30)
        assert value == pytest.approx(direct, rel=1e-10)

    def test_bound_holds(self, quartic: PbsFamily) -> None:
        z = 1.0 + 0.5j
        v = bump(0.0, 1.5)
        for side in ("f", "g"):
            value = weak_functional(quartic, side, z, v, 40)  # type: ignore[arg-type]
            bound = functional_bound(quartic, side, z, v, 40)  # type: ignore[arg-type]
            assert abs(value) <= bound * (1 + 1e-9)

    def test_bound_object(self, quartic: PbsFamily) -> None:
        functional = WeakFunctional(quartic, "g", 0.5, 30)
        v = bump(0.0, 1.0)
        assert functional(v) == weak_functional(quartic, "g", 0.5, v, 30)

    def test_short_truncation_rejected(self, quartic: PbsFamily) -> None:
        with pytest.raises(TailBoundError):
            weak_functional(quartic, "f", 2.0, bump(0.0, 1.0), 3)

    def test_unknown_side(self, quartic: PbsFamily) -> None:
        with pytest.raises(ValueError):
            v = bump(0.0, 1.0)
            weak_functional(quartic, "h", 0.5, v, 30)  # type: ignore[arg-type]


class TestWeakEigen:
    def test_residuals_small(self, quartic: PbsFamily) -> None:
        res = weak_eigen_check(quartic, 1.0 + 0.5j, bump(0.0, 1.5))
        assert res.residual_f < 1e-8
        assert res.residual_g < 1e-8

    def test_gaussian_family(self, asymmetric: PbsFamily) -> None:
        res = weak_eigen_check(asymmetric, -0.5j, bump(0.3, 1.2), 40)
        assert res.nmax == 40
        assert max(res.residual_f, res.residual_g) < 1e-8


class TestQuasiBasis:
    def test_oscillator_form_agrees(self, bounded_cos: PbsFamily) -> None:
        v, w = bump(0.0, 1.5), bump(0.3, 1.2)
        sums = quasi_basis_partial_sums(v, w, bounded_cos, [5, 20, 40])
        np.testing.assert_allclose(sums.oscillator, sums.phi_psi, rtol=1e-9, atol=1e-12)
        assert sums.n_list == (5, 20, 40)

    def test_partial_sums_approach_inner_product(self, asymmetric: PbsFamily) -> None:
        v, w = bump(0.0, 1.5), bump(0.3, 1.2)
        sums = quasi_basis_partial_sums(v, w, asymmetric, [2, 60])
        errors = sums.errors("phi_psi")
        assert errors[1] < errors[0]

    def test_invalid_orders(self, asymmetric: PbsFamily) -> None:
        with pytest.raises(ValueError):
            quasi_basis_partial_sums(bump(0.0, 1.0), bump(0.0, 1.0), asymmetric, [])

    def test_quartic_sums_settle(self, quartic: PbsFamily) -> None:
        v, w = bump(0.0, 1.5), bump(0.3, 1.2)
        conv = quasi_basis_convergence(v, w, quartic, 1e-6)
        assert conv.settled
        assert conv.settled_at is not None and conv.settled_at > 60
        assert conv.worst_after <= 1e-6
        assert conv.errors[60] < conv.errors[10]

    def test_short_cap_does_not_settle(self, quartic: PbsFamily) -> None:
        v, w = bump(0.0, 1.5), bump(0.3, 1.2)
        conv = quasi_basis_convergence(v, w, quartic, 1e-6, cap=60)
        assert not conv.settled
        assert len(conv.errors) == 61
        assert conv.worst_after == conv.errors[-1]

    def test_convergence_unknown_ordering(self, asymmetric: PbsFamily) -> None:
        v = bump(0.0, 1.0)
        with pytest.raises(ValueError):
            quasi_basis_convergence(v, v, asymmetric, ordering="sideways")


class TestContinuity:
    def test_linear_in_perturbation(self, quartic: PbsFamily) -> None:
        v = bump(0.0, 1.5)
        rows = continuity_probe(quartic, 0.5 + 0.5j, v, [1.0, 0.5, 0.25, 0.0])
        assert rows[-1].value == 0.0
        assert rows[0].value == pytest.approx(2 * rows[1].value, rel=1e-6)
        assert rows[1].value == pytest.approx(2 * rows[2].value, rel=1e-6)
        for row in rows:
            assert row.value <= row.bound * (1 + 1e-9) + 1e-300

    def test_scales_must_decrease(self, quartic: PbsFamily) -> None:
        with pytest.raises(ValueError):
            continuity_probe(quartic, 0.5, bump(0.0, 1.0), [0.5, 1.0])
        with pytest.raises(ValueError):
            continuity_probe(quartic, 0.5, bump(0.0, 1.0), [1.0, -0.5])
