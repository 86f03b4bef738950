"""
Tests for the debranges_space module.
"""

import math

import numpy as np
import pytest

from debranges_lab.debranges_space import (
    DIAGONAL_LADDER_RUNGS,
    EQUAL,
    FIRST_IN_SECOND,
    INCOMPARABLE,
    SECOND_IN_FIRST,
    DeBrangesSpaceHandle,
    EntireFunctionSamples,
    bspace_inner_product,
    bspace_inner_product_detailed,
    cartwright_diagnostics,
    debranges_function,
    e_samples_table,
    hermite_biehler_violations,
    kernel_diagonal_profile,
    kernel_formula,
    kernel_integral,
    kernel_positivity_violations,
    kernel_table,
    mean_type_estimate,
    real_zero_violations,
    verify_containment,
    _diagonal_verdict,
)
from debranges_lab.spectral_measure import bump_probe


@pytest.fixture(scope="module")
def free_handle(free_solution):
    return DeBrangesSpaceHandle.for_solution(free_solution, math.pi)


@pytest.fixture(scope="module")
def bessel1_handle(bessel1_solution):
    return DeBrangesSpaceHandle.for_solution(bessel1_solution, math.pi)


def relative(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


class TestDeBrangesFunction:
    """Test suite for E(z, c) and the handle."""

    def test_free_closed_form(self, free_solution):
        """Test E(z, c) = sin(kc)/k + i cos(kc)."""
        for z in (4.0, 2.0 + 3.0j, -9.0):
            k = np.sqrt(complex(z))
            expected = np.sin(k * 2.0) / k + 1j * np.cos(k * 2.0)
            assert relative(debranges_function(free_solution, 2.0, z), expected) < 1e-8

    def test_handle_matches_function(self, free_solution, free_handle):
        """Test that the handle evaluates the same E."""
        z = 1.5 - 0.5j
        assert relative(complex(free_handle.E(z)[0]), debranges_function(free_solution, math.pi, z)) < 1e-12

    def test_e_sharp(self, free_handle):
        """Test E#(z) = conj(E(conj z))."""
        z = np.array([2.0 + 1.0j])
        assert np.allclose(free_handle.E_sharp(z), np.conj(free_handle.E(np.conj(z))))

    @pytest.mark.parametrize("c", [0.0, -1.0, 4.0])
    def test_invalid_c(self, free_solution, c):
        """Test that c must lie in (a, b]."""
        with pytest.raises(ValueError):
            DeBrangesSpaceHandle.for_solution(free_solution, c)

    def test_samples_table(self, free_handle):
        """Test the E sample frame layout."""
        frame = e_samples_table(free_handle, [0.0, 1.0 + 1.0j])
        assert list(frame.columns) == ["z_re", "z_im", "re", "im"]
        assert len(frame) == 2
        assert frame["re"][0] == pytest.approx(math.pi, rel=1e-9)


class TestKernel:
    """Test suite for the reproducing kernel."""

    @pytest.mark.parametrize("zeta,z,tol", [(2.0 + 1.0j, 3.0 - 0.5j, 1e-7), (1.0 + 1.0j, 1.0 + 1.0j, 1e-7),
                                          (-4.0, 7.0, 1e-7), (0.5j, -2.0j, 1e-7), (3.0, 3.0, 1e-6)])
    def test_formula_matches_integral_free(self, free_solution, free_handle, zeta, z, tol):
        """Test the Christoffel-Darboux formula against quadrature."""
        formula = kernel_formula(free_handle, zeta, z)
        integral = kernel_integral(free_solution, math.pi, zeta, z)
        scale = math.sqrt(kernel_integral(free_solution, math.pi, zeta, zeta).real
                          * kernel_integral(free_solution, math.pi, z, z).real)
        assert abs(formula - integral) / scale < tol

    @pytest.mark.parametrize("zeta,z,tol", [(2.0 + 1.0j, 3.0 - 0.5j, 1e-7), (5.0, 5.0, 1e-6), (-1.0 + 2.0j, 10.0, 1e-7)])
    def test_formula_matches_integral_bessel(self, bessel1_solution, bessel1_handle, zeta, z, tol):
        """Test the kernel duality with a Bessel endpoint."""
        formula = kernel_formula(bessel1_handle, zeta, z)
        integral = kernel_integral(bessel1_solution, math.pi, zeta, z)
        scale = math.sqrt(kernel_integral(bessel1_solution, math.pi, zeta, zeta).real
                          * kernel_integral(bessel1_solution, math.pi, z, z).real)
        assert abs(formula - integral) / scale < tol

    def test_origin_diagonal_free(self, free_solution, free_handle):
        """Test K(0, 0, pi) = pi^3 / 3."""
        assert relative(kernel_integral(free_solution, math.pi, 0.0, 0.0), math.pi ** 3 / 3.0) < 1e-9
        assert relative(kernel_formula(free_handle, 0.0, 0.0), math.pi ** 3 / 3.0) < 1e-6

    def test_origin_diagonal_bessel(self, bessel1_solution, bessel1_handle):
        """Test K(0, 0, pi) = pi^5 / 5 for Bessel l = 1."""
        assert relative(kernel_integral(bessel1_solution, math.pi, 0.0, 0.0), math.pi ** 5 / 5.0) < 1e-9
        assert relative(kernel_formula(bessel1_handle, 0.0, 0.0), math.pi ** 5 / 5.0) < 1e-6

    def test_orthogonal_eigenfunctions(self, free_solution, free_handle):
        """Test that K(1, 4, pi) vanishes: sin x and sin 2x are orthogonal."""
        assert abs(kernel_integral(free_solution, math.pi, 1.0, 4.0)) < 1e-10
        assert abs(kernel_formula(free_handle, 1.0, 4.0)) < 1e-8

    def test_diagonal_profile(self, free_solution):
        """Test K(1, 1, x) = x/2 - sin(2x)/4."""
        xs = np.array([0.5, 1.5, math.pi])
        profile = np.asarray(kernel_diagonal_profile(free_solution, 1.0, xs)).ravel()
        assert np.allclose(profile, xs / 2.0 - np.sin(2.0 * xs) / 4.0, rtol=1e-8)

    def test_kernel_table(self, free_handle):
        """Test the kernel frame with one row per pair."""
        frame = kernel_table(free_handle, [1.0 + 1.0j, 2.0], [3.0, 5.0 - 1.0j])
        assert len(frame) == 2
        assert "discrepancy" in frame.columns
        assert frame["discrepancy"].max() < 1e-7

    def test_synthetic_paley_wiener(self):
        """Test K(0, 0) = 1 for E(z) = exp(-iz)."""
        handle = DeBrangesSpaceHandle.synthetic(lambda z: np.exp(-1j * z), "PW(1)")
        assert kernel_formula(handle, 0.0, 0.0) == pytest.approx(1.0, rel=1e-8)
        assert handle.kernel(1.0, 1.0 + math.pi) == pytest.approx(0.0, abs=1e-12)


class TestStructuralChecks:
    """Test suite for Hermite-Biehler, real zeros and kernel positivity."""

    def test_hermite_biehler_free(self, free_handle):
        """Test |E(z)| > |E(conj z)| on an upper half-plane grid."""
        assert hermite_biehler_violations(free_handle, np.linspace(-20.0, 20.0, 9), [0.1, 1.0, 5.0]) == []

    def test_hermite_biehler_bessel(self, bessel1_handle):
        """Test the Hermite-Biehler property with a Bessel endpoint."""
        assert hermite_biehler_violations(bessel1_handle, np.linspace(-20.0, 20.0, 9), [0.1, 1.0, 5.0]) == []

    def test_hermite_biehler_rejects_lower_half_plane(self, free_handle):
        """Test that y <= 0 is rejected."""
        with pytest.raises(ValueError):
            hermite_biehler_violations(free_handle, [1.0], [0.0])

    def test_hermite_biehler_detects_swapped_e(self):
        """Test that E(z) = exp(iz) fails everywhere."""
        handle = DeBrangesSpaceHandle.synthetic(lambda z: np.exp(1j * z), "anti")
        assert len(hermite_biehler_violations(handle, [0.0, 1.0], [1.0])) == 2

    def test_no_real_zeros(self, free_handle, bessel1_handle):
        """Test that E has no real zeros."""
        lams = np.linspace(-50.0, 400.0, 181)
        assert real_zero_violations(free_handle, lams) == []
        assert real_zero_violations(bessel1_handle, lams) == []

    def test_kernel_positivity(self, free_handle):
        """Test K(zeta, zeta) > 0."""
        assert kernel_positivity_violations(free_handle, [0.0, 1.0, 2.0 + 1.0j, -5.0j]) == []


class TestGrowth:
    """Test suite for the mean-type and Cartwright heuristics."""

    def test_exponential_type(self):
        """Test that exp(-2iz) has mean type 2 on the imaginary axis."""
        N = EntireFunctionSamples(lambda z: np.exp(-2j * z), "exp(-2iz)")
        estimate = mean_type_estimate(N, [1.0, 10.0, 100.0])
        assert estimate.estimate == pytest.approx(2.0)
        assert estimate.trend == pytest.approx(0.0, abs=1e-9)
        assert estimate.heuristic

    def test_free_e_has_zero_mean_type(self, free_handle):
        """Test that ln|E(iy)|/y decreases like y^(-1/2)."""
        estimate = mean_type_estimate(EntireFunctionSamples.for_debranges(free_handle), [1e2, 1e3, 1e4])
        assert estimate.estimate < 0.1
        assert estimate.trend < 0.0

    def test_polynomial_is_cartwright(self):
        """Test that 1 + z^2 is of order zero and consistent."""
        F = EntireFunctionSamples(lambda z: 1.0 + z ** 2, "1+z^2")
        result = cartwright_diagnostics(F, [10.0, 100.0, 1000.0], np.linspace(-1e3, 1e3, 4001))
        assert result.order_estimate < 0.95
        assert result.consistent

    def test_gaussian_is_not_cartwright(self):
        """Test that exp(z^2) reports order two."""
        F = EntireFunctionSamples(lambda z: np.exp(z ** 2), "exp(z^2)", log_abs=lambda z: np.real(z ** 2))
        result = cartwright_diagnostics(F, [10.0, 100.0, 1000.0], np.linspace(-10.0, 10.0, 201))
        assert result.order_estimate == pytest.approx(2.0, abs=1e-6)
        assert not result.consistent


class TestInnerProduct:
    """Test suite for the B(c) inner product and containment."""

    @pytest.mark.slow
    def test_isometry_of_transform(self, free_solution, free_handle):
        """Test ||f^||_B = ||f|| for a probe supported in (a, c)."""
        probe = bump_probe(1.5, 0.8)
        F = EntireFunctionSamples.from_transform(free_solution, probe)
        result = bspace_inner_product_detailed(free_handle, F, F)
        assert abs(result.value.real - probe.norm_squared()) / probe.norm_squared() < 1e-5

    @pytest.mark.slow
    def test_reproducing_property(self, free_solution, free_handle):
        """Test <f^, K(zeta, .)> = f^(zeta)."""
        probe = bump_probe(1.5, 0.8)
        F = EntireFunctionSamples.from_transform(free_solution, probe)
        zeta = 2.5
        value = bspace_inner_product(free_handle, F, EntireFunctionSamples.kernel(free_handle, zeta))
        assert relative(value, complex(F(zeta)[0])) < 1e-5

    @pytest.mark.slow
    def test_kernel_norm_is_diagonal(self, free_handle):
        """Test ||K(0, .)||^2 = K(0, 0, pi) = pi^3/3."""
        K0 = EntireFunctionSamples.kernel(free_handle, 0.0)
        value = bspace_inner_product(free_handle, K0, K0)
        assert abs(value.imag) < 1e-8
        assert relative(value.real, math.pi ** 3 / 3.0) < 1e-5

    def test_zero_function_has_zero_norm(self, free_handle):
        """Test <0, 0> = 0 without a divergence error."""
        zero = EntireFunctionSamples(lambda z: np.zeros(np.shape(z), dtype=complex), "0")
        assert bspace_inner_product(free_handle, zero, zero) == 0.0

    def test_kernel_diagonals_order_different_operators(self, free_solution, bessel1_solution):
        """Test B_free(1) in B_bessel(c) when the diagonals agree at zero."""
        c = (5.0 / 3.0) ** 0.2
        free = DeBrangesSpaceHandle.for_solution(free_solution, 1.0)
        bessel = DeBrangesSpaceHandle.for_solution(bessel1_solution, c)
        k_free = free_solution.norm_squared_batch([0.0], 1.0)[0]
        k_bessel = bessel1_solution.norm_squared_batch([0.0], c)[0]
        assert k_free == pytest.approx(1.0 / 3.0, rel=1e-8)
        assert k_bessel == pytest.approx(1.0 / 3.0, rel=1e-6)

        result = verify_containment(free, bessel, [bump_probe(0.5, 0.3)])
        assert result.verdict == FIRST_IN_SECOND
        ratios = [r for _, r in result.diagonal_log_ratios]
        assert len(ratios) == DIAGONAL_LADDER_RUNGS
        assert ratios[-1] > ratios[-2] > ratios[-3] > 0.0

    def test_kernel_diagonals_swapped_arguments(self, free_solution, bessel1_solution):
        """Test that swapping the handles reverses the verdict."""
        free = DeBrangesSpaceHandle.for_solution(free_solution, 1.0)
        bessel = DeBrangesSpaceHandle.for_solution(bessel1_solution, 2.0)
        assert verify_containment(free, bessel, []).verdict == FIRST_IN_SECOND
        assert verify_containment(bessel, free, []).verdict == SECOND_IN_FIRST

    def test_diagonal_verdict_rules(self):
        """Test the verdicts read off a log-ratio ladder."""
        def ladder(values):
            return [(float(2 ** j), v) for j, v in enumerate(values)]

        assert _diagonal_verdict(ladder([0.0, 0.0, 1e-9, -1e-9]), 1e-5) == EQUAL
        assert _diagonal_verdict(ladder([-3.0, -1.0, 2.0, 5.0, 9.0]), 1e-5) == FIRST_IN_SECOND
        assert _diagonal_verdict(ladder([1.0, -2.0, -5.0, -9.0]), 1e-5) == SECOND_IN_FIRST
        assert _diagonal_verdict(ladder([1.0, 4.0, 2.0, 6.0]), 1e-5) == INCOMPARABLE

    def test_containment_needs_solutions(self, free_handle):
        """Test that synthetic handles are refused."""
        synthetic = DeBrangesSpaceHandle.synthetic(lambda z: np.exp(-1j * z), "PW(1)")
        with pytest.raises(ValueError):
            verify_containment(synthetic, free_handle, [])

    @pytest.mark.slow
    def test_nesting(self, free_solution, free_handle):
        """Test B(pi/2) in B(pi) from an inner and an outer probe."""
        inner = DeBrangesSpaceHandle.for_solution(free_solution, math.pi / 2)
        probes = [bump_probe(0.8, 0.6), bump_probe(2.3, 0.5)]
        result = verify_containment(inner, free_handle, probes)
        assert result.in_first == (True, False)
        assert result.in_second == (True, True)
        assert result.verdict == FIRST_IN_SECOND

    @pytest.mark.slow
    def test_equal_spaces(self, free_solution, free_handle):
        """Test that the same c gives equal spaces."""
        other = DeBrangesSpaceHandle.for_solution(free_solution, math.pi)
        result = verify_containment(free_handle, other, [bump_probe(1.5, 0.8)])
        assert result.verdict == EQUAL
