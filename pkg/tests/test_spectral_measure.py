"""
Tests for the spectral_measure module.

The free Dirichlet operator on (0, pi) has atoms at n^2 with weights 2n^2/pi;
Bessel l = 1 has its first atom at k^2 with tan(k pi) = k pi.
"""

import math

import numpy as np
import pytest
from scipy import optimize

from debranges_lab.entire_solution import RescalingFunction, phi_bessel, phi_regular, rescale_solution
from debranges_lab.operator_core import constant_potential, make_bessel_potential, make_regular_potential, zero_potential
from debranges_lab.spectral_measure import (
    GridFunction,
    SpectralMeasure,
    atom_weights,
    compare_measures,
    compute_measure,
    density_profile,
    eigenvalue_count,
    eigenvalues,
    gauge_align,
    inverse_transform,
    parseval_check,
    random_probes,
    rescale_measure,
    transform,
    unitarity_check,
)


def first_bessel1_eigenvalue():
    root = optimize.brentq(lambda t: math.tan(t) - t, 4.0, 4.6, xtol=1e-15)
    return (root / math.pi) ** 2


def parabola(a=0.0, b=math.pi):
    return GridFunction.from_function(lambda x: (x - a) * (b - x), a, b)


class TestSpectralMeasureType:
    """Test suite for the SpectralMeasure value type."""

    def test_from_arrays(self):
        """Test construction and accessors."""
        measure = SpectralMeasure.from_arrays([1.0, 4.0], [0.5, 2.0], 10.0, gauge="test")
        assert len(measure) == 2
        assert list(measure.lambdas) == [1.0, 4.0]
        assert list(measure.weights) == [0.5, 2.0]
        assert SpectralMeasure.from_dict(measure.to_dict()) == measure

    def test_unsorted_atoms_rejected(self):
        """Test that lambdas must be strictly increasing."""
        with pytest.raises(ValueError):
            SpectralMeasure.from_arrays([4.0, 1.0], [1.0, 1.0], 10.0)

    def test_non_positive_weight_rejected(self):
        """Test that weights must be positive."""
        with pytest.raises(ValueError):
            SpectralMeasure.from_arrays([1.0, 4.0], [1.0, 0.0], 10.0)

    def test_atom_above_cutoff_rejected(self):
        """Test that atoms must not exceed lambda_max."""
        with pytest.raises(ValueError):
            SpectralMeasure.from_arrays([1.0, 12.0], [1.0, 1.0], 10.0)


class TestEigenvalues:
    """Test suite for eigenvalue bracketing and atom weights."""

    def test_free_dirichlet_measure(self, free_measure):
        """Test atoms (n^2, 2n^2/pi) for n <= 20."""
        n = np.arange(1, 21)
        assert len(free_measure) == 20
        assert np.max(np.abs(free_measure.lambdas - n ** 2) / n ** 2) < 1e-8
        assert np.max(np.abs(free_measure.weights - 2.0 * n ** 2 / math.pi) / (2.0 * n ** 2 / math.pi)) < 1e-6

    def test_measure_gauge_tag(self, free_measure):
        """Test that the measure records the normalization of phi."""
        assert free_measure.gauge.startswith("unit-initial-data")

    def test_bessel_first_atom(self, bessel1_measure):
        """Test lambda_1 of Bessel l = 1 against the tan(k pi) = k pi root."""
        expected = first_bessel1_eigenvalue()
        assert expected == pytest.approx(2.04575, abs=1e-5)
        assert bessel1_measure.lambdas[0] == pytest.approx(expected, rel=1e-8)

    def test_constant_shift(self):
        """Test that q = 1 on (0, 1) shifts (n pi)^2 by one."""
        sol = phi_regular(make_regular_potential(0.0, 1.0, constant_potential(1.0)))
        lams = eigenvalues(sol, lambda_max=100.0)
        expected = [(n * math.pi) ** 2 + 1.0 for n in (1, 2, 3)]
        assert lams == pytest.approx(expected, rel=1e-9)

    def test_negative_eigenvalues(self):
        """Test that eigenvalues below zero are found for q = -10."""
        sol = phi_regular(make_regular_potential(0.0, math.pi, constant_potential(-10.0)))
        lams = eigenvalues(sol, lambda_max=10.0)
        assert lams == pytest.approx([-9.0, -6.0, -1.0, 6.0], abs=1e-8)

    def test_neumann_right_end(self, free_solution):
        """Test phi'(pi) = 0: atoms at (n - 1/2)^2."""
        lams = eigenvalues(free_solution, right_bc_angle=math.pi / 2, lambda_max=30.0)
        expected = [(n - 0.5) ** 2 for n in range(1, 6)]
        assert lams == pytest.approx(expected, rel=1e-9)

    def test_eigenvalue_count(self, free_solution):
        """Test the Prufer count between atoms."""
        assert eigenvalue_count(free_solution, 0.5) == 0
        assert eigenvalue_count(free_solution, 10.5) == 3
        assert eigenvalue_count(free_solution, 399.5) == 19

    def test_empty_below_ground_state(self, free_solution):
        """Test that a cutoff below the ground state gives an empty measure."""
        measure = compute_measure(free_solution, 0.5)
        assert len(measure) == 0

    def test_weights_at_given_points(self, free_solution):
        """Test w = 1 / int |phi|^2 directly."""
        weights = atom_weights(free_solution, [1.0, 4.0])
        assert weights == pytest.approx([2.0 / math.pi, 8.0 / math.pi], rel=1e-8)


class TestTransform:
    """Test suite for the generalized Fourier transform."""

    def test_parabola_at_atoms(self, free_solution, free_measure):
        """Test f^(n^2) = 4(1 - (-1)^n)/n^4 for f = x(pi - x)."""
        f = parabola()
        fhat = transform(free_solution, f, free_measure.lambdas).atom_values
        n = np.arange(1, 21)
        expected = 4.0 * (1.0 - (-1.0) ** n) / n ** 4
        assert np.max(np.abs(fhat - expected)) < 1e-7

    def test_values_off_atoms(self, free_solution, free_measure):
        """Test that off-atom points fall back to quadrature."""
        f = parabola()
        fhat = transform(free_solution, f, free_measure.lambdas)
        value = fhat(np.array([1.0, 0.0]))
        # f^(0) = int x (pi - x) x dx = pi^4 / 12
        assert value[0] == pytest.approx(fhat.atom_values[0])
        assert value[1].real == pytest.approx(math.pi ** 4 / 12.0, rel=1e-10)

    def test_display_interpolant(self, free_solution, free_measure):
        """Test that the display interpolant passes through the atom values."""
        fhat = transform(free_solution, parabola(), free_measure.lambdas)
        through_atoms = fhat.interpolant()(free_measure.lambdas[:5])
        assert np.allclose(through_atoms, fhat.atom_values[:5], rtol=1e-8, atol=1e-12)

        grid, values = fhat.display_samples(50)
        assert grid.shape == values.shape == (50,)
        assert grid[0] == pytest.approx(1.0) and grid[-1] == pytest.approx(400.0)
        assert values[0] == pytest.approx(fhat.atom_values[0], rel=1e-8)

    def test_support_must_lie_in_interval(self, free_solution):
        """Test that a grid function beyond b is refused."""
        f = GridFunction.from_function(np.ones_like, 0.5, 4.0)
        with pytest.raises(ValueError):
            transform(free_solution, f, [1.0])

    def test_parseval_free(self, free_solution, free_measure):
        """Test Parseval for x(pi - x) in the free case."""
        result = parseval_check(free_measure, free_solution, parabola())
        assert result.l2_norm_squared == pytest.approx(math.pi ** 5 / 30.0, rel=1e-12)
        assert result.relative_error < 1e-6
        assert result.conclusive

    @pytest.mark.slow
    def test_parseval_bessel(self, bessel1_solution, bessel1_measure):
        """Test Parseval for x^2 (pi - x) with Bessel l = 1."""
        f = GridFunction.from_function(lambda x: x ** 2 * (math.pi - x), 0.0, math.pi)
        result = parseval_check(bessel1_measure, bessel1_solution, f)
        assert result.relative_error < 1e-5

    def test_parseval_seeded_probes(self, free_solution, free_measure):
        """Test Parseval on seeded smooth probes."""
        probes = random_probes(np.random.default_rng(42), 0.0, math.pi, 4)
        for probe in probes:
            assert parseval_check(free_measure, free_solution, probe).relative_error < 1e-5

    def test_unitarity(self, free_solution, free_measure):
        """Test <f, g> = sum f^ conj(g^) w for two overlapping bumps."""
        def bump(center):
            return lambda x: np.where(np.abs(x - center) < 0.8, (1.0 - ((x - center) / 0.8) ** 2) ** 6, 0.0)

        f = GridFunction.from_function(bump(1.2), 0.2, 2.8)
        g = GridFunction.from_function(bump(1.6), 0.2, 2.8)
        assert unitarity_check(free_measure, free_solution, f, g) < 1e-5

    def test_round_trip_matches_sine_series(self, free_solution, free_measure):
        """Test that the inverse transform reproduces the truncated sine series of x(pi - x)."""
        f = parabola()
        fhat = transform(free_solution, f, free_measure.lambdas).atom_values
        xs = np.linspace(0.1, 3.0, 30)
        rebuilt = inverse_transform(free_measure, free_solution, fhat, xs)
        n = np.arange(1, 21)
        series = (4.0 * (1.0 - (-1.0) ** n) / (math.pi * n ** 3)) @ np.sin(np.outer(n, xs)) * 2.0
        assert np.max(np.abs(rebuilt.values - series)) < 1e-6
        assert np.max(np.abs(rebuilt.values - xs * (math.pi - xs))) < 2e-3

    def test_inverse_of_empty_measure(self, free_solution):
        """Test that no atoms give the zero function."""
        empty = SpectralMeasure.from_arrays([], [], 0.5)
        rebuilt = inverse_transform(empty, free_solution, [], np.linspace(0.1, 1.0, 5))
        assert np.all(rebuilt.values == 0.0)

    def test_density_profile(self, free_solution, free_measure):
        """Test that truncation at c = b reproduces f while c = b/2 does not."""
        f = parabola()
        profile = dict(density_profile(free_measure, free_solution, f, [math.pi / 2, math.pi]))
        assert profile[math.pi] < 1e-3
        assert profile[math.pi / 2] > 0.1


class TestGauge:
    """Test suite for measure rescaling, comparison and gauge alignment."""

    def test_rescale_matches_rescaled_solution(self, free_solution, free_measure):
        """Test that the weights of e^g phi equal e^(-2g) w atomwise."""
        g = RescalingFunction((0.2, -0.01, 1e-4))
        expected = rescale_measure(free_measure, g).weights
        direct = atom_weights(rescale_solution(free_solution, g), free_measure.lambdas)
        assert np.max(np.abs(direct - expected) / expected) < 1e-9

    def test_zero_gauge_keeps_measure(self, free_measure):
        """Test that g = 0 returns the same measure."""
        assert rescale_measure(free_measure, RescalingFunction.zero()) is free_measure

    def test_free_equals_bessel_zero(self, free_measure):
        """Test that Bessel l = 0 and the free Dirichlet operator share their measure."""
        sol = phi_bessel(make_bessel_potential(0.0, math.pi, zero_potential()))
        comparison = compare_measures(free_measure, compute_measure(sol, 400.0))
        assert comparison.equal
        assert comparison.matched == 20

    def test_free_differs_from_bessel_one(self, free_measure, bessel1_measure):
        """Test the first-atom distance |2.04575 - 1|."""
        comparison = compare_measures(free_measure, bessel1_measure)
        assert not comparison.equal
        assert comparison.first_atom_distance == pytest.approx(first_bessel1_eigenvalue() - 1.0, abs=1e-4)

    def test_constant_gauge_is_reported(self, free_measure):
        """Test that a constant weight factor is reported, not absorbed."""
        scaled = SpectralMeasure.from_arrays(free_measure.lambdas, 3.0 * free_measure.weights,
                                             free_measure.lambda_max)
        comparison = compare_measures(free_measure, scaled)
        assert not comparison.equal
        assert comparison.gauge_factor == pytest.approx(3.0)
        aligned = gauge_align(free_measure, scaled)
        assert aligned.factor == pytest.approx(1.0 / 3.0)
        assert compare_measures(free_measure, aligned.measure).equal


class TestProbes:
    """Test suite for grid functions and probe generation."""

    def test_quadrature_weights(self):
        """Test that the composite Gauss rule integrates x^3 exactly."""
        f = GridFunction.from_function(lambda x: x ** 3, 0.0, 2.0)
        assert np.sum(f.quadrature_weights() * f.values) == pytest.approx(4.0, rel=1e-13)

    def test_truncation(self):
        """Test f * 1_(a, c) on the same grid."""
        f = GridFunction.from_function(np.ones_like, 0.0, 2.0)
        assert f.truncated(1.0).norm_squared() == pytest.approx(1.0, rel=1e-12)

    def test_random_probes_are_seeded(self):
        """Test that the same seed gives the same probes inside the interval."""
        first = random_probes(np.random.default_rng(7), 0.0, math.pi, 3)
        second = random_probes(np.random.default_rng(7), 0.0, math.pi, 3)
        for f, g in zip(first, second):
            assert np.array_equal(f.grid, g.grid)
            assert np.array_equal(f.values, g.values)
            assert f.grid[0] > 0.0
            assert f.c < math.pi

    def test_bad_grid_rejected(self):
        """Test that grids must increase."""
        with pytest.raises(ValueError):
            GridFunction(np.array([0.2, 0.1]), np.array([1.0, 1.0]), 1.0)
