"""
Tests for the operator_core module.

Covers potential construction and its integrability probes, and the
integration of -u'' + q_eff u = z u between interior points.
"""

import math

import numpy as np
import pytest

from debranges_lab.errors import IntegrationError, PotentialError
from debranges_lab.operator_core import (
    PotentialFunction,
    PotentialKind,
    SolutionState,
    constant_potential,
    cosine_potential,
    fundamental_system,
    growth_rate,
    make_bessel_potential,
    make_regular_potential,
    power_potential,
    propagate,
    qbar_probe,
    shifted_potential,
    tabulated_potential,
    wronskian,
    zero_potential,
)


class TestRegularPotential:
    """Test suite for make_regular_potential."""

    def test_free_potential(self):
        """Test the free potential on (0, pi)."""
        p = make_regular_potential(0.0, math.pi, zero_potential())
        assert p.kind is PotentialKind.REGULAR
        assert p.q.is_zero
        assert p.length == pytest.approx(math.pi)
        assert np.all(p.effective([0.5, 1.0, 3.0]) == 0.0)

    def test_constant_and_cosine(self):
        """Test that bounded continuous potentials pass the local integrability check."""
        p = make_regular_potential(0.0, 1.0, constant_potential(1.0))
        assert p.effective(0.5) == pytest.approx(1.0)
        p = make_regular_potential(0.0, math.pi, cosine_potential())
        assert p.effective(1.0) == pytest.approx(math.cos(1.0))

    def test_plain_callable_is_wrapped(self):
        """Test that a plain Python callable is accepted as q."""
        p = make_regular_potential(0.0, 2.0, lambda x: x * x)
        assert p.effective(1.5) == pytest.approx(2.25)

    @pytest.mark.parametrize("a,b", [(1.0, 1.0), (2.0, 1.0), (0.0, math.inf), (-math.inf, 0.0)])
    def test_bad_interval(self, a, b):
        """Test that reversed, empty and infinite intervals are rejected."""
        with pytest.raises(PotentialError):
            make_regular_potential(a, b, zero_potential())

    def test_interior_singularity_rejected(self):
        """Test that a potential blowing up inside the interval is rejected."""
        singular = PotentialFunction("1/(x-1)^2", lambda x: 1.0 / (x - 1.0) ** 2)
        with np.errstate(divide="ignore"):
            with pytest.raises(PotentialError):
                make_regular_potential(0.0, 2.0, singular)

    def test_shifted_potential(self):
        """Test translation of interval and potential."""
        p = make_regular_potential(0.0, math.pi, cosine_potential())
        shifted = shifted_potential(p, 0.3)
        assert shifted.a == pytest.approx(0.3)
        assert shifted.b == pytest.approx(math.pi + 0.3)
        assert shifted.effective(1.3) == pytest.approx(math.cos(1.0))


class TestBesselPotential:
    """Test suite for make_bessel_potential and the q-bar probe."""

    def test_pure_bessel(self):
        """Test the centrifugal term l(l+1)/x^2."""
        p = make_bessel_potential(1.0, math.pi, zero_potential())
        assert p.kind is PotentialKind.BESSEL
        assert p.a == 0.0
        assert p.centrifugal == pytest.approx(2.0)
        assert p.effective(0.5) == pytest.approx(8.0)

    def test_index_zero_bookkeeping(self):
        """Test that l = 0 keeps the Bessel endpoint although q_eff vanishes."""
        p = make_bessel_potential(0.0, math.pi, zero_potential())
        assert p.kind is PotentialKind.BESSEL
        assert p.effective(0.25) == pytest.approx(0.0)
        assert not p.contains(0.0)

    def test_index_below_minus_half_rejected(self):
        """Test that l < -1/2 is rejected."""
        with pytest.raises(PotentialError):
            make_bessel_potential(-0.75, 1.0, zero_potential())

    def test_log_weight_at_minus_half(self):
        """Test that x^(-1/2) passes the probe with the logarithmic weight at l = -1/2."""
        q = power_potential(1.0, -0.5)
        probe = qbar_probe(q, -0.5, 0.5)
        assert probe.integrable
        assert probe.tail < 0.05 * probe.total
        p = make_bessel_potential(-0.5, 1.0, q)
        assert p.l == -0.5

    def test_strongly_singular_rejected(self):
        """Test that q = 1/x^2 on top of l = 0 fails the probe (x q(x) = 1/x is not integrable)."""
        q = power_potential(1.0, -2.0)
        probe = qbar_probe(q, 0.0, 0.5)
        assert not probe.integrable
        with pytest.raises(PotentialError):
            make_bessel_potential(0.0, 1.0, q)

    def test_zero_probe(self):
        """Test that the zero perturbation is integrable without quadrature."""
        probe = qbar_probe(zero_potential(), 1.0, 0.5)
        assert probe.integrable
        assert probe.pieces == ()

    def test_bessel_cannot_be_translated(self):
        """Test that translating a Bessel potential is refused."""
        p = make_bessel_potential(1.0, 1.0, zero_potential())
        with pytest.raises(PotentialError):
            shifted_potential(p, 0.5)


class TestTabulatedPotential:
    """Test suite for piecewise-linear tabulated potentials."""

    def test_interpolation(self):
        """Test linear interpolation between rows."""
        q = tabulated_potential([0.0, 1.0, 2.0], [0.0, 2.0, 0.0])
        assert q(0.5) == pytest.approx(1.0)
        assert q(1.5) == pytest.approx(1.0)
        assert q.table is not None

    def test_non_increasing_grid(self):
        """Test that a non-increasing x column is rejected."""
        with pytest.raises(PotentialError):
            tabulated_potential([0.0, 1.0, 1.0], [0.0, 1.0, 2.0])

    def test_non_finite_values(self):
        """Test that NaN rows are rejected."""
        with pytest.raises(PotentialError):
            tabulated_potential([0.0, 1.0], [0.0, float("nan")])

    def test_table_over_regular_interval(self):
        """Test that a table builds a regular potential."""
        xs = np.linspace(0.0, math.pi, 101)
        p = make_regular_potential(0.0, math.pi, tabulated_potential(xs, np.cos(xs)))
        assert p.effective(1.0) == pytest.approx(math.cos(1.0), abs=1e-3)


class TestPropagate:
    """Test suite for propagate."""

    def test_free_sine(self):
        """Test propagation of sin x at z = 1."""
        p = make_regular_potential(0.0, math.pi, zero_potential())
        state = propagate(p, 1.0, SolutionState(1.0, math.sin(1.0), math.cos(1.0)), 2.0)
        assert state.x == 2.0
        assert state.u == pytest.approx(math.sin(2.0), abs=1e-9)
        assert state.du == pytest.approx(math.cos(2.0), abs=1e-9)

    def test_free_linear(self):
        """Test that z = 0 propagates the linear solution exactly."""
        p = make_regular_potential(0.0, math.pi, zero_potential())
        state = propagate(p, 0.0, SolutionState(1.0, 1.0, 1.0), 2.0)
        assert state.u == pytest.approx(2.0, abs=1e-10)
        assert state.du == pytest.approx(1.0, abs=1e-10)

    def test_backwards(self):
        """Test propagation towards the left endpoint."""
        p = make_regular_potential(0.0, math.pi, zero_potential())
        state = propagate(p, 4.0, SolutionState(2.0, math.sin(4.0), 2.0 * math.cos(4.0)), 0.5)
        assert state.u == pytest.approx(math.sin(1.0), abs=1e-9)
        assert state.du == pytest.approx(2.0 * math.cos(1.0), abs=1e-9)

    def test_riccati_bessel(self):
        """Test l = 1, z = 4 against psi(x) = sin(2x)/(2x) - cos(2x)."""
        p = make_bessel_potential(1.0, math.pi, zero_potential())

        def psi(x):
            return math.sin(2 * x) / (2 * x) - math.cos(2 * x)

        def dpsi(x):
            return math.cos(2 * x) / x - math.sin(2 * x) / (2 * x * x) + 2 * math.sin(2 * x)

        state = propagate(p, 4.0, SolutionState(1.0, psi(1.0), dpsi(1.0)), 2.0)
        assert state.u == pytest.approx(psi(2.0), abs=1e-9)
        assert state.du == pytest.approx(dpsi(2.0), abs=1e-9)

    def test_growth_scaling(self):
        """Test that keep_scale returns scaled data whose product is the true value."""
        p = make_regular_potential(0.0, math.pi, zero_potential())
        start = SolutionState(0.5, math.exp(10.0), 20.0 * math.exp(10.0))
        scaled = propagate(p, -400.0, start, 3.0, keep_scale=True)
        assert scaled.log_scale == pytest.approx(50.0)
        value = scaled.unscaled()
        assert value.u == pytest.approx(math.exp(60.0), rel=1e-8)
        assert value.du == pytest.approx(20.0 * math.exp(60.0), rel=1e-8)

    def test_complex_parameter(self):
        """Test a complex spectral parameter against the closed form."""
        p = make_regular_potential(0.0, math.pi, zero_potential())
        z = 3.0 + 2.0j
        k = np.sqrt(z)
        state = propagate(p, z, SolutionState(1.0, np.sin(k) / k, np.cos(k)), 2.5)
        assert abs(state.u - np.sin(2.5 * k) / k) < 1e-8 * abs(np.sin(2.5 * k) / k)
        assert abs(state.du - np.cos(2.5 * k)) < 1e-8 * abs(np.cos(2.5 * k))

    def test_bessel_origin_is_not_an_endpoint(self):
        """Test that x = 0 is refused for Bessel kind."""
        p = make_bessel_potential(1.0, math.pi, zero_potential())
        with pytest.raises(IntegrationError):
            propagate(p, 1.0, SolutionState(1.0, 1.0, 2.0), 0.0)


class TestFundamentalSystem:
    """Test suite for fundamental_system and wronskian."""

    def test_free_cosine_sine(self):
        """Test c = cos(x - x0), s = sin(x - x0) at z = 1."""
        p = make_regular_potential(0.0, math.pi, zero_potential())
        c, s = fundamental_system(p, 1.0, 1.0)
        xs = np.array([0.2, 1.0, 2.5])
        assert np.allclose(c(xs)[0], np.cos(xs - 1.0), atol=1e-9)
        assert np.allclose(s(xs)[0], np.sin(xs - 1.0), atol=1e-9)

    def test_wronskian_is_one(self):
        """Test that the Wronskian stays one for a complex z and q = cos x."""
        p = make_regular_potential(0.0, math.pi, cosine_potential())
        c, s = fundamental_system(p, 2.0 + 1.0j, 1.5)
        w = wronskian(c, s, np.linspace(0.1, 3.0, 7))
        assert np.max(np.abs(w - 1.0)) < 1e-8


class TestGrowthRate:
    """Test suite for growth_rate."""

    def test_values(self):
        """Test kappa = Re sqrt(-z) on the axes."""
        assert float(growth_rate(-4.0)) == pytest.approx(2.0)
        assert float(growth_rate(4.0)) == pytest.approx(0.0)
        assert float(growth_rate(2.0j)) == pytest.approx(1.0)
