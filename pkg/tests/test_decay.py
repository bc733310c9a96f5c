import math

import numpy as np
import pytest

from repulsive_strichartz.core.grid import Grid, make_gaussian
from repulsive_strichartz.core.potential import HamiltonianSpec, PotentialSpec
from repulsive_strichartz.errors import ArgumentError
from repulsive_strichartz.mehler import (
    decay_fit,
    dispersive_bound,
    kappa_envelope_constant,
    weighted_decay_integrand,
)

FIT_TIMES = np.arange(3.0, 8.0 + 1e-12, 0.5)


class TestDecayFit:
    @pytest.fixture
    def line(self):
        return Grid(half_width=8.0, points_per_axis=128)

    def test_rate_1d(self, line):
        """Test the fitted rate for n = 1, tau = 1"""
        result = decay_fit(make_gaussian(line), HamiltonianSpec(tau=1.0), FIT_TIMES)
        assert result.fitted_rate == pytest.approx(1.0, rel=0.05)
        assert result.reference_rate == 1.0
        assert result.bound_rate == 0.5
        assert result.fitted_rate >= result.bound_rate - 0.05

    def test_rate_2d(self):
        """Test the fitted rate for n = 2, tau = 1"""
        plane = Grid(dimension=2, half_width=8.0, points_per_axis=128)
        result = decay_fit(make_gaussian(plane), HamiltonianSpec(tau=1.0), FIT_TIMES)
        assert result.fitted_rate == pytest.approx(2.0, rel=0.05)
        assert result.reference_rate == 2.0

    def test_rate_half_tau(self, line):
        """Test the fitted rate for n = 1, tau = 1/2"""
        result = decay_fit(make_gaussian(line), HamiltonianSpec(tau=0.5), FIT_TIMES)
        assert result.fitted_rate == pytest.approx(0.5, rel=0.05)
        assert result.fitted_rate >= result.bound_rate - 0.05

    def test_non_monotone_times(self, line):
        """Test that unsorted times are rejected"""
        with pytest.raises(ArgumentError):
            decay_fit(make_gaussian(line), HamiltonianSpec(tau=1.0), [3.0, 5.0, 4.0])

    def test_window_too_early(self, line):
        """Test the sinh(2 tau t_min) >= 1 precondition"""
        with pytest.raises(ArgumentError, match="sinh"):
            decay_fit(make_gaussian(line), HamiltonianSpec(tau=1.0), [0.1, 1.0, 2.0])

    def test_rejects_potential(self, line):
        """Test that a nonzero potential is rejected"""
        spec = HamiltonianSpec(tau=1.0, potential=PotentialSpec.power_decay(1.0, 1.0))
        with pytest.raises(ArgumentError):
            decay_fit(make_gaussian(line), spec, FIT_TIMES)

    def test_outputs(self, line):
        """Test the CSV header and the JSON summary keys"""
        result = decay_fit(make_gaussian(line), HamiltonianSpec(tau=1.0), FIT_TIMES)
        assert result.to_csv().startswith("sigma,value\n3,")
        assert {"rate", "intercept", "r_squared", "reference_rate"} <= set(result.summary())
        assert result.r_squared > 0.99


class TestWeightedDecay:
    @pytest.fixture
    def phi(self):
        return make_gaussian(Grid(half_width=16.0, points_per_axis=1024))

    @pytest.fixture
    def sigmas(self):
        return np.arange(0.5, 12.0 + 1e-12, 0.25)

    def test_envelope_slope(self, phi, sigmas):
        """Test the log-log slope against |sinh(2 tau sigma)| on [2, 6]"""
        result = weighted_decay_integrand(1.0, 2.0, HamiltonianSpec(tau=1.0), phi, sigmas)
        assert result.reference_slope == -0.5
        assert result.slope <= result.reference_slope + 0.05

    def test_saturation(self, phi, sigmas):
        """Test that the integral saturates under window doubling"""
        result = weighted_decay_integrand(1.0, 2.0, HamiltonianSpec(tau=1.0), phi, sigmas)
        assert result.integral > 0
        assert abs(result.increment) < 0.01

    def test_monotone_beyond_one(self, phi, sigmas):
        """Test that the integrand decreases beyond sigma = 1"""
        result = weighted_decay_integrand(1.0, 2.0, HamiltonianSpec(tau=1.0), phi, sigmas)
        tail = result.series.norms[result.series.times >= 1.0]
        assert np.all(np.diff(tail) <= 0)

    def test_weight_constant(self, phi, sigmas):
        """Test the grid value of the envelope constant ||<x>^{-1}||_{L^2}^2"""
        result = weighted_decay_integrand(1.0, 2.0, HamiltonianSpec(tau=1.0), phi, sigmas)
        assert result.weight_constant == pytest.approx(2 * math.atan(16.0), rel=1e-3)

    @pytest.mark.parametrize(
        "rho,Q,match",
        [(0.4, 2.0, "rho\\*Q > n"), (1.0, 1.5, "at least 2")],
    )
    def test_hypotheses(self, phi, sigmas, rho, Q, match):
        """Test that violated hypotheses are named"""
        with pytest.raises(ArgumentError, match=match):
            weighted_decay_integrand(rho, Q, HamiltonianSpec(tau=1.0), phi, sigmas)

    def test_q_above_dimension(self):
        """Test the Q > n hypothesis in two dimensions with rho*Q > n holding"""
        phi = make_gaussian(Grid(dimension=2, half_width=4.0, points_per_axis=16))
        with pytest.raises(ArgumentError, match="Q > n"):
            weighted_decay_integrand(2.0, 2.0, HamiltonianSpec(tau=1.0), phi, [1.0, 2.0])

    def test_positive_sigmas(self, phi):
        """Test that sigma = 0 is rejected"""
        with pytest.raises(ArgumentError):
            weighted_decay_integrand(1.0, 2.0, HamiltonianSpec(tau=1.0), phi, [0.0, 1.0])


class TestKappaEnvelope:
    @pytest.fixture
    def times(self):
        return np.geomspace(1e-6, 100.0, 400)

    def test_critical_kappa(self, times):
        """Test that kappa = n/2 gives the t -> 0 limit 1"""
        assert kappa_envelope_constant(1.0, 1, 0.5, times) == pytest.approx(1.0, rel=1e-6)

    def test_large_kappa_finite(self, times):
        """Test that kappa > n/2 stays finite and grows with the window"""
        short = kappa_envelope_constant(1.0, 1, 1.0, times[times <= 10.0])
        long = kappa_envelope_constant(1.0, 1, 1.0, times)
        assert math.isfinite(long)
        assert long >= short

    def test_small_kappa_blows_up(self):
        """Test growth like |t|^{kappa - n/2} as the window reaches 0"""
        wide = kappa_envelope_constant(1.0, 1, 0.25, np.geomspace(1e-2, 1.0, 50))
        narrow = kappa_envelope_constant(1.0, 1, 0.25, np.geomspace(1e-6, 1.0, 50))
        assert narrow / wide == pytest.approx(10.0, rel=0.01)

    def test_invalid(self, times):
        """Test argument validation"""
        with pytest.raises(ArgumentError):
            kappa_envelope_constant(0.0, 1, 0.5, times)
        with pytest.raises(ArgumentError):
            kappa_envelope_constant(1.0, 1, 0.5, [0.0, 1.0])


class TestDispersiveBound:
    def test_value(self):
        """Test the kernel prefactor magnitude"""
        assert dispersive_bound(1.0, 1.0, 1) == pytest.approx((1 / (2 * math.pi * math.sinh(2.0))) ** 0.5)
        assert dispersive_bound(1.0, 1.0, 2) == pytest.approx(1 / (2 * math.pi * math.sinh(2.0)))
