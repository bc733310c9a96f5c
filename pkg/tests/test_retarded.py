import math

import numpy as np
import pytest

from repulsive_strichartz.core.grid import Grid, WaveFunction, make_gaussian
from repulsive_strichartz.core.potential import HamiltonianSpec, PotentialSpec
from repulsive_strichartz.errors import ArgumentError
from repulsive_strichartz.mehler import PropagatorParams, propagate_exact
from repulsive_strichartz.pairs import Pair
from repulsive_strichartz.solver import retarded_response, retarded_strichartz

FREE = HamiltonianSpec(tau=1.0)
ENERGY = Pair(q=math.inf, r=2)


def relative_error(u: WaveFunction, v: WaveFunction) -> float:
    return float(np.linalg.norm(u.values - v.values) / np.linalg.norm(v.values))


def backward(phi: WaveFunction, s: float) -> WaveFunction:
    """e^{isH₀}phi"""
    return propagate_exact(phi, PropagatorParams(tau=1.0, sigma=-s))


@pytest.fixture
def phi():
    return make_gaussian(Grid(half_width=16.0, points_per_axis=2048))


def bump(phi: WaveFunction, t_max: float, dt: float = 0.125):
    """sin(πs) phi on [0, 1], zero afterwards"""
    times = dt * np.arange(round(t_max / dt) + 1)
    return [(float(t), phi.scaled(math.sin(math.pi * t) if t <= 1.0 else 0.0)) for t in times]


class TestRetardedResponse:
    def test_backward_forcing(self, phi):
        """Test that F(s) = e^{isH₀}phi gives w(t) = t e^{itH₀}phi at every sample"""
        forcing = [(k / 8, backward(phi, k / 8)) for k in range(7)]
        response = retarded_response(forcing, FREE)
        assert [t for t, _ in response] == [t for t, _ in forcing]
        assert np.all(response[0][1].values == 0)
        for t, w in response[1:]:
            assert relative_error(w, backward(phi, t).scaled(t)) < 1e-6

    def test_free_flow_only(self, phi):
        """Test that a nonzero potential is rejected"""
        spec = HamiltonianSpec(tau=1.0, potential=PotentialSpec.power_decay(1.0, 1.0))
        with pytest.raises(ArgumentError, match="free flow"):
            retarded_response(bump(phi, 1.0), spec)

    def test_must_start_at_zero(self, phi):
        """Test that the forcing samples start at t = 0"""
        with pytest.raises(ArgumentError, match="t = 0"):
            retarded_response([(0.5, phi), (1.0, phi)], FREE)

    def test_increasing_times(self, phi):
        """Test that repeated times are rejected"""
        with pytest.raises(ArgumentError, match="strictly increasing"):
            retarded_response([(0.0, phi), (0.5, phi), (0.5, phi)], FREE)

    def test_single_sample(self, phi):
        """Test that one sample is not a forcing"""
        with pytest.raises(ArgumentError, match="two time samples"):
            retarded_response([(0.0, phi)], FREE)

    def test_one_grid(self, phi):
        """Test that samples on different grids are rejected"""
        other = make_gaussian(Grid(half_width=16.0, points_per_axis=1024))
        with pytest.raises(ArgumentError, match="one grid"):
            retarded_response([(0.0, phi), (0.125, other)], FREE)


class TestRetardedStrichartz:
    def test_energy_pair(self, phi):
        """Test that (inf, 2) against (inf, 2) gives ratio one for a forcing transported by the flow"""
        forcing = [(k / 8, backward(phi, k / 8)) for k in range(7)]
        estimate = retarded_strichartz(forcing, FREE, ENERGY, ENERGY)
        assert estimate.forcing_norm == pytest.approx(0.75 * phi.l2_norm, rel=1e-9)
        assert estimate.response_norm == pytest.approx(0.75 * phi.l2_norm, rel=1e-6)
        assert estimate.ratio == pytest.approx(1.0, rel=1e-6)

    @pytest.mark.parametrize("q, r", [(math.inf, 2), (4, math.inf), (2, math.inf)])
    def test_bounded_and_saturating(self, phi, q, r):
        """Test that the ratio is bounded and stops growing once the forcing is off"""
        pair = Pair(q=q, r=r)
        short = retarded_strichartz(bump(phi, 4.0), FREE, pair, ENERGY)
        long = retarded_strichartz(bump(phi, 8.0), FREE, pair, ENERGY)
        assert 0 < short.ratio < 2
        assert long.ratio == pytest.approx(short.ratio, rel=0.02)
        assert long.forcing_norm == pytest.approx(short.forcing_norm, rel=1e-12)

    def test_summary(self, phi):
        """Test the exponents reported with the ratio"""
        estimate = retarded_strichartz(bump(phi, 2.0), FREE, Pair(q=2, r=math.inf), ENERGY)
        summary = estimate.summary()
        assert (summary["q"], summary["r"]) == ("2", "inf")
        assert (summary["q_dual"], summary["r_dual"]) == ("1", "2")
        assert summary["ratio"] == estimate.ratio
        assert len(estimate.series.times) == 17

    def test_inadmissible_pair(self, phi):
        """Test that a pair outside the repulsive range is named in the error"""
        with pytest.raises(ArgumentError, match="pair .*q >= 2"):
            retarded_strichartz(bump(phi, 2.0), FREE, Pair(q=1.5, r=2), ENERGY)

    def test_inadmissible_source_pair(self, phi):
        """Test that the forcing pair is checked too"""
        with pytest.raises(ArgumentError, match="source_pair"):
            retarded_strichartz(bump(phi, 2.0), FREE, ENERGY, Pair(q=2, r=1))

    def test_zero_forcing(self, phi):
        """Test that an identically zero forcing is rejected"""
        forcing = [(0.0, phi.scaled(0.0)), (0.125, phi.scaled(0.0))]
        with pytest.raises(ArgumentError, match="identically zero"):
            retarded_strichartz(forcing, FREE, ENERGY, ENERGY)
