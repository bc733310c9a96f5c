import pytest

from repulsive_strichartz.core.grid import Grid, make_gaussian
from repulsive_strichartz.core.potential import HamiltonianSpec, PotentialSpec
from repulsive_strichartz.errors import ArgumentError
from repulsive_strichartz.solver import EvolutionPlan, duhamel_residual

COULOMB_TAIL = HamiltonianSpec(tau=1.0, potential=PotentialSpec.power_decay(1.0, 1.0))


class TestDuhamelResidual:
    def test_free_flow(self):
        """Test that V = 0 reduces both sides to the free flow"""
        f = make_gaussian(Grid(half_width=12.0, points_per_axis=512))
        plan = EvolutionPlan(hamiltonian=HamiltonianSpec(tau=1.0), dt=2**-12, steps=2048)
        assert duhamel_residual(f, plan, 16) <= 1e-6

    def test_second_order_in_nodes(self):
        """Test that doubling the nodes 16 -> 32 divides the residual by 4 at t = 1"""
        f = make_gaussian(Grid(half_width=24.0, points_per_axis=16384))
        plan = EvolutionPlan(hamiltonian=COULOMB_TAIL, dt=2**-11, steps=2048)
        coarse = duhamel_residual(f, plan, 16)
        fine = duhamel_residual(f, plan, 32)
        assert coarse / fine == pytest.approx(4.0, rel=0.2)

    def test_fine_quadrature(self):
        """Test the residual with 128 nodes"""
        f = make_gaussian(Grid(half_width=12.0, points_per_axis=32768))
        plan = EvolutionPlan(hamiltonian=COULOMB_TAIL, dt=2**-11, steps=1024)
        assert duhamel_residual(f, plan, 128) <= 1e-4

    def test_too_few_nodes(self):
        """Test the lower bound on quad_points"""
        f = make_gaussian(Grid(half_width=12.0, points_per_axis=64))
        plan = EvolutionPlan(hamiltonian=COULOMB_TAIL, dt=2**-8, steps=16)
        with pytest.raises(ArgumentError, match="at least 8"):
            duhamel_residual(f, plan, 4)

    def test_nodes_must_divide_steps(self):
        """Test that the nodes must fall on recorded steps"""
        f = make_gaussian(Grid(half_width=12.0, points_per_axis=64))
        plan = EvolutionPlan(hamiltonian=COULOMB_TAIL, dt=2**-8, steps=20)
        with pytest.raises(ArgumentError, match="multiple"):
            duhamel_residual(f, plan, 8)
