import logging

import numpy as np

from repulsive_strichartz.core.grid import WaveFunction
from repulsive_strichartz.core.potential import eval_potential
from repulsive_strichartz.errors import ArgumentError
from repulsive_strichartz.mehler.propagator import PropagatorParams, propagate_exact
from repulsive_strichartz.solver.strang import EvolutionPlan, evolve

logger = logging.getLogger(__name__)


def duhamel_residual(f: WaveFunction, plan: EvolutionPlan, quad_points: int) -> float:
    """
    Relative l² residual of e^{-itH}f = e^{-itH₀}f - i∫₀^t e^{-i(t-s)H₀} V e^{-isH}f ds
    at t = steps*dt.

    The full flow comes from evolve, recorded at the quad_points + 1 trapezoid
    nodes; the free flow is the exact Mehler propagator. With V = 0 the
    integral term is identically zero and is not evaluated.

    Note that the shortest free propagation is t/quad_points, so the grid
    must satisfy the chirp guard there (see chirp_sampling_requirement).
    """
    if quad_points < 8:
        raise ArgumentError(f"quad_points must be at least 8, got {quad_points}")
    if plan.steps % quad_points:
        raise ArgumentError(f"steps={plan.steps} is not a multiple of quad_points={quad_points}")

    hamiltonian = plan.hamiltonian
    sampled = plan.model_copy(update={"record_every": plan.steps // quad_points})
    trajectory = evolve(f, sampled)
    t = plan.final_time
    lhs = trajectory.final.values

    rhs = propagate_exact(f, PropagatorParams(tau=hamiltonian.tau, sigma=t)).values
    if not hamiltonian.potential.is_zero:
        potential = eval_potential(hamiltonian.potential, f.grid)
        h = t / quad_points
        integral = np.zeros(f.grid.shape, dtype=np.complex128)
        for j, sample in enumerate(trajectory.samples):
            weight = 0.5 * h if j in (0, quad_points) else h
            source = sample.state.with_values(potential * sample.state.values)
            outer = propagate_exact(source, PropagatorParams(tau=hamiltonian.tau, sigma=t - sample.time))
            integral += weight * outer.values
        rhs = rhs - 1j * integral

    residual = float(np.linalg.norm(lhs - rhs) / np.linalg.norm(lhs))
    logger.info(f"Duhamel residual at t={t:.6g} with {quad_points} quadrature nodes: {residual:.3e}")
    return residual
