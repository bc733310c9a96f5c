"""Split-step evolution under the full Hamiltonian, the Duhamel check and the retarded estimate."""

from repulsive_strichartz.solver.duhamel import duhamel_residual
from repulsive_strichartz.solver.retarded import RetardedEstimate, retarded_response, retarded_strichartz
from repulsive_strichartz.solver.strang import (
    EvolutionPlan,
    EvolutionSample,
    SamplingSettings,
    SplitStepPropagator,
    Trajectory,
    boundary_mass,
    evolve,
    strang_step,
)

__all__ = [
    "duhamel_residual",
    "RetardedEstimate",
    "retarded_response",
    "retarded_strichartz",
    "EvolutionPlan",
    "EvolutionSample",
    "SamplingSettings",
    "SplitStepPropagator",
    "Trajectory",
    "boundary_mass",
    "evolve",
    "strang_step",
]
