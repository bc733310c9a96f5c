import logging
from typing import Any, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.integrate import trapezoid

from repulsive_strichartz.core.grid import WaveFunction
from repulsive_strichartz.core.potential import HamiltonianSpec, eval_potential, same_hamiltonian
from repulsive_strichartz.errors import ArgumentError
from repulsive_strichartz.solver.strang import EvolutionPlan, evolve

logger = logging.getLogger(__name__)


class SmoothingResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    T: float
    value: float
    saturation: float
    norm_f_sq: float

    def summary(self) -> dict[str, Any]:
        return self.model_dump()


def smoothing_integral(f: WaveFunction, spec: HamiltonianSpec, plan: EvolutionPlan) -> SmoothingResult:
    """
    ∫_{-T}^{T} ‖|V|^{1/2} e^{-itH} f‖²_{L²} dt with T = steps·|dt|.

    Both time branches come from evolve, the backward one with dt negated.
    saturation is the relative increment over the half window [-T/2, T/2].
    """
    if not same_hamiltonian(spec, plan.hamiltonian):
        raise ArgumentError("The evolution plan must use the Hamiltonian being smoothed")
    T = abs(plan.final_time)
    norm_f_sq = f.l2_norm**2
    if spec.potential.is_zero:
        return SmoothingResult(T=T, value=0.0, saturation=0.0, norm_f_sq=norm_f_sq)

    forward_plan = plan if plan.dt > 0 else plan.reversed()
    forward = evolve(f, forward_plan)
    backward = evolve(f, forward_plan.reversed())
    samples = list(reversed(backward.samples[1:])) + list(forward.samples)

    weight = np.abs(eval_potential(spec.potential, f.grid))
    cell = f.grid.cell_volume
    times = np.array([s.time for s in samples])
    integrand = np.array([cell * np.sum(weight * np.abs(s.state.values) ** 2) for s in samples])

    value = float(trapezoid(integrand, times))
    half = np.abs(times) <= 0.5 * T * (1 + 1e-12)
    half_value = float(trapezoid(integrand[half], times[half]))
    saturation = (value - half_value) / value if value > 0 else 0.0
    logger.info(f"Smoothing integral over [-{T:.6g}, {T:.6g}]: {value:.6g} (saturation {saturation:.3e})")
    return SmoothingResult(T=T, value=value, saturation=saturation, norm_f_sq=norm_f_sq)


def kato_consistency(
    states: Sequence[WaveFunction], spec: HamiltonianSpec, plan: EvolutionPlan, gamma1: float
) -> list[float]:
    """γ₂ / (‖u‖²·γ₁) for each state, γ₁ the largest |V|^{1/2}-weighted resolvent norm of a scan."""
    if gamma1 <= 0:
        raise ArgumentError(f"gamma1 must be positive, got {gamma1}")
    ratios = []
    for state in states:
        result = smoothing_integral(state, spec, plan)
        ratios.append(result.value / (result.norm_f_sq * gamma1))
    logger.info(f"Kato ratios: {', '.join(f'{r:.4g}' for r in ratios)}")
    return ratios
