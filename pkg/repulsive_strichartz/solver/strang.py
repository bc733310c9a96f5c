import logging
import math
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy import fft

from repulsive_strichartz.core.artifacts import csv_text
from repulsive_strichartz.core.grid import Grid, WaveFunction
from repulsive_strichartz.core.norms import lr_norm
from repulsive_strichartz.core.potential import HamiltonianSpec, eval_potential
from repulsive_strichartz.errors import DomainTooSmallError, StepSizeError

logger = logging.getLogger(__name__)


class SamplingSettings(BaseModel):
    """Guards applied by the split-step solver."""

    model_config = ConfigDict(frozen=True)

    shell_fraction: float = Field(default=0.1, gt=0, lt=1)
    boundary_mass_limit: float = Field(default=1e-6, gt=0)
    phase_limit: float = Field(default=math.pi / 4, gt=0)


class EvolutionPlan(BaseModel):
    """
    Time stepping of e^{-itH}. The sign of dt is the direction of time; the
    run covers t = 0 .. steps*dt and records every record_every steps plus the
    final step.
    """

    model_config = ConfigDict(frozen=True)

    hamiltonian: HamiltonianSpec
    dt: float
    steps: int = Field(ge=1)
    record_every: int = Field(default=1, ge=1)
    sampling: SamplingSettings = Field(default_factory=SamplingSettings)

    @field_validator("dt")
    @classmethod
    def _nonzero_dt(cls, dt: float) -> float:
        if dt == 0 or not math.isfinite(dt):
            raise ValueError("dt must be a nonzero finite real")
        return dt

    @property
    def final_time(self) -> float:
        return self.steps * self.dt

    def is_recorded(self, step: int) -> bool:
        return step % self.record_every == 0 or step == self.steps

    def reversed(self) -> "EvolutionPlan":
        return self.model_copy(update={"dt": -self.dt})


def _shell_mass(values: np.ndarray, shell: np.ndarray) -> float:
    density = np.abs(values) ** 2
    total = density.sum()
    if total == 0:
        return 0.0
    return float(density[shell].sum() / total)


def boundary_mass(u: WaveFunction, shell_fraction: float = 0.1) -> float:
    """Fraction of |u|² carried by nodes in the outer shell of the box."""
    return _shell_mass(u.values, u.grid.shell_mask(shell_fraction))


class SplitStepPropagator:
    """
    Strang splitting for H = -Δ - τ²x² + V: half potential step, full
    kinetic step in Fourier space, half potential step.

    The quadratic term rides with V in the multiplicative factor.
    """

    def __init__(self, grid: Grid, plan: EvolutionPlan):
        self.grid = grid
        self.plan = plan
        self.potential = eval_potential(plan.hamiltonian.potential, grid)
        multiplier = plan.hamiltonian.tau**2 * grid.radius_squared() - self.potential
        peak = float(np.max(np.abs(multiplier)))
        self.max_dt = plan.sampling.phase_limit / peak if peak > 0 else math.inf
        if abs(plan.dt) > self.max_dt:
            raise StepSizeError(
                f"Time step |dt|={abs(plan.dt):.6g} exceeds the phase-resolution limit {self.max_dt:.6g}",
                max_dt=self.max_dt,
            )
        self._exp_potential = np.exp(0.5j * plan.dt * multiplier)
        self._exp_kinetic = np.exp(-1j * plan.dt * grid.frequency_squared())

    def __call__(self, values: np.ndarray) -> np.ndarray:
        psi = fft.fftn(values * self._exp_potential)
        psi = fft.ifftn(psi * self._exp_kinetic)
        return psi * self._exp_potential

    def step(self, u: WaveFunction) -> WaveFunction:
        return u.with_values(self(u.values))


def strang_step(u: WaveFunction, plan: EvolutionPlan) -> WaveFunction:
    """One Strang step of size plan.dt."""
    return SplitStepPropagator(u.grid, plan).step(u)


class EvolutionSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    time: float
    state: WaveFunction
    boundary_mass: float


class Trajectory(BaseModel):
    model_config = ConfigDict(frozen=True)

    plan: EvolutionPlan
    samples: list[EvolutionSample]

    @property
    def series(self) -> list[tuple[float, WaveFunction]]:
        return [(sample.time, sample.state) for sample in self.samples]

    @property
    def times(self) -> np.ndarray:
        return np.array([sample.time for sample in self.samples])

    @property
    def final(self) -> WaveFunction:
        return self.samples[-1].state

    @property
    def unverified_class(self) -> bool:
        return not self.plan.hamiltonian.potential.verified_class

    def to_csv(self) -> str:
        rows = (
            (s.time, s.state.l2_norm, lr_norm(s.state, math.inf), s.boundary_mass)
            for s in self.samples
        )
        return csv_text(("t", "l2", "linf", "boundary_mass"), rows)

    def summary(self) -> dict[str, Any]:
        return {
            "final_time": self.plan.final_time,
            "samples": len(self.samples),
            "max_boundary_mass": max(s.boundary_mass for s in self.samples),
            "unverified_class": self.unverified_class,
        }


def _checked_mass(values: np.ndarray, shell: np.ndarray, time: float, settings: SamplingSettings) -> float:
    mass = _shell_mass(values, shell)
    if mass > settings.boundary_mass_limit:
        raise DomainTooSmallError(
            f"Boundary mass {mass:.3e} exceeds {settings.boundary_mass_limit:.1e} at t={time:.6g}; enlarge the box",
            time=time,
            boundary_mass=mass,
        )
    return mass


def evolve(f: WaveFunction, plan: EvolutionPlan) -> Trajectory:
    """
    Strang evolution of f, sampled at t = 0 and every record_every steps.

    The boundary shell is checked after every step, not only at samples.

    Raises:
        StepSizeError: dt does not resolve the potential phase.
        DomainTooSmallError: the boundary-shell mass exceeds its limit.
    """
    propagator = SplitStepPropagator(f.grid, plan)
    settings = plan.sampling
    shell = f.grid.shell_mask(settings.shell_fraction)

    mass = _checked_mass(f.values, shell, 0.0, settings)
    samples = [EvolutionSample(time=0.0, state=f, boundary_mass=mass)]
    values = f.values
    for step in range(1, plan.steps + 1):
        values = propagator(values)
        time = step * plan.dt
        mass = _checked_mass(values, shell, time, settings)
        if plan.is_recorded(step):
            samples.append(EvolutionSample(time=time, state=f.with_values(values), boundary_mass=mass))
    logger.info(f"Evolved {plan.steps} steps of dt={plan.dt} ({len(samples)} samples)")
    return Trajectory(plan=plan, samples=samples)
