import logging
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from repulsive_strichartz.core.grid import Grid
from repulsive_strichartz.errors import ArgumentError

logger = logging.getLogger(__name__)


class PotentialSpec(BaseModel):
    """
    The perturbation V.

    - zero: V ≡ 0
    - power_decay: V(x) = c⟨x⟩^{-δ}
    - tabulated: node values supplied directly (decay class not verifiable)
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: Literal["zero", "power_decay", "tabulated"] = "zero"
    amplitude: float = 0.0
    decay: float = Field(default=1.0, gt=0)
    table: Optional[np.ndarray] = None

    @field_validator("table")
    @classmethod
    def _finite_real_table(cls, table: Optional[np.ndarray]) -> Optional[np.ndarray]:
        if table is None:
            return None
        values = np.array(table, copy=True)
        if np.iscomplexobj(values):
            raise ValueError("Tabulated potential must be real")
        values = values.astype(float)
        if not np.all(np.isfinite(values)):
            raise ValueError("Tabulated potential must be finite")
        values.flags.writeable = False
        return values

    @model_validator(mode="after")
    def _table_matches_kind(self) -> "PotentialSpec":
        if self.kind == "tabulated" and self.table is None:
            raise ValueError("kind 'tabulated' requires a table")
        if self.kind != "tabulated" and self.table is not None:
            raise ValueError(f"kind '{self.kind}' does not take a table")
        return self

    @classmethod
    def zero(cls) -> "PotentialSpec":
        return cls(kind="zero")

    @classmethod
    def power_decay(cls, amplitude: float, decay: float) -> "PotentialSpec":
        return cls(kind="power_decay", amplitude=amplitude, decay=decay)

    @classmethod
    def tabulated(cls, table: np.ndarray) -> "PotentialSpec":
        return cls(kind="tabulated", table=table)

    @property
    def is_zero(self) -> bool:
        if self.kind == "zero":
            return True
        if self.kind == "power_decay":
            return self.amplitude == 0.0
        return not np.any(self.table)

    @property
    def verified_class(self) -> bool:
        """False for tabulated potentials, whose derivative bounds cannot be certified."""
        return self.kind != "tabulated"


class HamiltonianSpec(BaseModel):
    """H = -Δ - τ²x² + V."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    tau: float
    potential: PotentialSpec = Field(default_factory=PotentialSpec.zero)

    @field_validator("tau")
    @classmethod
    def _nonzero_tau(cls, tau: float) -> float:
        if tau == 0 or not np.isfinite(tau):
            raise ValueError("tau must be a nonzero finite real")
        return tau

    def free(self) -> "HamiltonianSpec":
        """The same τ with V removed."""
        return HamiltonianSpec(tau=self.tau)


def eval_potential(spec: PotentialSpec, grid: Grid) -> np.ndarray:
    """Samples of V on the grid nodes."""
    if spec.kind == "zero":
        return np.zeros(grid.shape)
    if spec.kind == "power_decay":
        return spec.amplitude * (1.0 + grid.radius_squared()) ** (-0.5 * spec.decay) * np.ones(grid.shape)
    assert spec.table is not None
    table = spec.table
    if table.shape != grid.shape:
        if table.size != np.prod(grid.shape):
            raise ArgumentError(f"Tabulated potential has {table.size} values, grid has {int(np.prod(grid.shape))} nodes")
        table = table.reshape(grid.shape)
    logger.warning("Tabulated potential used: decay class is unverified")
    return np.array(table, dtype=float)


def same_hamiltonian(first: HamiltonianSpec, second: HamiltonianSpec) -> bool:
    """Value equality of two Hamiltonians, tables compared elementwise."""
    a, b = first.potential, second.potential
    if first.tau != second.tau or (a.kind, a.amplitude, a.decay) != (b.kind, b.amplitude, b.decay):
        return False
    if a.table is None or b.table is None:
        return a.table is b.table
    return a.table.shape == b.table.shape and bool(np.array_equal(a.table, b.table))
