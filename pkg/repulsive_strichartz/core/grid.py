from functools import cached_property
from typing import Literal, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from repulsive_strichartz.errors import ArgumentError


class Grid(BaseModel):
    """
    Uniform periodic grid on [-L, L)^n with its discrete Fourier lattice.

    Node j sits at x_j = -L + j*dx; frequencies follow the FFT ordering of
    ``scipy.fft.fftfreq`` scaled to angular frequency, so -Δ acts as |ξ|².
    """

    model_config = ConfigDict(frozen=True)

    dimension: Literal[1, 2] = 1
    half_width: float = Field(gt=0)
    points_per_axis: int = Field(ge=8)

    @field_validator("points_per_axis")
    @classmethod
    def _power_of_two(cls, value: int) -> int:
        if value & (value - 1):
            raise ValueError(f"points_per_axis must be a power of two, got {value}")
        return value

    @computed_field  # type: ignore[prop-decorator]
    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.points_per_axis

    @cached_property
    def axis(self) -> np.ndarray:
        nodes = -self.half_width + self.spacing * np.arange(self.points_per_axis)
        nodes.flags.writeable = False
        return nodes

    @cached_property
    def frequencies(self) -> np.ndarray:
        xi = 2.0 * np.pi * np.fft.fftfreq(self.points_per_axis, d=self.spacing)
        xi.flags.writeable = False
        return xi

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dimension

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dimension

    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Broadcastable node coordinates, one array per axis."""
        return tuple(np.meshgrid(*([self.axis] * self.dimension), indexing="ij", sparse=True))

    def radius_squared(self) -> np.ndarray:
        return sum(c**2 for c in self.coordinates())  # type: ignore[return-value]

    def frequency_squared(self) -> np.ndarray:
        mesh = np.meshgrid(*([self.frequencies] * self.dimension), indexing="ij", sparse=True)
        return sum(k**2 for k in mesh)  # type: ignore[return-value]

    def japanese_bracket(self) -> np.ndarray:
        """⟨x⟩ = (1 + |x|²)^{1/2} on the nodes."""
        return np.sqrt(1.0 + self.radius_squared())

    def shell_mask(self, fraction: float = 0.1) -> np.ndarray:
        """Nodes in the outer ``fraction`` of the box along any axis."""
        limit = (1.0 - fraction) * self.half_width
        mask = np.zeros(self.shape, dtype=bool)
        for c in self.coordinates():
            mask = mask | (np.abs(c) > limit)
        return mask


class WaveFunction(BaseModel):
    """Complex amplitudes of a state on a Grid, stored read-only with shape (N,)*n."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: Grid
    values: np.ndarray

    @model_validator(mode="after")
    def _check_values(self) -> "WaveFunction":
        values = np.asarray(self.values, dtype=np.complex128)
        if values.shape != self.grid.shape:
            if values.size == np.prod(self.grid.shape):
                values = values.reshape(self.grid.shape)
            else:
                raise ValueError(f"values of shape {values.shape} do not match grid shape {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("WaveFunction values must be finite")
        if values is self.values or np.shares_memory(values, self.values):
            values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        return self

    def with_values(self, values: np.ndarray) -> "WaveFunction":
        return WaveFunction(grid=self.grid, values=values)

    def scaled(self, factor: complex) -> "WaveFunction":
        return self.with_values(factor * self.values)

    @property
    def l2_norm(self) -> float:
        return float(np.sqrt(self.grid.cell_volume * np.sum(np.abs(self.values) ** 2)))


def as_vector(value: Union[float, Sequence[float]], n: int, name: str) -> np.ndarray:
    vector = np.atleast_1d(np.asarray(value, dtype=float))
    if vector.ndim == 1 and vector.size == 1:
        return np.full(n, vector[0])
    if vector.ndim != 1 or vector.size != n:
        raise ArgumentError(f"{name} must have length {n}, got shape {vector.shape}")
    return vector


def make_gaussian(
    grid: Grid,
    center: Union[float, Sequence[float]] = 0.0,
    width: float = 1.0,
    momentum: Union[float, Sequence[float]] = 0.0,
) -> WaveFunction:
    """exp(-a|x - c|²/2 + i p·x) sampled on the grid."""
    if width <= 0:
        raise ArgumentError(f"Gaussian width must be positive, got {width}")
    c = as_vector(center, grid.dimension, "center")
    p = as_vector(momentum, grid.dimension, "momentum")
    exponent = np.zeros(grid.shape, dtype=np.complex128)
    for axis_coords, c_k, p_k in zip(grid.coordinates(), c, p):
        exponent = exponent - 0.5 * width * (axis_coords - c_k) ** 2 + 1j * p_k * axis_coords
    return WaveFunction(grid=grid, values=np.exp(exponent))
