from functools import cached_property

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import sparse
from scipy.linalg import eigvalsh_tridiagonal

from repulsive_strichartz.core.grid import Grid
from repulsive_strichartz.core.potential import HamiltonianSpec, eval_potential
from repulsive_strichartz.errors import ArgumentError, UnsupportedDimensionError

MAX_POINTS = 2**14


class DiscreteHamiltonian(BaseModel):
    """
    Dirichlet finite-difference H = -Δ - τ²x² + V on a 1-d grid.

    Tridiagonal: diagonal 2/Δx² - τ²x_j² + V(x_j), off-diagonals -1/Δx².
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: Grid
    spec: HamiltonianSpec
    potential_values: np.ndarray
    diagonal: np.ndarray
    off_diagonal: np.ndarray

    @property
    def tau(self) -> float:
        return self.spec.tau

    @cached_property
    def matrix(self) -> sparse.csc_matrix:
        return sparse.diags(
            [self.off_diagonal, self.diagonal, self.off_diagonal], [-1, 0, 1], format="csc", dtype=float
        )

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def eigenvalues_between(self, lower: float, upper: float) -> np.ndarray:
        """Eigenvalues in the half-open interval (lower, upper]."""
        if upper <= lower:
            return np.empty(0)
        return eigvalsh_tridiagonal(self.diagonal, self.off_diagonal, select="v", select_range=(lower, upper))

    def lowest_eigenvalue(self) -> float:
        return float(eigvalsh_tridiagonal(self.diagonal, self.off_diagonal, select="i", select_range=(0, 0))[0])

    def free(self) -> "DiscreteHamiltonian":
        """The same operator with V removed."""
        return assemble(self.grid, self.spec.free())


def assemble(grid: Grid, spec: HamiltonianSpec) -> DiscreteHamiltonian:
    if grid.dimension != 1:
        raise UnsupportedDimensionError(f"Discrete Hamiltonians are one-dimensional, got n={grid.dimension}")
    if grid.points_per_axis > MAX_POINTS:
        raise ArgumentError(f"At most {MAX_POINTS} points per axis, got {grid.points_per_axis}")
    inverse_square = 1.0 / grid.spacing**2
    potential = eval_potential(spec.potential, grid)
    diagonal = 2.0 * inverse_square - spec.tau**2 * grid.axis**2 + potential
    off_diagonal = np.full(grid.points_per_axis - 1, -inverse_square)
    for array in (potential, diagonal, off_diagonal):
        array.flags.writeable = False
    return DiscreteHamiltonian(
        grid=grid, spec=spec, potential_values=potential, diagonal=diagonal, off_diagonal=off_diagonal
    )
