import logging
import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator
from scipy.signal import czt

from repulsive_strichartz.core.grid import Grid, WaveFunction
from repulsive_strichartz.errors import ArgumentError, DomainTooSmallError, RefinementRequiredError

logger = logging.getLogger(__name__)


class PropagatorParams(BaseModel):
    """Coupling τ of H₀ = -Δ - τ²x² and the signed propagation time σ."""

    model_config = ConfigDict(frozen=True)

    tau: float
    sigma: float

    @field_validator("tau")
    @classmethod
    def _nonzero_tau(cls, tau: float) -> float:
        if tau == 0 or not math.isfinite(tau):
            raise ValueError("tau must be a nonzero finite real")
        return tau

    @field_validator("sigma")
    @classmethod
    def _finite_sigma(cls, sigma: float) -> float:
        if not math.isfinite(sigma):
            raise ValueError("sigma must be finite")
        return sigma

    @property
    def is_identity(self) -> bool:
        return self.sigma == 0.0


class _KernelCoefficients:
    """Per-axis coefficients of C·exp(iα(x² + y²) - iβxy)."""

    def __init__(self, params: PropagatorParams):
        angle = 2.0 * params.tau * params.sigma
        sinh = math.sinh(angle)
        self.alpha = params.tau * math.cosh(angle) / (2.0 * sinh)
        self.beta = params.tau / sinh
        # principal root: phase e^{-iπ/4·sign σ}
        self.prefactor = np.sqrt(complex(params.tau / (2.0 * math.pi * sinh)) / 1j)


def chirp_sampling_requirement(grid: Grid, params: PropagatorParams) -> tuple[float, int]:
    """
    Largest instantaneous frequency of the kernel chirp over the box,
    |τ|L·coth(|τσ|), and the smallest admissible points_per_axis at this
    half-width. σ = 0 has no requirement.
    """
    if params.is_identity:
        return 0.0, 8
    angle = abs(params.tau * params.sigma)
    max_frequency = abs(params.tau) * grid.half_width / math.tanh(angle)
    # strict: 2L·f/N < π
    needed = 2.0 * grid.half_width * max_frequency / math.pi
    min_points = 8
    while min_points <= needed:
        min_points *= 2
    return max_frequency, min_points


def _check_sampling(grid: Grid, params: PropagatorParams) -> None:
    max_frequency, min_points = chirp_sampling_requirement(grid, params)
    nyquist = math.pi / grid.spacing
    if max_frequency >= nyquist:
        raise RefinementRequiredError(
            f"Mehler chirp at sigma={params.sigma} reaches frequency {max_frequency:.6g} >= "
            f"Nyquist {nyquist:.6g}; use at least {min_points} points per axis",
            min_points=min_points,
        )


def _along_axis(vector: np.ndarray, axis: int, dimension: int) -> np.ndarray:
    shape = [1] * dimension
    shape[axis] = vector.size
    return vector.reshape(shape)


def norm_loss(u: WaveFunction, out: WaveFunction) -> float:
    """Relative l² norm lost by the box between an input and its propagated state."""
    norm_in = u.l2_norm
    return 0.0 if norm_in == 0 else 1.0 - out.l2_norm / norm_in


def propagate_exact(
    u: WaveFunction, params: PropagatorParams, max_norm_loss: Optional[float] = None
) -> WaveFunction:
    """
    e^{-iσH₀}u on the same grid.

    Each axis factors as chirp multiply, chirp-z transform, chirp multiply:
    with x_k = -L + kΔ the kernel phase -βx_k y_j splits into terms linear in
    j and k plus -βΔ²jk, so the inner sum is a CZT with w = e^{-iβΔ²}.

    The result is the exact flow restricted to the box: mass that leaves
    [-L, L)^n is dropped, not wrapped around. With max_norm_loss set, a
    relative l² loss above it is an error.

    Raises:
        RefinementRequiredError: the chirp is not resolved by the grid.
        DomainTooSmallError: more than max_norm_loss of the norm left the box.
    """
    if params.is_identity:
        return u
    grid = u.grid
    _check_sampling(grid, params)
    coeffs = _KernelCoefficients(params)
    N = grid.points_per_axis
    dx = grid.spacing
    L = grid.half_width
    x = grid.axis
    index = np.arange(N)
    linear = np.exp(1j * coeffs.beta * L * dx * index)
    input_chirp = np.exp(1j * coeffs.alpha * x**2) * linear
    output_chirp = (
        coeffs.prefactor * dx * np.exp(1j * coeffs.alpha * x**2 - 1j * coeffs.beta * L * L) * linear
    )
    w = np.exp(-1j * coeffs.beta * dx * dx)

    values = u.values
    for axis in range(grid.dimension):
        weighted = values * _along_axis(input_chirp, axis, grid.dimension)
        summed = czt(weighted, m=N, w=w, a=1.0, axis=axis)
        values = summed * _along_axis(output_chirp, axis, grid.dimension)
    out = u.with_values(values)
    loss = norm_loss(u, out)
    logger.debug(f"Propagated {grid.shape} state by sigma={params.sigma} with tau={params.tau}, norm loss {loss:.3e}")
    if max_norm_loss is not None and abs(loss) > max_norm_loss:
        raise DomainTooSmallError(
            f"Propagation by sigma={params.sigma} lost {loss:.3e} of the l2 norm (limit {max_norm_loss:.1e}); "
            f"enlarge the box",
            time=params.sigma,
            boundary_mass=loss,
        )
    return out


def kernel_matrix(grid: Grid, params: PropagatorParams) -> np.ndarray:
    """Dense one-axis kernel matrix K[k, j] = C·Δ·exp(iα(x_k² + y_j²) - iβx_k y_j)."""
    coeffs = _KernelCoefficients(params)
    x = grid.axis
    phase = coeffs.alpha * (x[:, None] ** 2 + x[None, :] ** 2) - coeffs.beta * np.outer(x, x)
    return coeffs.prefactor * grid.spacing * np.exp(1j * phase)


def propagate_quadrature(u: WaveFunction, params: PropagatorParams) -> WaveFunction:
    """Direct O(N²) quadrature of the Mehler integral, used as a reference for propagate_exact."""
    if params.is_identity:
        return u
    grid = u.grid
    if grid.points_per_axis > 4096:
        raise ArgumentError(f"Dense quadrature is limited to 4096 points per axis, got {grid.points_per_axis}")
    kernel = kernel_matrix(grid, params)
    values = u.values
    for axis in range(grid.dimension):
        values = np.moveaxis(np.tensordot(kernel, values, axes=([1], [axis])), 0, axis)
    return u.with_values(values)
