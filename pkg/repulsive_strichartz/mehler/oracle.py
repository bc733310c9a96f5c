from typing import Sequence, Union

import numpy as np
from scipy.integrate import solve_ivp

from repulsive_strichartz.core.grid import Grid, WaveFunction, as_vector
from repulsive_strichartz.errors import ArgumentError, NumericError


def _riccati_rhs(tau: float):
    tau_sq = tau * tau

    def rhs(_: float, state: np.ndarray) -> np.ndarray:
        A, q, P, _gamma = state
        return np.array(
            [
                -2j * (A * A + tau_sq),
                2.0 * P,
                2.0 * tau_sq * q,
                -1j * (A - P * P - tau_sq * q * q),
            ]
        )

    return rhs


def _evolve_axis(width: float, center: float, momentum: float, tau: float, sigma: float) -> np.ndarray:
    initial = np.array([width, center, momentum, 1j * momentum * center], dtype=np.complex128)
    if sigma == 0:
        return initial
    solution = solve_ivp(
        _riccati_rhs(tau), (0.0, sigma), initial, method="DOP853", rtol=1e-13, atol=1e-14
    )
    if not solution.success:
        raise NumericError(f"Gaussian width ODE failed at sigma={sigma}: {solution.message}")
    return solution.y[:, -1]


def gaussian_oracle(
    grid: Grid,
    center: Union[float, Sequence[float]] = 0.0,
    width: float = 1.0,
    momentum: Union[float, Sequence[float]] = 0.0,
    tau: float = 1.0,
    sigma: float = 0.0,
) -> WaveFunction:
    """
    e^{-iσH₀} applied to make_gaussian(grid, center, width, momentum), from the
    complex-width equations of a quadratic Hamiltonian.

    Per axis the state stays exp(-A(x - q)²/2 + iP(x - q) + γ) with
    A' = -2i(A² + τ²), q' = 2P, P' = 2τ²q, γ' = -i(A - P² - τ²q²);
    the n-dimensional state is the product over axes.
    """
    if width <= 0:
        raise ArgumentError(f"Gaussian width must be positive, got {width}")
    if tau == 0:
        raise ArgumentError("tau must be nonzero")
    centers = as_vector(center, grid.dimension, "center")
    momenta = as_vector(momentum, grid.dimension, "momentum")
    exponent = np.zeros(grid.shape, dtype=np.complex128)
    for coords, c_k, p_k in zip(grid.coordinates(), centers, momenta):
        A, q, P, gamma = _evolve_axis(width, c_k, p_k, tau, sigma)
        offset = coords - q
        exponent = exponent - 0.5 * A * offset**2 + 1j * P * offset + gamma
    return WaveFunction(grid=grid, values=np.exp(exponent))
