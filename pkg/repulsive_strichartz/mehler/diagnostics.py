"""
Decay diagnostics of the free repulsive flow: the L∞ decay rate, the weighted
local-decay integrand and the polynomial envelope constant.
"""

import logging
import math
from typing import Any, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.integrate import trapezoid
from scipy.stats import linregress

from repulsive_strichartz.core.artifacts import csv_text
from repulsive_strichartz.core.grid import WaveFunction
from repulsive_strichartz.core.norms import NormSeries, lr_norm, window_increment
from repulsive_strichartz.core.potential import HamiltonianSpec
from repulsive_strichartz.errors import ArgumentError
from repulsive_strichartz.mehler.propagator import PropagatorParams, propagate_exact

logger = logging.getLogger(__name__)


def _strictly_increasing(times: Sequence[float], name: str = "times") -> np.ndarray:
    array = np.asarray(times, dtype=float)
    if array.ndim != 1 or array.size < 2:
        raise ArgumentError(f"{name} must be a 1-d array with at least two entries")
    if np.any(np.diff(array) <= 0):
        raise ArgumentError(f"{name} must be strictly increasing")
    return array


def _require_free(hamiltonian: HamiltonianSpec) -> None:
    if not hamiltonian.potential.is_zero:
        raise ArgumentError("Free-flow diagnostics need a Hamiltonian with zero potential")


def log_abs_sinh(x: np.ndarray) -> np.ndarray:
    """log|sinh x| without overflow for large |x|."""
    a = np.abs(np.asarray(x, dtype=float))
    return a + np.log1p(-np.exp(-2.0 * a)) - math.log(2.0)


class DecayFit(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    window: tuple[float, float]
    fitted_rate: float
    reference_rate: float
    bound_rate: float
    intercept: float
    r_squared: float
    series: NormSeries

    @model_validator(mode="after")
    def _check(self) -> "DecayFit":
        if not self.window[0] < self.window[1]:
            raise ValueError("window must satisfy t_min < t_max")
        if not 0.0 <= self.r_squared <= 1.0:
            raise ValueError("r_squared must lie in [0, 1]")
        return self

    def to_csv(self) -> str:
        return csv_text(("sigma", "value"), zip(self.series.times, self.series.norms))

    def summary(self) -> dict[str, Any]:
        return {
            "rate": self.fitted_rate,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "reference_rate": self.reference_rate,
            "bound_rate": self.bound_rate,
            "window": list(self.window),
        }


def decay_fit(f: WaveFunction, hamiltonian: HamiltonianSpec, times: Sequence[float]) -> DecayFit:
    """
    Fit log‖e^{-itH₀}f‖_∞ ≈ b - rate·t.

    reference_rate is nτ from the kernel prefactor; bound_rate is the weaker
    nτ/2 of the |sinh(τt)|^{-n/2} form.
    """
    _require_free(hamiltonian)
    t = _strictly_increasing(times)
    tau = hamiltonian.tau
    if math.sinh(2.0 * abs(tau) * t[0]) < 1.0:
        raise ArgumentError(f"Fit window must start where sinh(2|tau| t) >= 1, got t_min={t[0]}")

    peaks = np.array([lr_norm(propagate_exact(f, PropagatorParams(tau=tau, sigma=s)), math.inf) for s in t])
    fit = linregress(t, np.log(peaks))
    n = f.grid.dimension
    result = DecayFit(
        window=(float(t[0]), float(t[-1])),
        fitted_rate=float(-fit.slope),
        reference_rate=n * abs(tau),
        bound_rate=0.5 * n * abs(tau),
        intercept=float(fit.intercept),
        r_squared=float(min(1.0, fit.rvalue**2)),
        series=NormSeries(times=t, norms=peaks, r_exponent=math.inf),
    )
    logger.info(f"Decay fit on [{t[0]}, {t[-1]}]: rate {result.fitted_rate:.6g}, reference {result.reference_rate}")
    return result


def _weighted_norm(weighted_phi: WaveFunction, weight: np.ndarray, tau: float, sigma: float) -> float:
    evolved = propagate_exact(weighted_phi, PropagatorParams(tau=tau, sigma=sigma))
    return lr_norm(evolved.with_values(weight * evolved.values), 2)


class WeightedDecay(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    rho: float
    Q: float
    series: NormSeries
    integral: float
    increment: float
    slope: float
    reference_slope: float
    envelope_ratio: float
    weight_constant: float

    def to_csv(self) -> str:
        return csv_text(("sigma", "value"), zip(self.series.times, self.series.norms))

    def summary(self) -> dict[str, Any]:
        return {
            "rho": self.rho,
            "Q": self.Q,
            "integral": self.integral,
            "increment": self.increment,
            "slope": self.slope,
            "reference_slope": self.reference_slope,
            "envelope_ratio": self.envelope_ratio,
            "weight_constant": self.weight_constant,
        }


def weighted_decay_integrand(
    rho: float,
    Q: float,
    hamiltonian: HamiltonianSpec,
    phi: WaveFunction,
    sigmas: Sequence[float],
    fit_window: tuple[float, float] = (2.0, 6.0),
) -> WeightedDecay:
    """
    σ ↦ ‖⟨x⟩^{-ρ} e^{-iσH₀} ⟨x⟩^{-ρ}φ‖_{L²} with its trapezoid integral.

    The slope is the regression of the log integrand on log|sinh(2τσ)| over
    fit_window and is compared with -n/Q. weight_constant is ‖⟨x⟩^{-ρ}‖²_{L^Q},
    the factor multiplying ‖φ‖ in the integrated bound. envelope_ratio is the largest
    ratio of the series to C|sinh(2τσ)|^{-n/Q}, C fitted in log space.
    """
    _require_free(hamiltonian)
    n = phi.grid.dimension
    if Q < 2:
        raise ArgumentError(f"Q must be at least 2, got {Q}")
    if not rho * Q > n:
        raise ArgumentError(f"Hypothesis rho*Q > n violated: {rho}*{Q} = {rho * Q} <= {n}")
    if not Q > n:
        raise ArgumentError(f"Hypothesis Q > n violated: {Q} <= {n}")
    s = _strictly_increasing(sigmas, "sigmas")
    if s[0] <= 0:
        raise ArgumentError("sigmas must be positive")

    tau = hamiltonian.tau
    weight = phi.grid.japanese_bracket() ** (-rho)
    weighted_phi = phi.with_values(weight * phi.values)
    values = np.array([_weighted_norm(weighted_phi, weight, tau, sigma) for sigma in s])
    log_envelope = log_abs_sinh(2.0 * tau * s)
    log_values = np.log(values)

    in_window = (s >= fit_window[0]) & (s <= fit_window[1])
    slope = math.nan
    if in_window.sum() >= 2:
        slope = float(linregress(log_envelope[in_window], log_values[in_window]).slope)
    else:
        logger.warning(f"Fit window {fit_window} holds fewer than two samples; slope not computed")

    reference_slope = -n / Q
    log_c = np.mean(log_values - reference_slope * log_envelope)
    envelope_ratio = float(np.exp(np.max(log_values - reference_slope * log_envelope - log_c)))

    return WeightedDecay(
        rho=rho,
        Q=Q,
        series=NormSeries(times=s, norms=values, r_exponent=2.0),
        integral=float(trapezoid(values, s)),
        increment=window_increment(s, values, 1),
        slope=slope,
        reference_slope=reference_slope,
        envelope_ratio=envelope_ratio,
        weight_constant=lr_norm(phi.with_values(weight), Q) ** 2,
    )


def kappa_envelope_constant(tau: float, n: int, kappa: float, times: Sequence[float]) -> float:
    """
    sup over times of |t|^κ |sinh(τt)|^{-n/2}.

    This is the constant turning the exponential dispersive bound into
    |t|^{-κ}. It stays bounded as the window approaches t = 0 exactly when
    κ >= n/2 and grows like |t|^{κ - n/2} otherwise.
    """
    if tau == 0:
        raise ArgumentError("tau must be nonzero")
    if n < 1:
        raise ArgumentError(f"Dimension must be positive, got {n}")
    if kappa <= 0:
        raise ArgumentError(f"kappa must be positive, got {kappa}")
    t = np.asarray(times, dtype=float)
    if t.size == 0 or np.any(t == 0) or not np.all(np.isfinite(t)):
        raise ArgumentError("times must be finite and nonzero")
    log_values = kappa * np.log(np.abs(t)) - 0.5 * n * log_abs_sinh(tau * t)
    return float(np.exp(np.max(log_values)))


def dispersive_bound(tau: float, sigma: float, n: int) -> float:
    """(|τ|/(2π|sinh(2τσ)|))^{n/2}, the L¹ → L∞ norm of the kernel."""
    return float((abs(tau) / (2.0 * math.pi * abs(math.sinh(2.0 * tau * sigma)))) ** (0.5 * n))
