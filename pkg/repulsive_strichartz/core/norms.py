import math
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy.integrate import trapezoid

from repulsive_strichartz.core.artifacts import csv_text
from repulsive_strichartz.core.exponents import ExtendedReal, as_extended_real, to_float
from repulsive_strichartz.core.grid import WaveFunction
from repulsive_strichartz.errors import ArgumentError


def lr_norm(u: WaveFunction, r: ExtendedReal) -> float:
    """
    Discrete L^r norm (Δx^n Σ|u_j|^r)^{1/r}; for r = ∞ the max modulus.
    """
    r_value = to_float(r)
    if math.isnan(r_value) or r_value < 1:
        raise ArgumentError(f"L^r norm needs r >= 1, got {r}")
    modulus = np.abs(u.values)
    if math.isinf(r_value):
        return float(modulus.max())
    peak = modulus.max()
    if peak == 0:
        return 0.0
    # scale by the peak so that large r does not overflow
    total = np.sum((modulus / peak) ** r_value) * u.grid.cell_volume
    return float(peak * total ** (1.0 / r_value))


class NormSeries(BaseModel):
    """t ↦ ‖u(t)‖_{L^r} samples."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: np.ndarray
    norms: np.ndarray
    r_exponent: float

    @field_validator("times", "norms", mode="before")
    @classmethod
    def _as_array(cls, value: object) -> np.ndarray:
        array = np.array(value, dtype=float)
        array.flags.writeable = False
        return array

    @field_validator("r_exponent", mode="before")
    @classmethod
    def _extended_r(cls, value: object) -> float:
        r = to_float(as_extended_real(value))
        if math.isnan(r) or r < 1:
            raise ValueError(f"r must lie in [1, inf], got {value}")
        return r

    @model_validator(mode="after")
    def _consistent(self) -> "NormSeries":
        if self.times.ndim != 1 or self.times.shape != self.norms.shape:
            raise ValueError("times and norms must be 1-d arrays of equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(self.norms < 0) or not np.all(np.isfinite(self.norms)):
            raise ValueError("norms must be finite and nonnegative")
        return self

    def to_csv(self) -> str:
        return csv_text(("t", "norm", "r"), ((t, v, self.r_exponent) for t, v in zip(self.times, self.norms)))


class StrichartzNorm(BaseModel):
    """Value of ‖u‖_{L^q_t L^r_x} over the sampled window, with its saturation certificate."""

    model_config = ConfigDict(frozen=True)

    value: float
    increment: float
    q: float
    series: NormSeries


def time_lq(times: np.ndarray, values: np.ndarray, q: ExtendedReal) -> float:
    """(∫ values^q dt)^{1/q} by the trapezoid rule; max for q = ∞."""
    q_value = to_float(q)
    if math.isinf(q_value):
        return float(np.max(values))
    if len(times) < 2:
        raise ArgumentError("A finite time exponent needs at least two samples")
    return float(trapezoid(values**q_value, times) ** (1.0 / q_value))


def window_increment(times: np.ndarray, values: np.ndarray, q: ExtendedReal) -> float:
    """
    Relative change of the L^q_t value when the window [t0, T] is halved to
    [t0, t0 + (T - t0)/2]; one when the half window holds fewer than two samples
    for finite q.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    full = time_lq(times, values, q)
    if full == 0:
        return 0.0
    midpoint = times[0] + 0.5 * (times[-1] - times[0])
    half = times <= midpoint + 1e-12 * max(1.0, abs(midpoint))
    if half.sum() < 2 and not math.isinf(to_float(q)):
        return 1.0
    return (full - time_lq(times[half], values[half], q)) / full


def strichartz_norm(
    series: Sequence[tuple[float, WaveFunction]], q: ExtendedReal, r: ExtendedReal
) -> StrichartzNorm:
    """
    ‖u‖_{L^q_t L^r_x} from sampled states: L^r in space at every sample,
    then trapezoid L^q in time (max for q = ∞).
    """
    q_value = to_float(q)
    if math.isnan(q_value) or q_value < 1:
        raise ArgumentError(f"q must lie in [1, inf], got {q}")
    if len(series) == 0:
        raise ArgumentError("Strichartz norm needs at least one time sample")
    if not math.isinf(q_value) and len(series) < 2:
        raise ArgumentError(f"Finite q = {q} needs at least two time samples, got {len(series)}")
    times = np.array([t for t, _ in series], dtype=float)
    norms = np.array([lr_norm(u, r) for _, u in series])
    norm_series = NormSeries(times=times, norms=norms, r_exponent=to_float(r))
    return StrichartzNorm(
        value=time_lq(times, norms, q),
        increment=window_increment(times, norms, q),
        q=q_value,
        series=norm_series,
    )


def holder_reduction(u: WaveFunction, potential: np.ndarray, mu: float) -> tuple[float, float]:
    """
    Both sides of ‖V u‖_{L^{2μ/(μ+2)}} ≤ ‖|V|^{1/2}‖_{L^μ} ‖|V|^{1/2} u‖_{L²}.

    On the grid this is Hölder for a weighted counting measure, so lhs <= rhs
    holds exactly up to rounding.
    """
    if mu <= 2:
        raise ArgumentError(f"Hölder reduction needs mu > 2, got {mu}")
    root = np.sqrt(np.abs(potential))
    lhs = lr_norm(u.with_values(potential * u.values), 2.0 * mu / (mu + 2.0))
    rhs = lr_norm(u.with_values(root), mu) * lr_norm(u.with_values(root * u.values), 2)
    return lhs, rhs
