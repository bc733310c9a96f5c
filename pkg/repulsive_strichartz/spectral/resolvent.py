"""
Weighted resolvent norms ‖W(h - λ ∓ iν)^{-1}W‖ of the discrete Hamiltonian,
their λ-scans and the Birman–Schwinger identity.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Literal, Sequence

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.sparse import identity
from scipy.sparse.linalg import splu
from scipy.stats import linregress

from repulsive_strichartz.core.artifacts import csv_text
from repulsive_strichartz.core.grid import Grid
from repulsive_strichartz.core.potential import HamiltonianSpec, eval_potential
from repulsive_strichartz.errors import ArgumentError, ConditioningError, NumericError, ResolutionError
from repulsive_strichartz.spectral.hamiltonian import DiscreteHamiltonian, assemble

logger = logging.getLogger(__name__)

WeightKind = Literal["x_weight", "potential_weight"]


class ResolventSettings(BaseModel):
    """
    Numerical constants of the resolvent estimates.

    min_certificate is the smallest accepted ratio ν / (local level spacing);
    the spacing is the window width 2·spacing_window over the number of
    eigenvalues inside [λ - spacing_window, λ + spacing_window].
    """

    model_config = ConfigDict(frozen=True)

    nu0: float = Field(default=1.0, gt=0)
    tolerance: float = Field(default=1e-6, gt=0)
    max_iterations: int = Field(default=500, ge=1)
    seed: int = 0
    min_certificate: float = Field(default=0.5, ge=0)
    spacing_window: float = Field(default=5.0, gt=0)
    max_condition: float = Field(default=1e8, gt=1)


class ResolventQuery(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: float = Field(alias="lambda")
    nu: float = Field(gt=0)
    sign: Literal[1, -1] = 1
    weight_exponent: float = Field(default=0.0, ge=0)
    weight_kind: WeightKind = "x_weight"

    @property
    def spectral_parameter(self) -> complex:
        return complex(self.lam, self.sign * self.nu)


def weight_vector(h: DiscreteHamiltonian, query: ResolventQuery) -> np.ndarray:
    """⟨x⟩^{-s} for x_weight, |V|^{s} for potential_weight."""
    if query.weight_kind == "x_weight":
        return h.grid.japanese_bracket() ** (-query.weight_exponent)
    return np.abs(h.potential_values) ** query.weight_exponent


def level_spacing_certificate(h: DiscreteHamiltonian, lam: float, nu: float, settings: ResolventSettings) -> float:
    """ν over the local mean eigenvalue spacing around λ; infinite when no eigenvalue is near λ."""
    width = settings.spacing_window
    count = h.eigenvalues_between(lam - width, lam + width).size
    if count == 0:
        return math.inf
    return nu * count / (2.0 * width)


class _ResolventOperator:
    """T = W (h - z)^{-1} W and its adjoint through one sparse LU factorization."""

    def __init__(self, h: DiscreteHamiltonian, weight: np.ndarray, z: complex):
        shifted = (h.matrix - z * identity(h.grid.points_per_axis, format="csc")).tocsc()
        try:
            self._lu = splu(shifted)
        except RuntimeError as e:
            raise NumericError(f"Sparse factorization of h - z failed at z={z}") from e
        self._weight = weight

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self._weight * self._lu.solve(self._weight * v)

    def apply_adjoint(self, v: np.ndarray) -> np.ndarray:
        return self._weight * self._lu.solve(self._weight * v, trans="H")


def _power_norm(operator: _ResolventOperator, size: int, settings: ResolventSettings) -> float:
    rng = np.random.default_rng(settings.seed)
    v = rng.standard_normal(size).astype(np.complex128)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for iteration in range(1, settings.max_iterations + 1):
        image = operator.apply(v)
        current = float(np.linalg.norm(image))
        if not math.isfinite(current):
            raise NumericError(f"Power iteration produced a non-finite norm at iteration {iteration}")
        if current == 0.0:
            return 0.0
        normal = operator.apply_adjoint(image)
        v = normal / np.linalg.norm(normal)
        if abs(current - estimate) <= settings.tolerance * current:
            logger.debug(f"Power iteration converged after {iteration} iterations: {current:.10g}")
            return current
        estimate = current
    logger.warning(f"Power iteration stopped at {settings.max_iterations} iterations without reaching tolerance")
    return estimate


def weighted_resolvent_norm(
    h: DiscreteHamiltonian, query: ResolventQuery, settings: ResolventSettings = ResolventSettings()
) -> float:
    """
    Operator-norm estimate of W(h - λ ∓ iν)^{-1}W by power iteration on T*T.

    Raises:
        ArgumentError: ν exceeds ν₀.
        ResolutionError: ν is below the level-spacing floor at λ.
        NumericError: the solve or the iteration broke down.
    """
    return _evaluate(h, query, settings)[0]


def _evaluate(h: DiscreteHamiltonian, query: ResolventQuery, settings: ResolventSettings) -> tuple[float, float]:
    if query.nu > settings.nu0:
        raise ArgumentError(f"nu={query.nu} exceeds nu0={settings.nu0}")
    certificate = level_spacing_certificate(h, query.lam, query.nu, settings)
    if certificate < settings.min_certificate:
        raise ResolutionError(
            f"nu={query.nu} is {certificate:.3g} level spacings at lambda={query.lam}, below "
            f"{settings.min_certificate}; enlarge the box or increase nu",
            certificate=certificate,
        )
    weight = weight_vector(h, query)
    if not np.any(weight):
        return 0.0, certificate
    operator = _ResolventOperator(h, weight, query.spectral_parameter)
    return _power_norm(operator, h.grid.points_per_axis, settings), certificate


class ScanResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    queries: list[ResolventQuery]
    norms: list[float]
    certificates: list[float]

    @model_validator(mode="after")
    def _consistent(self) -> "ScanResult":
        if not len(self.queries) == len(self.norms) == len(self.certificates):
            raise ValueError("queries, norms and certificates must have equal lengths")
        if not all(math.isfinite(v) and v >= 0 for v in self.norms):
            raise ValueError("norms must be finite and nonnegative")
        return self

    @property
    def max_norm(self) -> float:
        return max(self.norms, default=0.0)

    def to_csv(self) -> str:
        rows = (
            (q.lam, q.nu, q.weight_exponent, q.sign, norm, cert)
            for q, norm, cert in zip(self.queries, self.norms, self.certificates)
        )
        return csv_text(("lambda", "nu", "theta", "sign", "norm", "certificate"), rows)


def _run_queries(
    h: DiscreteHamiltonian, queries: list[ResolventQuery], settings: ResolventSettings, jobs: int
) -> ScanResult:
    if jobs < 1:
        raise ArgumentError(f"jobs must be positive, got {jobs}")
    if jobs == 1:
        results = [_evaluate(h, q, settings) for q in queries]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda q: _evaluate(h, q, settings), queries))
    return ScanResult(queries=queries, norms=[r[0] for r in results], certificates=[r[1] for r in results])


def lap_scan(
    h: DiscreteHamiltonian,
    lambdas: Sequence[float],
    nu: float,
    weight_kind: WeightKind = "potential_weight",
    weight_exponent: float = 0.5,
    signs: Sequence[int] = (1,),
    settings: ResolventSettings = ResolventSettings(),
    jobs: int = 1,
) -> ScanResult:
    """Weighted resolvent norms over λ, one query per (λ, sign) in that order."""
    queries = [
        ResolventQuery(lam=float(lam), nu=nu, sign=sign, weight_exponent=weight_exponent, weight_kind=weight_kind)
        for lam in lambdas
        for sign in signs
    ]
    result = _run_queries(h, queries, settings, jobs)
    logger.info(f"Scanned {len(queries)} resolvent queries, max norm {result.max_norm:.6g}")
    return result


class HighEnergyScan(BaseModel):
    model_config = ConfigDict(frozen=True)

    result: ScanResult
    thetas: list[float]
    lambdas: list[float]
    slopes: list[float]
    decaying: list[bool]

    def norms_for(self, theta: float) -> np.ndarray:
        return np.array([n for q, n in zip(self.result.queries, self.result.norms) if q.weight_exponent == theta])

    def growth_ratio(self, theta: float, power: float) -> float:
        """max/min of norm(λ)·λ^power; close to 1 when the norm decays like λ^{-power}."""
        products = self.norms_for(theta) * np.asarray(self.lambdas) ** power
        return float(products.max() / products.min())

    def summary(self) -> dict[str, Any]:
        return {
            "slopes": {str(t): s for t, s in zip(self.thetas, self.slopes)},
            "decaying": {str(t): d for t, d in zip(self.thetas, self.decaying)},
        }


def high_energy_scan(
    h: DiscreteHamiltonian,
    thetas: Sequence[float],
    lambdas: Sequence[float],
    nu: float,
    settings: ResolventSettings = ResolventSettings(),
    jobs: int = 1,
) -> HighEnergyScan:
    """
    ⟨x⟩^{-θ}-weighted free-resolvent norms over increasing λ > 0 and the
    log-log slope in λ for each θ ∈ [0, 2]. decaying marks the θ whose
    fitted slope is negative; θ > 0 with a nonnegative slope is logged as a
    warning.
    """
    lam = np.asarray(lambdas, dtype=float)
    if lam.size < 2 or np.any(lam <= 0) or np.any(np.diff(lam) <= 0):
        raise ArgumentError("lambdas must be positive and strictly increasing, at least two of them")
    if any(not 0 <= t <= 2 for t in thetas):
        raise ArgumentError(f"thetas must lie in [0, 2], got {list(thetas)}")
    free = h.free()
    queries = [ResolventQuery(lam=float(l), nu=nu, weight_exponent=float(t)) for t in thetas for l in lam]
    result = _run_queries(free, queries, settings, jobs)
    norms = np.asarray(result.norms).reshape(len(thetas), lam.size)
    slopes = [float(linregress(np.log(lam), np.log(row)).slope) for row in norms]
    decaying = [slope < 0 for slope in slopes]
    for theta, slope, decays in zip(thetas, slopes, decaying):
        logger.info(f"High-energy slope for theta={theta}: {slope:.4f}")
        if theta > 0 and not decays:
            logger.warning(f"Weighted resolvent norm does not decay in lambda for theta={theta} (slope {slope:.4f})")
    return HighEnergyScan(
        result=result, thetas=[float(t) for t in thetas], lambdas=lam.tolist(), slopes=slopes, decaying=decaying
    )


def birman_schwinger_check(
    grid: Grid, spec: HamiltonianSpec, query: ResolventQuery, settings: ResolventSettings = ResolventSettings()
) -> float:
    """
    Relative discrepancy of ρ₁Rρ₂ - ρ₁R₀ρ₂ = -K(1 + K)^{-1}K, K = ρ₁R₀ρ₂,
    with ρ₁ = |V|^{1/2}sign(V), ρ₂ = |V|^{1/2} and sign(0) = 0, evaluated densely.

    Raises:
        ConditioningError: 1 + K is numerically singular.
    """
    potential = eval_potential(spec.potential, grid)
    if not np.any(potential):
        return 0.0
    root = np.sqrt(np.abs(potential))
    rho1 = root * np.sign(potential)
    rho2 = root

    z = query.spectral_parameter
    eye = np.eye(grid.points_per_axis)
    full = assemble(grid, spec).dense()
    free = assemble(grid, spec.free()).dense()
    resolvent = scipy.linalg.solve(full - z * eye, eye)
    free_resolvent = scipy.linalg.solve(free - z * eye, eye)

    K = rho1[:, None] * free_resolvent * rho2[None, :]
    operator = eye + K
    condition = float(np.linalg.cond(operator))
    if not condition < settings.max_condition:
        raise ConditioningError(f"1 + K has condition number {condition:.3e}", condition=condition)

    lhs = rho1[:, None] * (resolvent - free_resolvent) * rho2[None, :]
    rhs = -K @ scipy.linalg.solve(operator, K)
    scale = np.linalg.norm(lhs, 2)
    discrepancy = float(np.linalg.norm(lhs - rhs, 2) / scale) if scale > 0 else float(np.linalg.norm(rhs, 2))
    logger.info(f"Birman-Schwinger discrepancy at z={z}: {discrepancy:.3e} (condition {condition:.3g})")
    return discrepancy
