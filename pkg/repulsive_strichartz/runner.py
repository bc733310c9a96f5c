"""Execution of a RunConfig: one handler per command, artifacts plus a manifest."""

import logging
import math
from contextlib import contextmanager
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Callable, Iterator

import numpy as np
from pydantic import BaseModel, ValidationError

from repulsive_strichartz.config_parser.run_config import RunConfig
from repulsive_strichartz.core.artifacts import csv_text, json_text
from repulsive_strichartz.core.exponents import is_infinite
from repulsive_strichartz.core.grid import Grid, WaveFunction, make_gaussian
from repulsive_strichartz.core.norms import strichartz_norm
from repulsive_strichartz.core.potential import HamiltonianSpec, PotentialSpec
from repulsive_strichartz.errors import ConfigError
from repulsive_strichartz.mehler import (
    PropagatorParams,
    decay_fit,
    gaussian_oracle,
    kappa_envelope_constant,
    norm_loss,
    propagate_exact,
    weighted_decay_integrand,
)
from repulsive_strichartz.pairs import Pair, classify_repulsive, region_csv, sample_region
from repulsive_strichartz.solver import EvolutionPlan, SamplingSettings, duhamel_residual, evolve, retarded_strichartz
from repulsive_strichartz.spectral import (
    ResolventSettings,
    ResolventQuery,
    assemble,
    birman_schwinger_check,
    high_energy_scan,
    lap_scan,
    smoothing_integral,
)

logger = logging.getLogger(__name__)

Artifacts = dict[str, str]


def package_version() -> str:
    try:
        return version("repulsive-strichartz")
    except PackageNotFoundError:
        return "0.0.0"


@contextmanager
def _config_values() -> Iterator[None]:
    """Domain models built from configuration values report as configuration errors."""
    try:
        yield
    except ValidationError as e:
        error = e.errors()[0]
        key = ".".join(str(part) for part in error["loc"]) or None
        raise ConfigError(f"Invalid configuration value ({key}): {error['msg']}", key=key) from e


def _grid(p: Any) -> Grid:
    return Grid(dimension=getattr(p, "n", 1), half_width=p.L, points_per_axis=p.N)


def _hamiltonian(p: Any) -> HamiltonianSpec:
    kind = getattr(p, "potential", "zero")
    potential = PotentialSpec.zero() if kind == "zero" else PotentialSpec.power_decay(p.amplitude, p.decay)
    return HamiltonianSpec(tau=p.tau, potential=potential)


def _gaussian(grid: Grid, p: Any) -> WaveFunction:
    return make_gaussian(grid, center=p.center, width=p.width, momentum=p.momentum)


def _steps(duration: float, dt: float) -> int:
    steps = round(duration / dt)
    if steps < 1 or not math.isclose(steps * dt, duration, rel_tol=1e-9):
        raise ConfigError(f"Duration {duration} is not a whole number of steps dt={dt}", key="dt")
    return steps


def _arange(start: float, stop: float, step: float, key: str) -> np.ndarray:
    if step <= 0 or stop < start:
        raise ConfigError(f"Empty sample range [{start}, {stop}] with step {step}", key=key)
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def command_settings(config: RunConfig) -> dict[str, BaseModel]:
    """Numerical settings a command runs with, beyond its parameters."""
    p = config.parameters
    if config.command in ("resolvent-scan", "high-energy"):
        return {"resolvent": ResolventSettings(nu0=p.nu0, seed=config.seed, min_certificate=p.min_certificate)}
    if config.command == "birman-schwinger":
        return {"resolvent": ResolventSettings(seed=config.seed)}
    if config.command in ("smoothing", "duhamel") or (config.command == "strichartz" and p.method == "split"):
        return {"sampling": SamplingSettings()}
    return {}


def _propagate(config: RunConfig) -> Artifacts:
    p = config.parameters
    grid = _grid(p)
    f = _gaussian(grid, p)
    out = propagate_exact(f, PropagatorParams(tau=p.tau, sigma=p.sigma), max_norm_loss=p.max_norm_loss)
    oracle = gaussian_oracle(grid, center=p.center, width=p.width, momentum=p.momentum, tau=p.tau, sigma=p.sigma)
    flat = out.values.ravel()
    summary = {
        "l2_in": f.l2_norm,
        "l2_out": out.l2_norm,
        "norm_loss": norm_loss(f, out),
        "oracle_error": float(np.linalg.norm(flat - oracle.values.ravel()) / np.linalg.norm(oracle.values)),
    }
    return {
        "propagate.csv": csv_text(("index", "re", "im"), ((j, v.real, v.imag) for j, v in enumerate(flat))),
        "propagate.json": json_text(summary),
    }


def _decay_fit(config: RunConfig) -> Artifacts:
    p = config.parameters
    grid = _grid(p)
    fit = decay_fit(_gaussian(grid, p), _hamiltonian(p), _arange(p.t_min, p.t_max, p.t_step, "t_step"))
    return {"decay_fit.csv": fit.to_csv(), "decay_fit.json": json_text(fit.summary())}


def _strichartz(config: RunConfig) -> Artifacts:
    p = config.parameters
    grid = _grid(p)
    hamiltonian = _hamiltonian(p)
    f = _gaussian(grid, p)
    artifacts: Artifacts = {}
    if p.method == "exact":
        if not hamiltonian.potential.is_zero:
            raise ConfigError("The exact method propagates the free flow only; use method = split for V != 0", key="method")
        times = np.concatenate(([0.0], _arange(p.t_step, p.t_max, p.t_step, "t_step")))
        limit = None if is_infinite(p.r) else p.max_norm_loss
        series = [(float(t), propagate_exact(f, PropagatorParams(tau=p.tau, sigma=float(t)), limit)) for t in times]
    else:
        plan = EvolutionPlan(
            hamiltonian=hamiltonian,
            dt=p.dt,
            steps=_steps(p.t_max, p.dt),
            record_every=p.record_every,
            sampling=command_settings(config)["sampling"],
        )
        trajectory = evolve(f, plan)
        series = trajectory.series
        artifacts["trajectory.csv"] = trajectory.to_csv()
    norm = strichartz_norm(series, p.q, p.r)
    artifacts["strichartz.csv"] = norm.series.to_csv()
    artifacts["strichartz.json"] = json_text(
        {"method": p.method, "q": norm.q, "r": norm.series.r_exponent, "value": norm.value, "increment": norm.increment}
    )
    return artifacts


def _region(config: RunConfig) -> Artifacts:
    p = config.parameters
    return {"region.csv": region_csv(sample_region(p.n, p.resolution))}


def _resolvent_scan(config: RunConfig) -> Artifacts:
    p = config.parameters
    h = assemble(_grid(p), _hamiltonian(p))
    settings = command_settings(config)["resolvent"]
    lambdas = np.linspace(p.lambda_min, p.lambda_max, p.lambda_count)
    result = lap_scan(
        h, lambdas, p.nu, weight_kind=p.weight_kind, weight_exponent=p.weight_exponent,
        settings=settings, jobs=config.jobs,
    )
    return {"resolvent_scan.csv": result.to_csv(), "resolvent_scan.json": json_text({"max_norm": result.max_norm})}


def _high_energy(config: RunConfig) -> Artifacts:
    p = config.parameters
    h = assemble(_grid(p), HamiltonianSpec(tau=p.tau))
    settings = command_settings(config)["resolvent"]
    scan = high_energy_scan(h, p.thetas, p.lambdas, p.nu, settings=settings, jobs=config.jobs)
    return {"high_energy.csv": scan.result.to_csv(), "high_energy.json": json_text(scan.summary())}


def _smoothing(config: RunConfig) -> Artifacts:
    p = config.parameters
    grid = _grid(p)
    hamiltonian = _hamiltonian(p)
    plan = EvolutionPlan(
        hamiltonian=hamiltonian,
        dt=p.dt,
        steps=p.steps,
        record_every=p.record_every,
        sampling=command_settings(config)["sampling"],
    )
    result = smoothing_integral(_gaussian(grid, p), hamiltonian, plan)
    return {"smoothing.json": json_text(result.summary())}


def _duhamel(config: RunConfig) -> Artifacts:
    p = config.parameters
    grid = _grid(p)
    plan = EvolutionPlan(
        hamiltonian=_hamiltonian(p), dt=p.dt, steps=p.steps, sampling=command_settings(config)["sampling"]
    )
    residual = duhamel_residual(_gaussian(grid, p), plan, p.quad_points)
    return {"duhamel.json": json_text({"t": plan.final_time, "quad_points": p.quad_points, "residual": residual})}


def _weighted_decay(config: RunConfig) -> Artifacts:
    p = config.parameters
    grid = _grid(p)
    result = weighted_decay_integrand(
        p.rho, p.Q, HamiltonianSpec(tau=p.tau), _gaussian(grid, p),
        _arange(p.sigma_min, p.sigma_max, p.sigma_step, "sigma_step"), fit_window=(p.fit_min, p.fit_max),
    )
    return {"weighted_decay.csv": result.to_csv(), "weighted_decay.json": json_text(result.summary())}


def _birman_schwinger(config: RunConfig) -> Artifacts:
    p = config.parameters
    query = ResolventQuery(lam=p.lambda_, nu=p.nu, sign=p.sign)
    discrepancy = birman_schwinger_check(_grid(p), _hamiltonian(p), query, command_settings(config)["resolvent"])
    return {"birman_schwinger.json": json_text({"lambda": p.lambda_, "nu": p.nu, "discrepancy": discrepancy})}


def _kappa_envelope(config: RunConfig) -> Artifacts:
    p = config.parameters
    if not 0 < p.t_min < p.t_max:
        raise ConfigError(f"kappa-envelope needs 0 < t_min < t_max, got t_min={p.t_min}, t_max={p.t_max}", key="t_min")
    if p.count < 2:
        raise ConfigError(f"kappa-envelope needs count >= 2, got {p.count}", key="count")
    times = np.geomspace(p.t_min, p.t_max, p.count)
    constant = kappa_envelope_constant(p.tau, p.n, float(p.kappa), times)
    return {"kappa_envelope.json": json_text({"kappa": p.kappa, "n": p.n, "constant": constant})}


def _retarded(config: RunConfig) -> Artifacts:
    p = config.parameters
    grid = _grid(p)
    pair = Pair(q=p.q, r=p.r)
    source_pair = Pair(q=p.q_source, r=p.r_source)
    for key, candidate in (("q", pair), ("q_source", source_pair)):
        if not classify_repulsive(candidate, grid.dimension).admissible:
            raise ConfigError(f"Pair {candidate} is not repulsive-admissible for n={grid.dimension}", key=key)
    if p.support <= 0:
        raise ConfigError(f"support must be positive, got {p.support}", key="support")
    phi = _gaussian(grid, p)
    times = np.concatenate(([0.0], _arange(p.dt, p.t_max, p.dt, "dt")))
    forcing = [
        (float(t), phi.scaled(math.sin(math.pi * t / p.support) if t <= p.support else 0.0)) for t in times
    ]
    limit = None if is_infinite(pair.r) else p.max_norm_loss
    estimate = retarded_strichartz(forcing, HamiltonianSpec(tau=p.tau), pair, source_pair, limit)
    return {"retarded.csv": estimate.series.to_csv(), "retarded.json": json_text(estimate.summary())}


HANDLERS: dict[str, Callable[[RunConfig], Artifacts]] = {
    "propagate": _propagate,
    "decay-fit": _decay_fit,
    "strichartz": _strichartz,
    "region": _region,
    "resolvent-scan": _resolvent_scan,
    "high-energy": _high_energy,
    "smoothing": _smoothing,
    "duhamel": _duhamel,
    "weighted-decay": _weighted_decay,
    "birman-schwinger": _birman_schwinger,
    "kappa-envelope": _kappa_envelope,
    "retarded": _retarded,
}


def manifest(config: RunConfig, artifacts: list[str]) -> dict[str, Any]:
    settings = {name: model.model_dump(mode="json") for name, model in command_settings(config).items()}
    return {
        **config.resolved(),
        "settings": settings,
        "artifacts": sorted(artifacts),
        "version": package_version(),
    }


def run(config: RunConfig) -> list[Path]:
    """
    Execute config.command and write its artifacts and ``manifest.json`` to
    config.output_dir. Returns the written paths.
    """
    logger.info(f"Running '{config.command}' into {config.output_dir}")
    with _config_values():
        artifacts = HANDLERS[config.command](config)
    output = config.output_dir
    output.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in sorted(artifacts.items()):
        path = output / name
        path.write_text(text, encoding="utf-8", newline="")
        written.append(path)
    path = output / "manifest.json"
    path.write_text(json_text(manifest(config, list(artifacts))), encoding="utf-8", newline="")
    written.append(path)
    logger.info(f"Wrote {len(written)} files")
    return written
