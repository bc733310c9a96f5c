"""repulsive_strichartz package initialization."""

from repulsive_strichartz.config_parser import RunConfig, parse_config
from repulsive_strichartz.core import (
    Grid,
    HamiltonianSpec,
    NormSeries,
    PotentialSpec,
    WaveFunction,
    eval_potential,
    lr_norm,
    make_gaussian,
    strichartz_norm,
)
from repulsive_strichartz.errors import ToolkitError
from repulsive_strichartz.runner import run

__all__ = [
    "RunConfig",
    "parse_config",
    "Grid",
    "HamiltonianSpec",
    "NormSeries",
    "PotentialSpec",
    "WaveFunction",
    "eval_potential",
    "lr_norm",
    "make_gaussian",
    "strichartz_norm",
    "ToolkitError",
    "run",
]
