"""Grids, states, potentials, norms and artifact writers."""

from repulsive_strichartz.core.exponents import ExtendedReal, INFINITY, as_extended_real
from repulsive_strichartz.core.grid import Grid, WaveFunction, make_gaussian
from repulsive_strichartz.core.norms import NormSeries, StrichartzNorm, holder_reduction, lr_norm, strichartz_norm
from repulsive_strichartz.core.potential import HamiltonianSpec, PotentialSpec, eval_potential

__all__ = [
    "ExtendedReal",
    "INFINITY",
    "as_extended_real",
    "Grid",
    "WaveFunction",
    "make_gaussian",
    "NormSeries",
    "StrichartzNorm",
    "holder_reduction",
    "lr_norm",
    "strichartz_norm",
    "HamiltonianSpec",
    "PotentialSpec",
    "eval_potential",
]
