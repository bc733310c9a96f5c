"""Exact free repulsive propagator and its decay diagnostics."""

from repulsive_strichartz.mehler.diagnostics import (
    DecayFit,
    WeightedDecay,
    decay_fit,
    dispersive_bound,
    kappa_envelope_constant,
    weighted_decay_integrand,
)
from repulsive_strichartz.mehler.oracle import gaussian_oracle
from repulsive_strichartz.mehler.propagator import (
    PropagatorParams,
    chirp_sampling_requirement,
    norm_loss,
    propagate_exact,
    propagate_quadrature,
)

__all__ = [
    "DecayFit",
    "WeightedDecay",
    "decay_fit",
    "dispersive_bound",
    "kappa_envelope_constant",
    "weighted_decay_integrand",
    "gaussian_oracle",
    "PropagatorParams",
    "chirp_sampling_requirement",
    "norm_loss",
    "propagate_exact",
    "propagate_quadrature",
]
