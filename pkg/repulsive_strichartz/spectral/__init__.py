"""Discrete Hamiltonian, weighted resolvent norms and Kato smoothing."""

from repulsive_strichartz.spectral.hamiltonian import DiscreteHamiltonian, assemble
from repulsive_strichartz.spectral.resolvent import (
    HighEnergyScan,
    ResolventSettings,
    ResolventQuery,
    ScanResult,
    birman_schwinger_check,
    high_energy_scan,
    lap_scan,
    level_spacing_certificate,
    weighted_resolvent_norm,
)
from repulsive_strichartz.spectral.smoothing import SmoothingResult, kato_consistency, smoothing_integral

__all__ = [
    "DiscreteHamiltonian",
    "assemble",
    "HighEnergyScan",
    "ResolventSettings",
    "ResolventQuery",
    "ScanResult",
    "birman_schwinger_check",
    "high_energy_scan",
    "lap_scan",
    "level_spacing_certificate",
    "weighted_resolvent_norm",
    "SmoothingResult",
    "kato_consistency",
    "smoothing_integral",
]
