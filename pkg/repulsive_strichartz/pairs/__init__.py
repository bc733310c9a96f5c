"""Exact classification of admissible exponent pairs."""

from repulsive_strichartz.pairs.classify import (
    Constraint,
    Pair,
    RegionPoint,
    Verdict,
    classify_kappa,
    classify_repulsive,
    dual_pair,
    holder_pair,
    region_csv,
    sample_region,
)

__all__ = [
    "Constraint",
    "Pair",
    "RegionPoint",
    "Verdict",
    "classify_kappa",
    "classify_repulsive",
    "dual_pair",
    "holder_pair",
    "region_csv",
    "sample_region",
]
