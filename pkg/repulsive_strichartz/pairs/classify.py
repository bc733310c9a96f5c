import logging
from enum import Enum
from fractions import Fraction
from typing import Annotated, Any, Iterable

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer, field_validator

from repulsive_strichartz.core.artifacts import csv_text
from repulsive_strichartz.core.exponents import (
    ExtendedReal,
    as_extended_real,
    format_exponent,
    from_reciprocal,
    is_infinite,
    reciprocal,
)
from repulsive_strichartz.errors import ArgumentError, ClassificationError

logger = logging.getLogger(__name__)

Exponent = Annotated[
    Any,
    BeforeValidator(as_extended_real),
    PlainSerializer(format_exponent, return_type=str),
]

HALF = Fraction(1, 2)


class Constraint(str, Enum):
    Q_AT_LEAST_TWO = "q >= 2"
    R_AT_LEAST_TWO = "r >= 2"
    REPULSIVE_SUM = "1/q + n/(2r) >= n/4"
    KAPPA_LINE = "1/q + kappa/r = kappa/2"
    KAPPA_UPPER = "r <= 2 kappa q/(kappa q - 2)"


class Pair(BaseModel):
    """Exponent pair (q, r) on [1, ∞]², finite entries held as exact fractions."""

    model_config = ConfigDict(frozen=True)

    q: Exponent
    r: Exponent

    @field_validator("q", "r")
    @classmethod
    def _at_least_one(cls, value: ExtendedReal) -> ExtendedReal:
        if not is_infinite(value) and value < 1:
            raise ValueError(f"Exponents must lie in [1, inf], got {format_exponent(value)}")
        return value

    @property
    def inv_q(self) -> Fraction:
        return reciprocal(self.q)

    @property
    def inv_r(self) -> Fraction:
        return reciprocal(self.r)

    @classmethod
    def from_reciprocals(cls, inv_q: Fraction, inv_r: Fraction) -> "Pair":
        return cls(q=from_reciprocal(Fraction(inv_q)), r=from_reciprocal(Fraction(inv_r)))

    def __str__(self) -> str:
        return f"({format_exponent(self.q)}, {format_exponent(self.r)})"


class Verdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    admissible: bool
    on_boundary: bool
    is_endpoint: bool
    violated: list[Constraint] = Field(default_factory=list)
    flags: list[str] = Field(default_factory=list)


def _check_dimension(n: int) -> None:
    if n < 1:
        raise ArgumentError(f"Dimension must be a positive integer, got {n}")


def _range_violations(pair: Pair) -> list[Constraint]:
    violated = []
    if pair.inv_q > HALF:
        violated.append(Constraint.Q_AT_LEAST_TWO)
    if pair.inv_r > HALF:
        violated.append(Constraint.R_AT_LEAST_TWO)
    return violated


def _is_endpoint(pair: Pair, n: int) -> bool:
    return n >= 3 and pair.inv_q == HALF and pair.inv_r == Fraction(n - 2, 2 * n)


def classify_repulsive(pair: Pair, n: int) -> Verdict:
    """
    q >= 2, r >= 2 and 1/q + n/(2r) >= n/4, evaluated exactly.

    The sum form stands in for r <= 2n/(n - 4/q); it needs no sign case on
    n - 4/q.
    """
    _check_dimension(n)
    violated = _range_violations(pair)
    total = pair.inv_q + Fraction(n, 2) * pair.inv_r
    if total < Fraction(n, 4):
        violated.append(Constraint.REPULSIVE_SUM)
    return Verdict(
        admissible=not violated,
        on_boundary=total == Fraction(n, 4),
        is_endpoint=_is_endpoint(pair, n),
        violated=violated,
    )


def classify_kappa(pair: Pair, kappa: ExtendedReal, n: int) -> Verdict:
    """
    1/q + κ/r = κ/2 with 2 <= q, 2 <= r <= 2κq/(κq - 2).

    The upper bound is read as 1/r >= 1/2 - 1/(κq). It is undefined for
    κq <= 2; there only the line equation applies and the verdict carries a
    flag.

    Raises:
        ArgumentError: κ < n/2.
        ClassificationError: a κ-admissible pair failed the repulsive test.
    """
    _check_dimension(n)
    k = as_extended_real(kappa)
    if is_infinite(k):
        raise ArgumentError("kappa must be finite")
    k = Fraction(k)
    if k < Fraction(n, 2):
        raise ArgumentError(f"kappa must be at least n/2 = {Fraction(n, 2)}, got {k}")

    violated = _range_violations(pair)
    flags = []
    if pair.inv_q + k * pair.inv_r != k / 2:
        violated.append(Constraint.KAPPA_LINE)
    if k <= 2 * pair.inv_q:
        flags.append("kappa*q <= 2: upper bound on r undefined, line equation used alone")
    elif pair.inv_r < HALF - pair.inv_q / k:
        violated.append(Constraint.KAPPA_UPPER)

    repulsive = classify_repulsive(pair, n)
    admissible = not violated
    if admissible and not repulsive.admissible:
        raise ClassificationError(f"Pair {pair} is {k}-admissible but not repulsive-admissible for n={n}")
    return Verdict(
        admissible=admissible,
        on_boundary=repulsive.on_boundary,
        is_endpoint=repulsive.is_endpoint and admissible,
        violated=violated,
        flags=flags,
    )


class RegionPoint(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    inv_q: Fraction
    inv_r: Fraction
    verdict: Verdict

    @property
    def pair(self) -> Pair:
        return Pair.from_reciprocals(self.inv_q, self.inv_r)


def sample_region(n: int, resolution: int) -> list[RegionPoint]:
    """
    Classify the lattice (i/(2·resolution), j/(2·resolution)) of
    (1/q, 1/r) ∈ [0, 1/2]², ordered by 1/q then 1/r. For n >= 3 the endpoint
    (1/2, (n-2)/(2n)) is always present.
    """
    _check_dimension(n)
    if resolution < 2:
        raise ArgumentError(f"resolution must be at least 2, got {resolution}")
    ticks = [Fraction(i, 2 * resolution) for i in range(resolution + 1)]
    coordinates = {(iq, ir) for iq in ticks for ir in ticks}
    if n >= 3:
        coordinates.add((HALF, Fraction(n - 2, 2 * n)))
    points = [
        RegionPoint(inv_q=iq, inv_r=ir, verdict=classify_repulsive(Pair.from_reciprocals(iq, ir), n))
        for iq, ir in sorted(coordinates)
    ]
    logger.info(f"Sampled {len(points)} points of the n={n} region, {sum(p.verdict.admissible for p in points)} admissible")
    return points


def region_csv(points: Iterable[RegionPoint]) -> str:
    rows = (
        (float(p.inv_q), float(p.inv_r), p.verdict.admissible, p.verdict.on_boundary, p.verdict.is_endpoint)
        for p in points
    )
    return csv_text(("inv_q", "inv_r", "admissible", "on_boundary", "is_endpoint"), rows)


def holder_pair(mu: ExtendedReal, n: int) -> Pair:
    """(2, 2μ/(μ - 2)), the pair produced by the Hölder step with |V|^{1/2} ∈ L^μ."""
    _check_dimension(n)
    m = as_extended_real(mu)
    if is_infinite(m) or not m > max(2, n):
        raise ArgumentError(f"mu must be finite and exceed max(2, n) = {max(2, n)}, got {format_exponent(m)}")
    m = Fraction(m)
    return Pair(q=2, r=2 * m / (m - 2))


def dual_pair(pair: Pair) -> Pair:
    """Hölder conjugates (q', r') with 1/q + 1/q' = 1."""
    return Pair.from_reciprocals(1 - pair.inv_q, 1 - pair.inv_r)
