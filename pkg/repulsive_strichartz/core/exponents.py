"""
Extended exponents on [1, ∞].

Finite exponents are kept as exact fractions so that boundary and endpoint
decisions never depend on rounding; ∞ is ``math.inf`` and nothing else.
"""

import math
from fractions import Fraction
from typing import Union

ExtendedReal = Union[Fraction, float]

INFINITY = math.inf


def as_extended_real(value: object) -> ExtendedReal:
    """
    Convert user input to an extended real.

    Accepts ints, Fractions, floats (converted exactly), ``math.inf`` and
    strings such as ``"3"``, ``"2/3"``, ``"0.25"`` or ``"inf"``.
    """
    if isinstance(value, bool):
        raise ValueError(f"Not an exponent: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if math.isnan(value):
            raise ValueError("Exponent must not be NaN")
        if math.isinf(value):
            if value < 0:
                raise ValueError("Exponent must not be -inf")
            return INFINITY
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "∞"):
            return INFINITY
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Not an exponent: {value!r}") from e
    raise ValueError(f"Not an exponent: {value!r}")


def is_infinite(value: ExtendedReal) -> bool:
    return isinstance(value, float) and math.isinf(value)


def reciprocal(value: ExtendedReal) -> Fraction:
    """1/value, with 1/∞ = 0 exactly."""
    if is_infinite(value):
        return Fraction(0)
    if value == 0:
        raise ZeroDivisionError("Exponent 0 has no reciprocal")
    return 1 / Fraction(value)


def from_reciprocal(inverse: Fraction) -> ExtendedReal:
    """Inverse of ``reciprocal``: 0 maps back to ∞."""
    if inverse == 0:
        return INFINITY
    return 1 / Fraction(inverse)


def to_float(value: ExtendedReal) -> float:
    return math.inf if is_infinite(value) else float(value)


def format_exponent(value: ExtendedReal) -> str:
    if is_infinite(value):
        return "inf"
    fraction = Fraction(value)
    if fraction.denominator == 1:
        return str(fraction.numerator)
    return f"{fraction.numerator}/{fraction.denominator}"
