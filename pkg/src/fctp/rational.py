"""Exact rational helpers. Floats are never accepted."""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from numbers import Rational

Number = int | Fraction


def as_fraction(value: object) -> Fraction:
    """Convert ``value`` to a Fraction without ever passing through a float.

    Accepts ints, Fractions and strings such as ``"-3"``, ``"1/3"`` or ``"0.95"``.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise TypeError(f"expected int, Fraction or str, got {type(value).__name__}")


def as_int(value: object) -> int:
    if isinstance(value, bool):
        raise TypeError("booleans are not integers")
    if isinstance(value, int):
        return value
    if isinstance(value, Rational) and value.denominator == 1:
        return int(value.numerator)
    raise TypeError(f"expected an integer, got {value!r}")


def to_json_rational(value: Fraction) -> int | str:
    """Integers stay JSON ints, everything else becomes ``"num/den"``."""
    if value.denominator == 1:
        return int(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def is_terminating(value: Fraction) -> bool:
    d = value.denominator
    for prime in (2, 5):
        while d % prime == 0:
            d //= prime
    return d == 1


def decimal_str(value: Fraction) -> str:
    """Exact decimal rendering of a terminating rational (``3/8`` -> ``0.375``)."""
    if not is_terminating(value):
        raise ValueError(f"{value} has no finite decimal expansion")
    if value.denominator == 1:
        return str(value.numerator)
    digits = 0
    scaled = value
    while scaled.denominator != 1:
        scaled *= 10
        digits += 1
    sign = "-" if scaled < 0 else ""
    text = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


def denominator_lcm(values) -> int:
    out = 1
    for v in values:
        out = lcm(out, Fraction(v).denominator)
    return out
