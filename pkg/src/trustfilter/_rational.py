"""Exact rational parsing and rendering shared by config, logs and CSV output."""

from __future__ import annotations

from fractions import Fraction


def parse_rational(value: object, name: str = "value") -> Fraction:
    """Coerce an int, a ``"num/den"`` or decimal string, or a float to a Fraction.

    Floats go through their shortest repr, so ``0.4`` becomes ``2/5`` rather
    than the binary expansion.
    """
    if isinstance(value, bool):
        raise ValueError(f"{name}: expected a rational, got a boolean")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"{name}: cannot parse {value!r} as a rational") from None
    raise ValueError(f"{name}: expected a rational, got {type(value).__name__}")


def format_rational(value: Fraction) -> str:
    """Render as ``num/den``, always with an explicit denominator."""
    return f"{value.numerator}/{value.denominator}"


def format_decimal(value: Fraction, digits: int = 6) -> str:
    """Round half-to-even at ``digits`` fractional digits, computed exactly."""
    scale = 10**digits
    scaled = round(value * scale)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), scale)
    return f"{sign}{whole}.{frac:0{digits}d}"
