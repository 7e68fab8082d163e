"""Exact-rational coercion and canonical formatting.

Floats are rejected everywhere: a binary float smuggled into the core
would silently break the exact-equality contracts, so rationals enter
as ints, `Fraction`s, or strings like ``"2/3"``.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParseError


def to_fraction(value) -> Fraction:
    """Coerce an int, Fraction, or ``"num/den"`` string; never a float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParseError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational: {value!r}") from exc
    raise ParseError(
        f"not a rational: {value!r} (floats are not accepted; use 'num/den')")


def format_fraction(value: Fraction) -> str:
    """Canonical ``num/den`` form, lowest terms, positive denominator."""
    return f"{value.numerator}/{value.denominator}"
