"""Exact rational scalars.

All algebraic objects use :class:`fractions.Fraction`; this module only adds
strict parsing and formatting so that floats never leak in.
"""

from fractions import Fraction
import numbers
import re

Q = Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p"`` or ``"p/q"`` into a Fraction.

    Decimal points and exponents are rejected on purpose.
    """
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ValueError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def q(x) -> Fraction:
    """Coerce an int, Fraction or rational string to Fraction.

    Floats are refused: a float that happens to look rational is still a
    rounding artefact as far as this library is concerned.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, numbers.Rational):
        return Fraction(x.numerator, x.denominator)
    raise TypeError(f"cannot use {type(x).__name__} as an exact scalar")


def fmt(x) -> str:
    """Format a rational as ``"p"`` or ``"p/q"``."""
    x = q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"
