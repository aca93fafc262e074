"""Exact rational scalars and their canonical string form.

Scalars are plain :class:`fractions.Fraction` values; this module only adds the
wire format ``"p/q"`` (denominator omitted when 1, ASCII ``-`` sign, no
whitespace) and a strict parser that rejects non-canonical spellings.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

Scalar = Fraction
RationalLike = Union[int, Fraction, str]

_CANONICAL = re.compile(r"^-?(0|[1-9][0-9]*)(/[1-9][0-9]*)?$")


class RationalFormatError(ValueError):
    """A rational string is malformed or not in canonical form."""


def format_rational(x: RationalLike) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str, strict: bool = True) -> Fraction:
    """Parse ``"p/q"``.

    With ``strict`` the string must be exactly what :func:`format_rational`
    would produce: reduced, positive denominator other than 1, no ``-0``.
    """
    if not isinstance(text, str):
        raise RationalFormatError(f"expected a rational string, got {text!r}")
    if not strict:
        try:
            return Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise RationalFormatError(f"bad rational {text!r}") from exc
    if not _CANONICAL.match(text):
        raise RationalFormatError(f"bad rational {text!r}")
    value = Fraction(text)
    if format_rational(value) != text:
        raise RationalFormatError(f"non-canonical rational {text!r}")
    return value


def to_scalar(x: RationalLike) -> Fraction:
    """Coerce ints, Fractions and (lenient) strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x, strict=False)
    raise TypeError(f"cannot use {type(x).__name__} as an exact scalar")


def is_integer(x: Fraction) -> bool:
    return Fraction(x).denominator == 1
