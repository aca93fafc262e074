from fractions import Fraction as Q

import pytest
from hypothesis import given
from hypothesis import strategies as st

from virlike.scalars import RationalFormatError, format_rational, is_integer, parse_rational, to_scalar


@pytest.mark.parametrize(
    "value, text",
    [(Q(0), "0"), (Q(5), "5"), (Q(-7), "-7"), (Q(1, 12), "1/12"), (Q(-3, 4), "-3/4")],
)
def test_format(value, text):
    assert format_rational(value) == text
    assert parse_rational(text) == value


@pytest.mark.parametrize("bad", ["2/4", "-0", "1/1", "+1", " 1", "1 ", "01", "1/0", "1/-2", "1.5", "", "−1", "1/01"])
def test_strict_parser_rejects(bad):
    with pytest.raises(RationalFormatError):
        parse_rational(bad)


def test_lenient_parser():
    assert parse_rational(" 2/4 ", strict=False) == Q(1, 2)
    with pytest.raises(RationalFormatError):
        parse_rational("x", strict=False)


def test_to_scalar():
    assert to_scalar(3) == 3 and isinstance(to_scalar(3), Q)
    assert to_scalar("-1/2") == Q(-1, 2)
    with pytest.raises(TypeError):
        to_scalar(True)
    with pytest.raises(TypeError):
        to_scalar(0.5)


def test_is_integer():
    assert is_integer(Q(4, 2)) and not is_integer(Q(1, 2))


@given(st.fractions())
def test_round_trip(x):
    text = format_rational(x)
    assert parse_rational(text) == x
    assert x.denominator > 0
