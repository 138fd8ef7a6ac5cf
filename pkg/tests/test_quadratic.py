import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from halo.numeric.quadratic import QuadraticNumber, exact_floor, exact_sign, format_exact, parse_real

SQRT2 = QuadraticNumber.sqrt(2)
rationals = st.fractions(min_value=-50, max_value=50, max_denominator=40)


def quad(a, b, D=2):
    return QuadraticNumber(a, b, D)


def mp(x: QuadraticNumber):
    return mpmath.mpf(x.a.numerator) / x.a.denominator + mpmath.mpf(x.b.numerator) / x.b.denominator * mpmath.sqrt(x.D)


@given(rationals, rationals, rationals, rationals)
def test_field_operations_match_high_precision(a, b, c, d):
    mpmath.mp.dps = 50
    x, y = quad(a, b), quad(c, d)
    for exact, ref in ((x + y, mp(x) + mp(y)), (x - y, mp(x) - mp(y)), (x * y, mp(x) * mp(y))):
        assert abs(mp(exact) - ref) <= mpmath.mpf(10) ** -40 * (1 + abs(ref))
    if y != 0:
        assert abs(mp(x / y) - mp(x) / mp(y)) <= mpmath.mpf(10) ** -35 * (1 + abs(mp(x) / mp(y)))


@given(rationals, rationals)
def test_sign_and_floor_agree_with_high_precision(a, b):
    mpmath.mp.dps = 60
    x = quad(a, b)
    v = mp(x)
    assert exact_sign(x) == (0 if v == 0 else (1 if v > 0 else -1))
    assert exact_floor(x) == int(mpmath.floor(v))


@given(rationals, rationals)
def test_conjugate_norm(a, b):
    x = quad(a, b)
    assert x * x.conjugate() == x.norm()


def test_float_survives_cancellation():
    # 80782 - 57121 sqrt 2 ~ 6.19e-6; the naive float sum loses most digits
    x = quad(665857, -470832)
    mpmath.mp.dps = 50
    assert float(x) == pytest.approx(float(mp(x)), rel=1e-15)
    big = quad(10**200 + 1, -(10**200))  # a big negative-sign pair
    assert float(big) == pytest.approx(float(mp(big)), rel=1e-15)


@pytest.mark.parametrize("text, value", [
    ("sqrt2", SQRT2), ("√2", SQRT2), ("golden", (1 + QuadraticNumber.sqrt(5)) / 2),
    ("5/3", Fraction(5, 3)), ("7", Fraction(7)), ("1-2√2", 1 - 2 * SQRT2),
])
def test_parse(text, value):
    assert parse_real(text) == value


@given(rationals, rationals.filter(lambda b: b != 0))
def test_print_parse_round_trip(a, b):
    x = quad(a, b)
    assert parse_real(format_exact(x)) == x


def test_display_forms():
    assert str(SQRT2) == "√2"
    assert str((1 + QuadraticNumber.sqrt(5)) / 2) == "(1+√5)/2"
    assert str(-QuadraticNumber.sqrt(3)) == "-√3"


def test_mixed_fields_rejected():
    with pytest.raises(ValueError):
        SQRT2 + QuadraticNumber.sqrt(3)


def test_non_squarefree_rejected():
    with pytest.raises(ValueError):
        QuadraticNumber(0, 1, 4)
