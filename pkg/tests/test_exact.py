"""Gaussian-rational scalar arithmetic and JSON number parsing."""

from fractions import Fraction

import pytest

from novtor.exact import QC, emit_cnum, is_exact, parse_cnum, parse_rational, to_complex


def test_basic_arithmetic():
    a = QC(Fraction(1, 2), Fraction(1, 3))
    b = QC(2, -1)
    assert a + b == QC(Fraction(5, 2), Fraction(-2, 3))
    assert a * b == QC(Fraction(4, 3), Fraction(1, 6))
    assert (a * b) / b == a
    assert -a + a == QC(0)
    assert a - a == 0


def test_division_and_powers():
    u = QC(Fraction(1, 2))
    assert 1 / u == QC(2)
    assert u ** -2 == QC(4)
    assert u ** 0 == QC(1)
    i = QC(0, 1)
    assert i * i == -1
    assert i ** 4 == 1


def test_int_interop_keeps_exactness():
    u = QC(Fraction(3, 7))
    assert is_exact(2 * u)
    assert is_exact(u + 1)
    assert is_exact(Fraction(1, 2) * u)
    assert 3 * u == QC(Fraction(9, 7))


def test_float_interop_degrades_to_complex():
    u = QC(Fraction(1, 2))
    assert u * 2.0 == 1.0
    assert isinstance(u * (1 + 1j), complex)
    assert abs(u + 0.5 - 1.0) < 1e-15


def test_zero_division():
    with pytest.raises(ZeroDivisionError):
        1 / QC(0)


def test_parse_rational():
    assert parse_rational(3) == Fraction(3)
    assert parse_rational([2, 3]) == Fraction(2, 3)
    assert parse_rational(0.5) == 0.5
    with pytest.raises(ValueError):
        parse_rational("nope")
    with pytest.raises(ValueError):
        parse_rational([1, 2, 3])


def test_parse_cnum_shapes():
    assert parse_cnum(2) == QC(2)
    assert parse_cnum([1, 2]) == QC(1, 2)
    assert parse_cnum([[1, 2], 0]) == QC(Fraction(1, 2))
    assert parse_cnum([0.5, 0]) == 0.5 + 0j
    assert isinstance(parse_cnum([[1, 3], [2, 5]]), QC)


def test_emit_round_trip():
    v = QC(Fraction(1, 4), Fraction(-2, 3))
    re, im = emit_cnum(v)
    assert abs(complex(re, im) - to_complex(v)) < 1e-15
