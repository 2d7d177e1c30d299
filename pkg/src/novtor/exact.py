"""Exact Gaussian-rational scalars and JSON number parsing.

All identity checks in this package run over exact scalars whenever the
input data is rational; floats enter only through transcendental
evaluation (exp, log, eigenvalues).  A Gaussian rational is a pair of
`Fraction`s; plain ints and Fractions interoperate with it, so ``0`` and
``1`` serve as universal zero/one across the exact and float paths.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class QC:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, QC):
            return other
        if isinstance(other, (int, Rational)):
            return QC(other)
        return None

    @staticmethod
    def _is_inexact(other):
        return isinstance(other, (float, complex))

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            if self._is_inexact(other):
                return complex(self) + other
            return NotImplemented
        return QC(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            if self._is_inexact(other):
                return complex(self) - other
            return NotImplemented
        return QC(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            if self._is_inexact(other):
                return other - complex(self)
            return NotImplemented
        return QC(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            if self._is_inexact(other):
                return complex(self) * other
            return NotImplemented
        return QC(self.re * o.re - self.im * o.im,
                  self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            if self._is_inexact(other):
                return complex(self) / other
            return NotImplemented
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return QC((self.re * o.re + self.im * o.im) / n,
                  (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            if self._is_inexact(other):
                return other / complex(self)
            return NotImplemented
        return o / self

    def __neg__(self):
        return QC(-self.re, -self.im)

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return 1 / (self ** (-n))
        out = QC(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparison / conversion --------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return complex(self) == complex(other)
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __abs__(self):
        return abs(complex(self))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self):
        return QC(self.re, -self.im)

    def __repr__(self):
        return f"QC({self.re!r}, {self.im!r})"


def is_exact(x) -> bool:
    """True for scalars on the exact arithmetic path."""
    return isinstance(x, (int, Rational, QC))


def to_complex(x) -> complex:
    if isinstance(x, QC):
        return complex(x)
    if isinstance(x, Rational):
        return complex(float(x), 0.0)
    return complex(x)


def parse_rational(v) -> Fraction | float:
    """Parse a JSON number; ``[num, den]`` pairs denote exact rationals."""
    if isinstance(v, list):
        if len(v) != 2:
            raise ValueError(f"rational pair must have two entries, got {v}")
        return Fraction(int(v[0]), int(v[1]))
    if isinstance(v, bool):
        raise ValueError("boolean is not a number")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    raise ValueError(f"cannot parse number from {v!r}")


def parse_cnum(v):
    """Parse a JSON complex entry ``[re, im]`` (or a bare real number).

    Each part may itself be a ``[num, den]`` rational pair.  Returns a QC
    when both parts are rational, a python complex otherwise.
    """
    if isinstance(v, list):
        if len(v) != 2:
            raise ValueError(f"complex entry must be [re, im], got {v}")
        re, im = parse_rational(v[0]), parse_rational(v[1])
    else:
        re, im = parse_rational(v), Fraction(0)
    if isinstance(re, Fraction) and isinstance(im, Fraction):
        return QC(re, im)
    return complex(float(re), float(im))


def emit_cnum(x) -> list:
    """Emit a scalar as a ``[re, im]`` float pair for reports."""
    z = to_complex(x)
    return [z.real, z.imag]
