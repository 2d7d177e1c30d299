"""Truncated Novikov-ring arithmetic.

A series is a sparse map from lattice elements to scalar or square-matrix
coefficients, together with a real direction vector ``omega`` and a
truncation level ``K``: only elements with level ``-<omega, gamma>`` at
most ``K`` are stored.  All ring operations close over that window and
attach a truncation report counting what fell off the edge.

Coefficients stay exact (ints, Fractions, Gaussian rationals) whenever the
inputs are exact; inversion is the geometric series of the Banach-algebra
argument, exp/log are the usual power series with exact rational division.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from ._linalg import (matrix_inverse, matrix_is_exact, operator_norm,
                      zeros_like_field, identity_matrix)
from .exact import QC, is_exact, parse_cnum, parse_rational, to_complex

_MAX_GEOMETRIC_ITER = 100_000


class SupportError(ValueError):
    """Series support violates a positivity requirement."""


class ShapeMismatchError(ValueError):
    pass


@dataclass
class TruncationReport:
    level: object
    discarded_term_count: int = 0
    tail_norm_bound: object = "unknown"


@dataclass
class Verdict:
    """Convergence verdict for a truncated evaluation.

    ``ratio`` is the geometric ratio fitted to the last quarter of stored
    levels; it is reported, never silently trusted.
    """
    converged: bool
    ratio: Optional[float] = None
    tail_bound: Optional[float] = None

    def __bool__(self):
        return self.converged


def _coeff_is_zero(c) -> bool:
    if isinstance(c, np.ndarray):
        return all(not bool(v) if is_exact(v) else v == 0 for v in c.flat)
    return not bool(c) if is_exact(c) else c == 0


def _coeff_eq(a, b) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        if not (isinstance(a, np.ndarray) and isinstance(b, np.ndarray)):
            return False
        if a.shape != b.shape:
            return False
        return all(x == y for x, y in zip(a.flat, b.flat))
    return a == b


def _coeff_abs(c) -> float:
    """Coefficient magnitude; matrices use the max-row-sum operator norm."""
    if isinstance(c, np.ndarray):
        return operator_norm(c)
    return abs(complex(c)) if is_exact(c) else abs(c)


class NovikovSeries:
    """Sparse truncated series over ``Z^rank`` in direction ``omega``."""

    __slots__ = ("rank", "omega", "K", "shape", "terms", "report")

    def __init__(self, rank, omega, K, shape=1, terms=None,
                 report: Optional[TruncationReport] = None):
        self.rank = int(rank)
        self.omega = tuple(omega)
        if len(self.omega) != self.rank:
            raise ShapeMismatchError("omega length must equal rank")
        self.K = K
        self.shape = int(shape)
        self.terms = {}
        if terms:
            for gamma, coeff in terms.items():
                g = tuple(int(v) for v in gamma)
                if len(g) != self.rank:
                    raise ShapeMismatchError("term key rank mismatch")
                if not _coeff_is_zero(coeff):
                    if self.level(g) > K:
                        raise ValueError(
                            f"term at {g} lies above truncation level {K}")
                    self.terms[g] = coeff
        self.report = report or TruncationReport(level=K)

    # -- structure -----------------------------------------------------

    def level(self, gamma):
        return -sum(o * g for o, g in zip(self.omega, gamma))

    @property
    def zero_gamma(self):
        return (0,) * self.rank

    def unit_coeff(self):
        return identity_matrix(self.shape, self.is_exact) if self.shape > 1 else 1

    @property
    def is_exact(self) -> bool:
        for c in self.terms.values():
            if isinstance(c, np.ndarray):
                return matrix_is_exact(c)
            return is_exact(c)
        return True

    def is_zero(self) -> bool:
        return not self.terms

    def leading(self):
        """Coefficient at the lattice origin (zero if absent)."""
        c = self.terms.get(self.zero_gamma)
        if c is not None:
            return c
        if self.shape > 1:
            return zeros_like_field(self.shape, self.shape, self.is_exact)
        return 0

    def support_levels(self):
        return sorted({self.level(g) for g in self.terms})

    def level_collisions(self):
        """Distinct support elements sharing a level (omega not injective)."""
        seen = {}
        clashes = []
        for g in self.terms:
            lv = self.level(g)
            if lv in seen:
                clashes.append((seen[lv], g))
            else:
                seen[lv] = g
        return clashes

    def in_positive_part(self) -> bool:
        """All nonzero terms at strictly positive level (the plus-subring)."""
        return all(self.level(g) > 0 for g in self.terms)

    def min_positive_level(self):
        levels = [self.level(g) for g in self.terms]
        pos = [l for l in levels if l > 0]
        return min(pos) if pos else None

    def _like(self, terms, shape=None, report=None):
        return NovikovSeries(self.rank, self.omega, self.K,
                             shape if shape is not None else self.shape,
                             terms, report)

    @classmethod
    def zero(cls, rank, omega, K, shape=1):
        return cls(rank, omega, K, shape, {})

    @classmethod
    def unit(cls, rank, omega, K, shape=1, exact=True):
        s = cls(rank, omega, K, shape, {})
        coeff = identity_matrix(shape, exact) if shape > 1 else 1
        s.terms[s.zero_gamma] = coeff
        return s

    @classmethod
    def monomial(cls, rank, omega, K, gamma, coeff=1, shape=1):
        return cls(rank, omega, K, shape, {tuple(gamma): coeff})

    # -- ring operations ----------------------------------------------

    def _compatible(self, other: "NovikovSeries"):
        if self.rank != other.rank or self.omega != other.omega:
            raise ShapeMismatchError("rank/direction mismatch")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, QC, float, complex)):
            other = self._scalar_embed(other)
        if not isinstance(other, NovikovSeries):
            return NotImplemented
        self._compatible(other)
        if self.shape != other.shape:
            raise ShapeMismatchError("coefficient shape mismatch in sum")
        K = min(self.K, other.K)
        terms = {}
        for g in set(self.terms) | set(other.terms):
            if self.level(g) > K:
                continue
            a = self.terms.get(g)
            b = other.terms.get(g)
            c = b if a is None else (a if b is None else a + b)
            if not _coeff_is_zero(c):
                terms[g] = c
        return NovikovSeries(self.rank, self.omega, K, self.shape, terms)

    __radd__ = __add__

    def __neg__(self):
        return self._like({g: -c for g, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, NovikovSeries)
                       else -self._scalar_embed(other))

    def __rsub__(self, other):
        return self._scalar_embed(other) + (-self)

    def _scalar_embed(self, value):
        s = NovikovSeries(self.rank, self.omega, self.K, self.shape, {})
        if value != 0:
            coeff = value * self.unit_coeff() if self.shape > 1 else value
            s.terms[s.zero_gamma] = coeff
        return s

    def scale(self, value):
        if value == 0:
            return self._like({})
        return self._like({g: c * value if not isinstance(c, np.ndarray)
                           else c * value for g, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QC, float, complex)):
            return self.scale(other)
        if not isinstance(other, NovikovSeries):
            return NotImplemented
        return convolve(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, QC, float, complex)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            return invert(self ** (-n))
        out = NovikovSeries.unit(self.rank, self.omega, self.K, self.shape,
                                 self.is_exact)
        base = self
        while n:
            if n & 1:
                out = convolve(out, base)
            base = convolve(base, base) if n > 1 else base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, NovikovSeries):
            if other == 0:
                return self.is_zero()
            return self == self._scalar_embed(other)
        if self.rank != other.rank or self.omega != other.omega:
            return False
        if set(self.terms) != set(other.terms):
            return False
        return all(_coeff_eq(self.terms[g], other.terms[g]) for g in self.terms)

    def __repr__(self):
        n = len(self.terms)
        return f"NovikovSeries(rank={self.rank}, K={self.K}, terms={n})"

    # -- JSON ----------------------------------------------------------

    def to_json(self) -> dict:
        def emit_coeff(c):
            if isinstance(c, np.ndarray):
                return [[_emit_scalar(v) for v in row] for row in c]
            return _emit_scalar(c)
        return {
            "rank": self.rank,
            "omega": [_emit_scalar_real(o) for o in self.omega],
            "K": _emit_scalar_real(self.K),
            "shape": self.shape,
            "terms": [{"gamma": list(g), "coeff": emit_coeff(c)}
                      for g, c in sorted(self.terms.items(),
                                         key=lambda kv: (self.level(kv[0]), kv[0]))],
        }

    @classmethod
    def from_json(cls, data) -> "NovikovSeries":
        rank = int(data["rank"])
        omega = tuple(parse_rational(v) for v in data["omega"])
        K = parse_rational(data["K"])
        shape = int(data.get("shape", 1))
        terms = {}
        for t in data.get("terms", []):
            g = tuple(int(v) for v in t["gamma"])
            raw = t["coeff"]
            if shape > 1:
                coeff = np.empty((shape, shape), dtype=object)
                for i, row in enumerate(raw):
                    for j, v in enumerate(row):
                        coeff[i, j] = parse_cnum(v)
            else:
                coeff = parse_cnum(raw)
            terms[g] = coeff
        return cls(rank, omega, K, shape, terms)


def _emit_scalar(v):
    if isinstance(v, QC):
        if v.im == 0 and v.re.denominator == 1:
            return int(v.re)
        return [[v.re.numerator, v.re.denominator], [v.im.numerator, v.im.denominator]]
    if isinstance(v, Fraction):
        # bare [a, b] would re-parse as a complex pair, so use the long form
        return int(v) if v.denominator == 1 else \
            [[v.numerator, v.denominator], 0]
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def _emit_scalar_real(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else [v.numerator, v.denominator]
    return v


# -- operations --------------------------------------------------------


def convolve(a: NovikovSeries, b: NovikovSeries, K=None) -> NovikovSeries:
    """Convolution product truncated at level K (default: min of inputs)."""
    a._compatible(b)
    if a.shape != b.shape and 1 not in (a.shape, b.shape):
        raise ShapeMismatchError(
            f"coefficient shapes {a.shape} and {b.shape} not composable")
    if K is None:
        K = min(a.K, b.K)
    shape = max(a.shape, b.shape)
    terms = {}
    discarded = 0
    for g1, c1 in a.terms.items():
        for g2, c2 in b.terms.items():
            g = tuple(x + y for x, y in zip(g1, g2))
            if -sum(o * v for o, v in zip(a.omega, g)) > K:
                discarded += 1
                continue
            if isinstance(c1, np.ndarray) and isinstance(c2, np.ndarray):
                c = c1 @ c2
            else:
                c = c1 * c2
            prev = terms.get(g)
            terms[g] = c if prev is None else prev + c
    terms = {g: c for g, c in terms.items() if not _coeff_is_zero(c)}
    report = TruncationReport(level=K, discarded_term_count=discarded)
    return NovikovSeries(a.rank, a.omega, K, shape, terms, report)


def invert(a: NovikovSeries, K=None) -> NovikovSeries:
    """Two-sided inverse up to truncation, via the geometric series.

    Requires an invertible leading coefficient and the normalized remainder
    supported at strictly positive levels.
    """
    if K is None:
        K = a.K
    a0 = a.leading()
    if a.shape > 1:
        try:
            a0_inv = matrix_inverse(a0)
        except (ValueError, np.linalg.LinAlgError) as e:
            raise SupportError("leading coefficient singular") from e
    else:
        if _coeff_is_zero(a0):
            raise SupportError("leading coefficient is zero")
        if isinstance(a0, int):
            a0_inv = Fraction(1, a0)
        else:
            a0_inv = 1 / a0 if is_exact(a0) else 1.0 / a0
    work = NovikovSeries(a.rank, a.omega, K, a.shape, dict(a.terms))
    # mu := 1 - a0^{-1} * a must live strictly above level zero
    if a.shape > 1:
        norm = NovikovSeries(a.rank, a.omega, K, a.shape,
                             {g: a0_inv @ c for g, c in work.terms.items()})
    else:
        norm = work.scale(a0_inv)
    mu = NovikovSeries.unit(a.rank, a.omega, K, a.shape, a.is_exact) - norm
    if not mu.in_positive_part():
        raise SupportError(
            "support not in the positive part: nonzero terms at level <= 0 "
            "beyond the unit")
    acc = NovikovSeries.unit(a.rank, a.omega, K, a.shape, a.is_exact)
    p = mu
    steps = 0
    discarded = 0
    while not p.is_zero():
        acc = acc + p
        p = convolve(p, mu, K)
        discarded += p.report.discarded_term_count
        steps += 1
        if steps > _MAX_GEOMETRIC_ITER:
            raise RuntimeError("geometric series failed to terminate; "
                               "minimal positive level too small")
    if a.shape > 1:
        result = NovikovSeries(a.rank, a.omega, K, a.shape,
                               {g: c @ a0_inv for g, c in acc.terms.items()})
    else:
        result = acc.scale(a0_inv)
    result.report = TruncationReport(level=K, discarded_term_count=discarded)
    return result


def log_series(u: NovikovSeries, K=None) -> NovikovSeries:
    """Logarithm of a series in 1 plus the positive part."""
    if K is None:
        K = u.K
    one = NovikovSeries.unit(u.rank, u.omega, K, u.shape, u.is_exact)
    mu = NovikovSeries(u.rank, u.omega, K, u.shape, dict(u.terms)) - one
    if not mu.in_positive_part():
        raise SupportError("log requires input in 1 + positive part")
    # log(1 + mu) = sum_{k>0} (-1)^{k+1} mu^k / k
    acc = NovikovSeries.zero(u.rank, u.omega, K, u.shape)
    p = mu
    k = 1
    while not p.is_zero():
        term = p.scale(Fraction((-1) ** (k + 1), k) if p.is_exact
                       else (-1.0) ** (k + 1) / k)
        acc = acc + term
        p = convolve(p, mu, K)
        k += 1
        if k > _MAX_GEOMETRIC_ITER:
            raise RuntimeError("log series failed to terminate")
    return acc


def exp_series(lam: NovikovSeries, K=None) -> NovikovSeries:
    """Exponential of a series in the positive part; lands in 1 + positive."""
    if K is None:
        K = lam.K
    work = NovikovSeries(lam.rank, lam.omega, K, lam.shape, dict(lam.terms))
    if not work.in_positive_part():
        raise SupportError("exp requires support at strictly positive levels")
    acc = NovikovSeries.unit(lam.rank, lam.omega, K, lam.shape, lam.is_exact)
    p = work
    k = 1
    fact = 1
    while not p.is_zero():
        acc = acc + p.scale(Fraction(1, fact) if p.is_exact else 1.0 / fact)
        p = convolve(p, work, K)
        k += 1
        fact *= k
        if k > _MAX_GEOMETRIC_ITER:
            raise RuntimeError("exp series failed to terminate")
    return acc


def l1_norm(a: NovikovSeries, w=None):
    """Weighted L1 norm over stored terms; returns (value, tail_known).

    ``tail_known`` is False when the series' truncation report records
    discarded terms, in which case the value is only a partial sum.
    """
    total = 0.0
    for g, c in a.terms.items():
        weight = 1.0
        if w is not None:
            weight = abs(to_complex(w.exp_class(g)))
        total += _coeff_abs(c) * weight
    return total, a.report.discarded_term_count == 0


def _tail_fit(levels, magnitudes):
    """Geometric ratio fitted to the last quarter of per-level mass."""
    if len(levels) < 4:
        return None
    n_tail = max(3, len(levels) // 4)
    lv = np.array([float(l) for l in levels[-n_tail:]])
    mg = np.array(magnitudes[-n_tail:])
    mask = mg > 0
    if mask.sum() < 2:
        return None
    slope = np.polyfit(lv[mask], np.log(mg[mask]), 1)[0]
    return float(math.exp(slope))


def evaluate(a: NovikovSeries, w) -> tuple:
    """Evaluation homomorphism at a weight, with convergence verdict.

    Returns ``(value, verdict)``.  The value is the finite sum over stored
    terms (exact when both series and weight are exact); the verdict
    extrapolates a geometric tail from the last quarter of levels.
    """
    if w.rank != a.rank:
        raise ShapeMismatchError("weight rank mismatch")
    value = zeros_like_field(a.shape, a.shape, a.is_exact) if a.shape > 1 else 0
    by_level = {}
    for g, c in a.terms.items():
        f = w.exp_class(g)
        term = c * f if not isinstance(c, np.ndarray) else c * f
        value = value + term
        lv = a.level(g)
        by_level[lv] = by_level.get(lv, 0.0) + _coeff_abs(c) * abs(to_complex(f))
    levels = sorted(by_level)
    mags = [by_level[l] for l in levels]
    ratio = _tail_fit(levels, mags)
    if ratio is None:
        verdict = Verdict(converged=True, ratio=None,
                          tail_bound=0.0 if len(levels) <= 3 else None)
    elif ratio < 1.0:
        tail = mags[-1] * ratio / (1.0 - ratio)
        verdict = Verdict(converged=True, ratio=ratio, tail_bound=tail)
    else:
        verdict = Verdict(converged=False, ratio=ratio, tail_bound=None)
    return value, verdict


class InsufficientDataError(ValueError):
    pass


def abscissa_estimate(a: NovikovSeries, base=None, omega=None,
                      min_levels: int = 8) -> float:
    """Abscissa of absolute convergence, estimated from stored data.

    Uses the classical cumulative-sum estimator: the growth rate of
    ``log(sum of absolute terms up to level L)`` in ``L``, extracted by a
    least-squares fit of ``rho*L + beta*log L + c`` over the last quarter
    of distinct levels (the ``log L`` term absorbs the polynomial factor
    of borderline series).
    """
    if omega is None:
        omega = a.omega
    by_level = {}
    for g, c in a.terms.items():
        lv = -sum(o * v for o, v in zip(omega, g))
        weight = abs(to_complex(base.exp_class(g))) if base is not None else 1.0
        mag = _coeff_abs(c) * weight
        if lv <= 0:
            if any(v != 0 for v in g):
                raise SupportError("levels must be strictly positive beyond the unit")
            continue
        by_level[lv] = by_level.get(lv, 0.0) + mag
    levels = sorted(by_level)
    if len(levels) < min_levels:
        raise InsufficientDataError(
            f"need at least {min_levels} distinct levels, have {len(levels)}")
    cums = np.cumsum([by_level[l] for l in levels])
    lv = np.array([float(l) for l in levels])
    mask = cums > 0
    n_tail = max(min_levels, len(levels) // 4)
    lv_t = lv[mask][-n_tail:]
    log_a = np.log(cums[mask][-n_tail:])
    design = np.column_stack([lv_t, np.log(lv_t), np.ones_like(lv_t)])
    coeffs, *_ = np.linalg.lstsq(design, log_a, rcond=None)
    return float(coeffs[0])
