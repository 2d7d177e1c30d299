"""Algebraic mapping-torus models.

Given the induced maps of a self-map on a finite complex, this module
derives fixed-point index sums per iterate, the closed-orbit counting
function of the suspension flow, the associated zeta function as an exact
rational function, and the suspension complex as the cone of ``1 - t*phi``
over the rank-one truncated ring.  The torsion/zeta identity is then an
exact statement about unit series, checked coefficient by coefficient.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from ._accel import count_lattice_points
from ._linalg import identity_matrix
from .complexes import BasedComplex, ChainMap, NovikovComplex
from .counting import OrbitCounts
from .series import NovikovSeries, exp_series
from .torsion import novikov_torsion

#: Direction for suspension rings: level of the lattice element k is k.
SUSPENSION_OMEGA = (Fraction(-1),)


# -- integer/rational polynomial helpers --------------------------------
#
# Coefficient lists indexed by power, Fractions throughout, trimmed of
# trailing zeros.  Small and local on purpose: degrees here are tiny.


def _poly_trim(p: List[Fraction]) -> List[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_add(a, b):
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] += c
    return _poly_trim(out)


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return _poly_trim(out)


def _poly_divmod(a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    quo = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    inv_lead = 1 / b[-1]
    while len(rem) >= len(b) and _poly_trim(rem):
        if len(rem) < len(b):
            break
        f = rem[-1] * inv_lead
        k = len(rem) - len(b)
        quo[k] = f
        for i, cb in enumerate(b):
            rem[k + i] -= f * cb
        rem.pop()
    return _poly_trim(quo), _poly_trim(rem)


def _poly_gcd(a, b):
    a, b = list(a), list(b)
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def _poly_log_taylor(p: Sequence[Fraction], n: int) -> List[Fraction]:
    """Taylor coefficients of log p through z^n, requiring p(0) = 1.

    Uses the derivative identity (log p)' = p'/p solved coefficientwise.
    """
    if not p or p[0] != 1:
        raise ValueError("log expansion needs constant term one")
    # l' * p = p'  =>  (k+1) l_{k+1} = (k+1) p_{k+1} - sum_{j>=1} j l_j p_{k+1-j}
    l = [Fraction(0)] * (n + 1)
    for k in range(n):
        acc = Fraction(k + 1) * (p[k + 1] if k + 1 < len(p) else Fraction(0))
        for j in range(1, k + 1):
            idx = k + 1 - j
            if idx < len(p):
                acc -= j * l[j] * p[idx]
        l[k + 1] = acc / (k + 1)
    return l


def _poly_mat_det(mat: List[List[List[Fraction]]]) -> List[Fraction]:
    """Determinant of a matrix of polynomials by cofactor expansion."""
    n = len(mat)
    if n == 0:
        return [Fraction(1)]
    if n == 1:
        return list(mat[0][0])
    total: List[Fraction] = []
    for j in range(n):
        entry = mat[0][j]
        if not entry:
            continue
        minor = [[row[c] for c in range(n) if c != j] for row in mat[1:]]
        term = _poly_mul(entry, _poly_mat_det(minor))
        if j % 2:
            term = [-c for c in term]
        total = _poly_add(total, term)
    return total


@dataclass
class RationalFunction:
    """Reduced quotient of polynomials with constant term 1 downstairs."""

    num: tuple
    den: tuple

    def __init__(self, num, den):
        num = _poly_trim([Fraction(c) for c in num])
        den = _poly_trim([Fraction(c) for c in den])
        if not den:
            raise ZeroDivisionError("zero denominator")
        g = _poly_gcd(num, den)
        if len(g) > 1:
            num, _ = _poly_divmod(num, g)
            den, _ = _poly_divmod(den, g)
        if den[0] == 0:
            raise ValueError("denominator vanishes at the origin")
        scale = den[0]
        self.num = tuple(c / scale for c in num)
        self.den = tuple(c / scale for c in den)

    def taylor(self, n: int) -> List[Fraction]:
        """Power-series coefficients through z^n."""
        out = []
        num, den = list(self.num), list(self.den)
        state = num + [Fraction(0)] * max(0, n + 1 - len(num))
        for k in range(n + 1):
            c = state[k]
            out.append(c)
            if c:
                for i in range(1, len(den)):
                    if k + i <= n:
                        state[k + i] -= c * den[i]
        return out

    def log_taylor(self, n: int) -> List[Fraction]:
        return _poly_add(_poly_log_taylor(self.num, n),
                         [-c for c in _poly_log_taylor(self.den, n)])

    def __call__(self, z):
        num = sum(c * z ** i for i, c in enumerate(self.num))
        den = sum(c * z ** i for i, c in enumerate(self.den))
        return num / den

    def to_json(self):
        def emit(poly):
            if all(c.denominator == 1 for c in poly):
                return [int(c) for c in poly]
            return [[c.numerator, c.denominator] for c in poly]
        return {"num": emit(self.num), "den": emit(self.den)}

    def __repr__(self):
        return f"RationalFunction(num={list(self.num)}, den={list(self.den)})"


# -- fixed-point data ---------------------------------------------------


def _as_int_matrix(m) -> np.ndarray:
    arr = np.empty((len(m), len(m[0]) if len(m) else 0), dtype=object)
    for i, row in enumerate(m):
        for j, v in enumerate(row):
            arr[i, j] = int(v) if float(v) == int(v) else Fraction(v)
    return arr


class LefschetzData:
    """Induced maps of a self-map, or its per-iterate index sums.

    Matrix form stores one integer matrix per degree; the index sums
    ``L_k`` are always derived from traces, never cached alongside.  List
    form stores the ``L_k`` directly (k = 1..k_max) when no generating
    map is available.
    """

    def __init__(self, phi: Optional[Sequence] = None,
                 numbers: Optional[Sequence[int]] = None,
                 k_max: Optional[int] = None):
        if (phi is None) == (numbers is None):
            raise ValueError("provide exactly one of phi and numbers")
        self.phi = None
        self.numbers = None
        if phi is not None:
            self.phi = [_as_int_matrix(m) for m in phi]
            for q, m in enumerate(self.phi):
                if m.shape[0] != m.shape[1]:
                    raise ValueError(f"phi[{q}] is not square")
            self.k_max = k_max if k_max is not None else 20
        else:
            self.numbers = [int(v) for v in numbers]
            self.k_max = k_max if k_max is not None else len(self.numbers)
            if self.k_max > len(self.numbers):
                raise ValueError("k_max exceeds the supplied number list")

    @property
    def has_matrices(self) -> bool:
        return self.phi is not None


class TorusAutomorphism:
    """Hyperbolic 2x2 integer matrix acting on the two-torus."""

    def __init__(self, matrix):
        a = np.asarray(matrix, dtype=object)
        if a.shape != (2, 2) or any(int(v) != v for v in a.flat):
            raise ValueError("need a 2x2 integer matrix")
        self.matrix = np.array([[int(v) for v in row] for row in a], dtype=object)
        det = self.matrix[0, 0] * self.matrix[1, 1] - self.matrix[0, 1] * self.matrix[1, 0]
        tr = self.matrix[0, 0] + self.matrix[1, 1]
        if abs(det) != 1:
            raise ValueError(f"determinant {det} is not a unit")
        if abs(tr) <= 2:
            raise ValueError(f"trace {tr} not hyperbolic (need |tr| > 2)")
        self.det = int(det)
        self.trace = int(tr)

    def lefschetz_data(self, k_max: int = 20) -> LefschetzData:
        """Induced maps on the homology of the torus: 1, A, det A."""
        return LefschetzData(phi=[[[1]], self.matrix, [[self.det]]], k_max=k_max)

    def dominant_log(self) -> float:
        """Log of the spectral radius (the topological entropy)."""
        t = abs(self.trace)
        disc = t * t - 4 * self.det
        return math.log((t + math.sqrt(disc)) / 2.0)


def _mat_power(m: np.ndarray, k: int) -> np.ndarray:
    out = identity_matrix(m.shape[0], True)
    base = m
    while k:
        if k & 1:
            out = out @ base
        base = base @ base if k > 1 else base
        k >>= 1
    return out


def _trace(m: np.ndarray):
    return sum(m[i, i] for i in range(m.shape[0]))


def lefschetz_numbers(data: LefschetzData, k_max: int) -> List[int]:
    """Index sums over the fixed points of each iterate.

    In matrix form this is the alternating trace sum of the k-th powers;
    in list form the stored values are returned (up to their k_max).
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    if not data.has_matrices:
        if k_max > len(data.numbers):
            raise ValueError("requested more iterates than stored")
        return list(data.numbers[:k_max])
    out = []
    powers = [identity_matrix(m.shape[0], True) for m in data.phi]
    for _ in range(k_max):
        for q, m in enumerate(data.phi):
            powers[q] = powers[q] @ m
        val = sum((-1) ** q * _trace(p) for q, p in enumerate(powers))
        out.append(int(val))
    return out


def brute_force_fixed_points(A: TorusAutomorphism, k: int) -> int:
    """Fixed points of the k-th iterate, counted two independent ways.

    The elementary-divisor count ``|det(A^k - I)|`` is cross-checked
    against direct enumeration of lattice representatives; a mismatch
    raises, a singular ``A^k - I`` (non-hyperbolic input) raises.
    """
    M = _mat_power(A.matrix, k) - identity_matrix(2, True)
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    if det == 0:
        raise ValueError(f"A^{k} - I singular: fixed points not isolated")
    d1 = math.gcd(*(abs(int(v)) for v in M.flat))
    d2 = abs(int(det)) // d1
    count = d1 * d2
    enumerated = count_lattice_points(np.array([[int(v) for v in row] for row in M]))
    if enumerated != count:
        raise RuntimeError(
            f"fixed-point count mismatch at k={k}: divisors give {count}, "
            f"enumeration gives {enumerated}")
    return count


def orbit_counts_from_map(data: LefschetzData, k_max: int) -> OrbitCounts:
    """Closed-orbit counting function of the suspension: value L_k/k at k."""
    L = lefschetz_numbers(data, k_max)
    values = {(k,): Fraction(L[k - 1], k) for k in range(1, k_max + 1) if L[k - 1]}
    return OrbitCounts(1, values, SUSPENSION_OMEGA)


def lefschetz_zeta(data: LefschetzData, k_max: Optional[int] = None):
    """Zeta function of the map: exp of the index-sum generating series.

    Matrix-form data admits the closed product of characteristic factors
    ``det(I - z*phi_q)`` with alternating exponents and returns a reduced
    RationalFunction; list-form data has no closed form and yields the
    truncated Taylor coefficient list of the exponential instead.
    """
    if not data.has_matrices:
        n = k_max if k_max is not None else data.k_max
        L = lefschetz_numbers(data, n)
        return _exp_taylor([Fraction(0)] + [Fraction(L[k - 1], k)
                                            for k in range(1, n + 1)])
    num = [Fraction(1)]
    den = [Fraction(1)]
    for q, m in enumerate(data.phi):
        n = m.shape[0]
        poly_mat = [[[Fraction(1 if i == j else 0),
                      -Fraction(int(m[i, j]))] for j in range(n)]
                    for i in range(n)]
        factor = _poly_mat_det([[_poly_trim(e) for e in row] for row in poly_mat])
        if q % 2 == 0:
            den = _poly_mul(den, factor)
        else:
            num = _poly_mul(num, factor)
    return RationalFunction(num, den)


def _exp_taylor(logs: List[Fraction]) -> List[Fraction]:
    """exp of a power series with zero constant term, coefficientwise."""
    n = len(logs) - 1
    out = [Fraction(1)] + [Fraction(0)] * n
    # e' = l' e  =>  (k+1) e_{k+1} = sum_j (j+1) l_{j+1} e_{k-j}
    for k in range(n):
        acc = Fraction(0)
        for j in range(k + 1):
            if j + 1 < len(logs):
                acc += (j + 1) * logs[j + 1] * out[k - j]
        out[k + 1] = acc / (k + 1)
    return out


# -- suspension complexes -----------------------------------------------


def algebraic_mapping_torus(c: BasedComplex, phi, K) -> NovikovComplex:
    """Suspension complex: cone of ``1 - t*phi`` over the rank-one ring.

    ``phi`` is a chain self-map of ``c`` (a ChainMap or its list of degree
    blocks).  Degree q of the result is ``C^{q-1} (+) C^q`` with block
    differential ``[[-d, 1 - t*phi], [0, d]]``; setting t to zero leaves
    an acyclic complex, so the torsion is defined.
    """
    blocks = phi.blocks if isinstance(phi, ChainMap) else list(phi)
    if isinstance(phi, ChainMap):
        if phi.source is not phi.target and phi.source.dims != phi.target.dims:
            raise ValueError("need a chain self-map")
    else:
        blocks = [np.asarray(b, dtype=object) if not isinstance(b, np.ndarray)
                  else b for b in blocks]
        ChainMap(c, c, blocks)  # validates shapes and commutation
    rank, omega = 1, SUSPENSION_OMEGA
    n = c.n_degrees
    dims = [(c.dims[q - 1] if q >= 1 else 0) + (c.dims[q] if q < n else 0)
            for q in range(n + 1)]

    def zero():
        return NovikovSeries.zero(rank, omega, K)

    def const(v):
        return NovikovSeries(rank, omega, K, 1, {(0,): v})

    def cone_entry(q, i, j):
        """Entry (i, j) of the differential from cone degree q to q+1."""
        tq = c.dims[q - 1] if q >= 1 else 0         # shifted copy, source side
        tq1 = c.dims[q] if q < n else 0             # shifted copy, target side
        if i < tq1 and j < tq:
            return const(-c.d[q - 1][i, j]) if q >= 1 else zero()
        if i < tq1 and j >= tq:
            jj = j - tq
            s = NovikovSeries(rank, omega, K, 1,
                              {(0,): 1} if i == jj else {})
            f = blocks[q][i, jj]
            if f != 0:
                s = s - NovikovSeries.monomial(rank, omega, K, (1,), f)
            return s
        if i >= tq1 and j >= tq and q < n - 1:
            v = c.d[q][i - tq1, j - tq]
            return const(v) if v != 0 else zero()
        return zero()

    d = []
    for q in range(len(dims) - 1):
        block = [[cone_entry(q, i, j) for j in range(dims[q])]
                 for i in range(dims[q + 1])]
        d.append(block)
    basis = []
    for q in range(len(dims)):
        labels = []
        if q >= 1:
            labels += [f"t:{lbl}" for lbl in c.basis[q - 1]]
        if q < n:
            labels += [f"s:{lbl}" for lbl in c.basis[q]]
        basis.append(labels)
    return NovikovComplex(dims, d, rank, omega, K, basis)


@dataclass
class TorsionZetaReport:
    """Outcome of the exact torsion-vs-zeta comparison."""
    match: bool
    torsion: NovikovSeries
    zeta: NovikovSeries
    lefschetz: List[int]
    K: object

    def __bool__(self):
        return self.match


def verify_theorem_tor(c: BasedComplex, phi, K) -> TorsionZetaReport:
    """Check that squared suspension torsion equals squared zeta through K.

    One side is the torsion of the mapping torus over the truncated ring;
    the other is ``exp(sum_k L_k t^k / k)``.  Squaring removes the sign
    ambiguity of the torsion representative; the comparison is exact.
    """
    torus = algebraic_mapping_torus(c, phi, K)
    s1 = novikov_torsion(torus, K, convention="cone")
    blocks = phi.blocks if isinstance(phi, ChainMap) else phi
    phi_mats = [np.asarray(b, dtype=object) if not isinstance(b, np.ndarray)
                else b for b in blocks]
    data = LefschetzData(phi=[m.tolist() for m in phi_mats], k_max=int(K))
    L = lefschetz_numbers(data, int(K))
    log_terms = {(k,): Fraction(L[k - 1], k)
                 for k in range(1, int(K) + 1) if L[k - 1]}
    s2 = exp_series(NovikovSeries(1, SUSPENSION_OMEGA, K, 1, log_terms))
    match = (s1 * s1) == (s2 * s2)
    return TorsionZetaReport(match=match, torsion=s1, zeta=s2,
                             lefschetz=L, K=K)


# -- JSON interface ----------------------------------------------------


def map_from_json(data):
    """Map spec: torus automorphism, homology matrices, or number list."""
    if isinstance(data, str):
        data = json.loads(data)
    kind = data.get("type")
    k_max = data.get("k_max")
    if kind == "torus_automorphism":
        aut = TorusAutomorphism(data["matrix"])
        return aut.lefschetz_data(k_max or 20)
    if kind == "homology_maps":
        return LefschetzData(phi=data["phi"], k_max=k_max)
    if kind == "lefschetz_list":
        return LefschetzData(numbers=data["L"], k_max=k_max)
    raise ValueError(f"unknown map spec type {kind!r}")


def load_map(path):
    with open(path) as fh:
        return map_from_json(json.load(fh))
