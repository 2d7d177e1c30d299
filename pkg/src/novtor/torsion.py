"""Milnor torsion of finite acyclic based complexes.

One contraction algorithm serves three scalar domains: exact Gaussian
rationals, floating complex numbers, and truncated Novikov series (where
pivot inversion is the geometric series).  Sign and exponent choices are
pinned in a single convention table; squared torsions are the canonical
quantities, representatives are convention-scoped.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

import numpy as np

from ._linalg import matrix_det, matrix_is_exact
from .complexes import (BasedComplex, ChainMap, NovikovComplex, b_laplacian,
                        cohomology, mapping_cone)
from .exact import QC, is_exact, to_complex
from .series import NovikovSeries, convolve, invert

#: Convention table.  "two-term-det": for 0 -> C^n -> C^n -> 0 in degrees
#: (0, 1) with differential D the representative is det(D).  "cone": the
#: reciprocal normalization, fixed so that the one-dimensional suspension
#: block (1 - a t) yields the geometric series on both sides of the
#: torsion/zeta identity.
CONVENTIONS = {
    "two-term-det": +1,
    "cone": -1,
}


class NotAcyclicError(ValueError):
    pass


@dataclass
class TorsionValue:
    squared_value: object
    representative: Optional[object]
    convention_id: str

    def to_json(self):
        from .exact import emit_cnum
        return {
            "squared": emit_cnum(self.squared_value),
            "representative": (emit_cnum(self.representative)
                               if self.representative is not None else None),
            "convention": self.convention_id,
        }


# -- scalar domain strategies ------------------------------------------


class _ExactOps:
    exact = True

    def is_zero(self, x):
        return not bool(x) if is_exact(x) else x == 0

    def is_unit(self, x):
        return not self.is_zero(x)

    def inv(self, x):
        return Fraction(1, x) if isinstance(x, int) else 1 / x

    def pivot_quality(self, x):
        return 1.0

    one = 1


class _FloatOps:
    exact = False

    def __init__(self, tol=1e-12):
        self.tol = tol

    def is_zero(self, x):
        return abs(x) <= self.tol

    def is_unit(self, x):
        return abs(x) > self.tol

    def inv(self, x):
        return 1.0 / x

    def pivot_quality(self, x):
        return abs(x)

    one = 1.0 + 0.0j


class _SeriesOps:
    """Truncated-ring scalars; units have a nonzero level-zero coefficient."""

    exact = True

    def __init__(self, rank, omega, K):
        self.rank = rank
        self.omega = tuple(omega)
        self.K = K
        self.one = NovikovSeries.unit(rank, self.omega, K)

    def is_zero(self, x: NovikovSeries):
        return x.is_zero()

    def is_unit(self, x: NovikovSeries):
        lead = x.leading()
        if not bool(lead) if is_exact(lead) else lead == 0:
            return False
        return all(x.level(g) >= 0 for g in x.terms)

    def inv(self, x: NovikovSeries):
        return invert(x, self.K)

    def pivot_quality(self, x):
        return 1.0


def _to_rows(mat) -> list:
    if isinstance(mat, np.ndarray):
        return [list(row) for row in mat]
    return [list(row) for row in mat]


def _submatrix_det(rows_idx, cols_idx, mat, ops):
    """Determinant of a square submatrix by elimination with unit pivots."""
    sub = [[mat[i][j] for j in cols_idx] for i in sorted(rows_idx)]
    n = len(sub)
    det = ops.one
    sign = 1
    for col in range(n):
        best, best_q = None, 0.0
        for r in range(col, n):
            x = sub[r][col]
            if ops.is_unit(x):
                q = ops.pivot_quality(x)
                if best is None or q > best_q:
                    best, best_q = r, q
        if best is None:
            raise NotAcyclicError("singular pivot block in torsion elimination")
        if best != col:
            sub[col], sub[best] = sub[best], sub[col]
            sign = -sign
        p = sub[col][col]
        det = det * p
        p_inv = ops.inv(p)
        for r in range(col + 1, n):
            f = sub[r][col] * p_inv
            if ops.is_zero(f):
                continue
            for cc in range(col, n):
                sub[r][cc] = sub[r][cc] - f * sub[col][cc]
    return det * sign if sign < 0 else det


def _select_pivot_rows(mat, cols_idx, ops):
    """Row subset making ``mat[rows, cols]`` invertible, via elimination."""
    nrows = len(mat)
    work = [[mat[i][j] for j in cols_idx] for i in range(nrows)]
    used = [False] * nrows
    rows = []
    for col in range(len(cols_idx)):
        best, best_q = None, 0.0
        for r in range(nrows):
            if used[r]:
                continue
            x = work[r][col]
            if ops.is_unit(x):
                q = ops.pivot_quality(x)
                if best is None or q > best_q:
                    best, best_q = r, q
        if best is None:
            raise NotAcyclicError("columns not independent: complex not acyclic")
        used[best] = True
        rows.append(best)
        p_inv = ops.inv(work[best][col])
        for r in range(nrows):
            if used[r] or ops.is_zero(work[r][col]):
                continue
            f = work[r][col] * p_inv
            for cc in range(col, len(cols_idx)):
                work[r][cc] = work[r][cc] - f * work[best][cc]
    return rows


def _contraction_torsion(dims: List[int], d_mats: List, ops):
    """Alternating product of pivot-minor determinants.

    Walks the complex bottom-up, choosing in each degree a basis subset
    whose image spans the next image; returns the product of the square
    minor determinants with exponent ``(-1)^q``.
    """
    n = len(dims)
    tau = ops.one
    cols = list(range(dims[0])) if n else []
    for q in range(n - 1):
        mat = _to_rows(d_mats[q])
        if not cols:
            cols = list(range(dims[q + 1]))
            continue
        if dims[q + 1] == 0:
            raise NotAcyclicError("nonzero kernel with zero target: not acyclic")
        rows = _select_pivot_rows(mat, cols, ops)
        det = _submatrix_det(rows, cols, mat, ops)
        tau = tau * det if q % 2 == 0 else tau * ops.inv(det)
        cols = [i for i in range(dims[q + 1]) if i not in set(rows)]
    if cols:
        raise NotAcyclicError("surviving generators in top degree: not acyclic")
    return tau


# -- public operations -------------------------------------------------


def milnor_torsion(c: BasedComplex, convention: str = "two-term-det") -> TorsionValue:
    """Torsion of an acyclic complex against its distinguished bases."""
    if any(b != 0 for b in cohomology(c)):
        raise NotAcyclicError("complex has nonzero cohomology")
    ops = _ExactOps() if c.is_exact else _FloatOps()
    tau = _contraction_torsion(c.dims, c.d, ops)
    if CONVENTIONS[convention] < 0:
        tau = ops.inv(tau)
    return TorsionValue(squared_value=tau * tau, representative=tau,
                        convention_id=convention)


def torsion_via_laplacian(c: BasedComplex):
    """Squared torsion from the determinant product of the b-Laplacians.

    Valid when every degreewise Laplacian is invertible; the exponent in
    degree q is ``(-1)^(q+1) * q``.
    """
    B = b_laplacian(c)
    result = QC(1) if c.is_exact else complex(1.0)
    for q, Bq in enumerate(B):
        det = matrix_det(Bq)
        if (not bool(det)) if is_exact(det) else abs(det) < 1e-300:
            raise NotAcyclicError(
                f"singular Laplacian in degree {q}: complex not acyclic "
                "or bilinear form degenerate on it")
        expo = q if q % 2 == 1 else -q  # exponent (-1)^(q+1) * q
        if expo >= 0:
            result = result * det ** expo
        else:
            result = result / det ** (-expo)
    return result


def relative_torsion(f: ChainMap, convention: str = "cone") -> TorsionValue:
    """Torsion of a quasi-isomorphism via its mapping cone."""
    cone = mapping_cone(f)
    if any(b != 0 for b in cohomology(cone)):
        raise NotAcyclicError("mapping cone not acyclic: map is no quasi-iso")
    ops = _ExactOps() if cone.is_exact else _FloatOps()
    tau = _contraction_torsion(cone.dims, cone.d, ops)
    if CONVENTIONS[convention] < 0:
        tau = ops.inv(tau)
    return TorsionValue(squared_value=tau * tau, representative=tau,
                        convention_id=convention)


def novikov_torsion(c: NovikovComplex, K=None,
                    convention: str = "cone") -> NovikovSeries:
    """Torsion over the truncated ring, as a unit series.

    Requires the leading complex (evaluation of every entry at the lattice
    origin) to be acyclic, which makes all pivots units.
    """
    if K is None:
        K = c.K
    ops = _SeriesOps(c.rank, c.omega, K)
    lead_dims = c.dims
    # leading-complex acyclicity proxy: the contraction below fails with
    # NotAcyclicError exactly when a unit pivot cannot be found
    tau = _contraction_torsion(lead_dims, c.d, ops)
    if CONVENTIONS[convention] < 0:
        tau = invert(tau, K)
    return tau
