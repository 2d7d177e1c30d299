"""Small dense linear algebra over exact scalars (object arrays) and floats.

Exact matrices are numpy arrays with ``dtype=object`` holding ints,
Fractions or QC values; float matrices are ``complex128``.  Rank decisions
on the float path use a relative singular-value threshold (default 1e-9).
"""

from __future__ import annotations

import numpy as np

from .exact import QC, is_exact

FLOAT_RANK_TOL = 1e-9


def exact_matrix(rows) -> np.ndarray:
    m = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            m[i, j] = v
    return m


def zeros_like_field(nrows, ncols, exact: bool) -> np.ndarray:
    if exact:
        m = np.empty((nrows, ncols), dtype=object)
        m[:] = 0
        return m
    return np.zeros((nrows, ncols), dtype=complex)


def identity_matrix(n, exact: bool) -> np.ndarray:
    m = zeros_like_field(n, n, exact)
    for i in range(n):
        m[i, i] = 1
    return m


def matrix_is_exact(m: np.ndarray) -> bool:
    return m.dtype == object


def to_float_matrix(m: np.ndarray) -> np.ndarray:
    if m.dtype != object:
        return m.astype(complex)
    out = np.zeros(m.shape, dtype=complex)
    for idx in np.ndindex(m.shape):
        out[idx] = complex(m[idx]) if isinstance(m[idx], QC) else complex(m[idx])
    return out


def exact_row_reduce(m: np.ndarray):
    """Gaussian elimination over an exact field.

    Returns (rank, det_of_pivots, pivot_columns, reduced_matrix).  The
    determinant accumulator is only meaningful for square full-rank input.
    """
    a = m.copy()
    nr, nc = a.shape
    rank = 0
    det = QC(1)
    pivots = []
    for col in range(nc):
        piv = None
        for r in range(rank, nr):
            if a[r, col] != 0:
                piv = r
                break
        if piv is None:
            continue
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
            det = -det
        p = a[rank, col]
        det = det * p
        for r in range(nr):
            if r != rank and a[r, col] != 0:
                factor = a[r, col] / p
                for c in range(col, nc):
                    a[r, c] = a[r, c] - factor * a[rank, c]
        pivots.append(col)
        rank += 1
        if rank == nr:
            break
    return rank, det, pivots, a


def exact_rank(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    return exact_row_reduce(m)[0]


def exact_det(m: np.ndarray):
    nr, nc = m.shape
    if nr != nc:
        raise ValueError("determinant of non-square matrix")
    if nr == 0:
        return QC(1)
    rank, det, _, _ = exact_row_reduce(m)
    if rank < nr:
        return QC(0)
    return det


def exact_inverse(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    if m.shape[1] != n:
        raise ValueError("inverse of non-square matrix")
    aug = np.empty((n, 2 * n), dtype=object)
    aug[:, :n] = m
    aug[:, n:] = identity_matrix(n, True)
    rank, _, _, red = exact_row_reduce(aug)
    if rank < n:
        raise ValueError("singular matrix")
    inv = np.empty((n, n), dtype=object)
    for i in range(n):
        p = red[i, i]
        for j in range(n):
            inv[i, j] = red[i, n + j] / p
    return inv


def matrix_rank(m: np.ndarray, tol: float = FLOAT_RANK_TOL) -> int:
    """Rank; exact over rational entries, SVD threshold over floats."""
    if m.size == 0:
        return 0
    if matrix_is_exact(m):
        return exact_rank(m)
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def matrix_det(m: np.ndarray):
    if matrix_is_exact(m):
        return exact_det(m)
    if m.shape[0] == 0:
        return complex(1)
    return complex(np.linalg.det(m))


def matrix_inverse(m: np.ndarray) -> np.ndarray:
    if matrix_is_exact(m):
        return exact_inverse(m)
    return np.linalg.inv(m)


def max_abs(m: np.ndarray) -> float:
    """Largest entry magnitude; 0 for empty matrices."""
    if m.size == 0:
        return 0.0
    return max(abs(complex(v)) if is_exact(v) else abs(v) for v in m.flat)


def operator_norm(m: np.ndarray) -> float:
    """Max-row-sum operator norm (pinned globally for L1 estimates)."""
    if m.size == 0:
        return 0.0
    return max(sum(abs(complex(v)) for v in row) for row in m)
