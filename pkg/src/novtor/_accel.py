"""Hot numeric kernels, numba-compiled with a pure-numpy fallback.

Set ``NOVTOR_PURE_NUMPY=1`` to force the fallback path (also taken when
numba is unavailable).  The exact-arithmetic identity checks never pass
through here; these kernels serve the float-grid evaluations and the
enumeration oracles, where the inner loops dominate.

``benchmarks/bench_kernels.py`` compares both paths.
"""

from __future__ import annotations

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("NOVTOR_PURE_NUMPY", "").strip() not in ("", "0")

USING_NUMBA = False
if not _FORCE_NUMPY:
    try:
        from numba import njit
        USING_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass


def _grid_eval_py(amp_re, amp_im, expo, z_re, z_im):
    """values[j] = sum_i amp_i * exp(z_j * expo_i) over a grid of z."""
    n_pts = z_re.shape[0]
    n_terms = amp_re.shape[0]
    out_re = np.zeros(n_pts)
    out_im = np.zeros(n_pts)
    for j in range(n_pts):
        acc_re = 0.0
        acc_im = 0.0
        for i in range(n_terms):
            scale = np.exp(z_re[j] * expo[i])
            ang = z_im[j] * expo[i]
            c = np.cos(ang)
            s = np.sin(ang)
            f_re = scale * c
            f_im = scale * s
            acc_re += amp_re[i] * f_re - amp_im[i] * f_im
            acc_im += amp_re[i] * f_im + amp_im[i] * f_re
        out_re[j] = acc_re
        out_im[j] = acc_im
    return out_re, out_im


def _grid_eval_np(amp_re, amp_im, expo, z_re, z_im):
    amp = amp_re + 1j * amp_im
    z = z_re + 1j * z_im
    factors = np.exp(np.outer(z, expo))
    vals = factors @ amp
    return np.ascontiguousarray(vals.real), np.ascontiguousarray(vals.imag)


def _count_lattice_py(m00, m01, m10, m11):
    """Number of x in [0,1)^2 with M x integral, M the given integer matrix.

    Enumerates integer vectors v in the bounding box of the parallelogram
    spanned by the columns of M and tests 0 <= adj(M) v / det < 1.
    """
    det = m00 * m11 - m01 * m10
    if det == 0:
        return -1
    lo0 = min(0, m00, m01, m00 + m01)
    hi0 = max(0, m00, m01, m00 + m01)
    lo1 = min(0, m10, m11, m10 + m11)
    hi1 = max(0, m10, m11, m10 + m11)
    count = 0
    for v0 in range(lo0, hi0 + 1):
        for v1 in range(lo1, hi1 + 1):
            # x = M^{-1} v = adj(M) v / det
            a0 = m11 * v0 - m01 * v1
            a1 = -m10 * v0 + m00 * v1
            if det < 0:
                a0, a1, d = -a0, -a1, -det
            else:
                d = det
            if 0 <= a0 < d and 0 <= a1 < d:
                count += 1
    return count


def _count_lattice_np(m00, m01, m10, m11):
    det = m00 * m11 - m01 * m10
    if det == 0:
        return -1
    lo0 = min(0, m00, m01, m00 + m01)
    hi0 = max(0, m00, m01, m00 + m01)
    lo1 = min(0, m10, m11, m10 + m11)
    hi1 = max(0, m10, m11, m10 + m11)
    v0 = np.arange(lo0, hi0 + 1, dtype=np.int64)
    v1 = np.arange(lo1, hi1 + 1, dtype=np.int64)
    g0, g1 = np.meshgrid(v0, v1, indexing="ij")
    a0 = m11 * g0 - m01 * g1
    a1 = -m10 * g0 + m00 * g1
    d = det
    if d < 0:
        a0, a1, d = -a0, -a1, -d
    inside = (a0 >= 0) & (a0 < d) & (a1 >= 0) & (a1 < d)
    return int(np.count_nonzero(inside))


if USING_NUMBA:
    grid_eval_kernel = njit(cache=True)(_grid_eval_py)
    count_lattice_kernel = njit(cache=True)(_count_lattice_py)
else:
    grid_eval_kernel = _grid_eval_np
    count_lattice_kernel = _count_lattice_np


def grid_eval(amplitudes, exponents, z_points):
    """Evaluate a Dirichlet-type sum on a grid of complex points."""
    amp = np.asarray(amplitudes, dtype=complex)
    expo = np.asarray(exponents, dtype=float)
    z = np.asarray(z_points, dtype=complex)
    re, im = grid_eval_kernel(
        np.ascontiguousarray(amp.real), np.ascontiguousarray(amp.imag),
        np.ascontiguousarray(expo),
        np.ascontiguousarray(z.real), np.ascontiguousarray(z.imag))
    return re + 1j * im


def count_lattice_points(m) -> int:
    """Enumeration oracle: solutions of ``M x in Z^2`` with ``x in [0,1)^2``."""
    m = np.asarray(m, dtype=np.int64)
    out = count_lattice_kernel(int(m[0, 0]), int(m[0, 1]),
                               int(m[1, 0]), int(m[1, 1]))
    if out < 0:
        raise ValueError("matrix is singular: fixed points not isolated")
    return out
