"""Shared fixtures: bundled models and seeded random generators."""

import importlib.resources
from fractions import Fraction

import numpy as np
import pytest

from novtor import InstantonCounts, OrbitCounts, WeightSystem, load_counting
from novtor.exact import QC

MODELS = importlib.resources.files("novtor") / "models"


@pytest.fixture
def models_dir():
    return MODELS


@pytest.fixture
def circle_model():
    return load_counting(MODELS / "circle.json")


@pytest.fixture
def sphere_model():
    return load_counting(MODELS / "sphere_like.json")


@pytest.fixture
def torus_model():
    return load_counting(MODELS / "torus_novikov.json")


@pytest.fixture
def corrupted_model():
    return load_counting(MODELS / "corrupted.json")


# -- random generators (all explicitly seeded by callers) ---------------


def rand_fraction(rng, lo=-4, hi=4, max_den=5, nonzero=False):
    while True:
        num = int(rng.integers(lo, hi + 1))
        den = int(rng.integers(1, max_den + 1))
        f = Fraction(num, den)
        if f or not nonzero:
            return f


def rand_qc(rng, nonzero=False, allow_imag=True):
    while True:
        q = QC(rand_fraction(rng),
               rand_fraction(rng) if allow_imag else 0)
        if q or not nonzero:
            return q


def rand_exact_weight(rng, rank, zero_ids=(), allow_imag=True):
    """Weight with exact multipliers, so exp-evaluations stay rational."""
    mult = tuple(rand_qc(rng, nonzero=True, allow_imag=allow_imag)
                 for _ in range(rank))
    pots = pot_mult = None
    if zero_ids:
        pot_mult = {z: rand_qc(rng, nonzero=True, allow_imag=allow_imag)
                    for z in zero_ids}
        pots = {z: 0 for z in zero_ids}
    # additive class part is only a float shadow of the multipliers here;
    # identity checks go through the multiplicative path
    cls = tuple(Fraction(0) for _ in range(rank))
    return WeightSystem(cls, pots, None, mult, pot_mult)


def unimodular(rng, n, spread=2):
    """Random integer matrix with determinant +-1 (triangular product)."""
    U = np.empty((n, n), dtype=object)
    L = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            U[i, j] = 1 if i == j else (
                int(rng.integers(-spread, spread + 1)) if j > i else 0)
            L[i, j] = 1 if i == j else (
                int(rng.integers(-spread, spread + 1)) if j < i else 0)
    return U @ L


def unimodular_inverse(S):
    inv = np.round(np.linalg.inv(S.astype(float)))
    out = np.array([[int(v) for v in row] for row in inv], dtype=object)
    assert (S @ out == np.eye(S.shape[0], dtype=int)).all()
    return out


def rand_invertible(rng, n, spread=3):
    while True:
        M = np.array([[int(rng.integers(-spread, spread + 1))
                       for _ in range(n)] for _ in range(n)], dtype=object)
        if n == 0 or round(np.linalg.det(M.astype(float))) != 0:
            return M


def frac_mat(m):
    return np.array([[Fraction(int(v)) for v in row] for row in m],
                    dtype=object)


def rand_acyclic_complex(rng, with_b=True, max_dim=3, u_spread=2, m_spread=3):
    """Exact acyclic three-term complex 0 -> Q^p -> Q^(p+r) -> Q^r -> 0.

    The middle space is split by a random unimodular basis, which makes
    d1 d0 = 0 automatic and both ranks full.  Optional bilinear forms are
    Gram matrices of unimodular frames (determinant one).  The spread
    knobs bound the integer entries; keep them small when the complex is
    later pushed to floats, since conditioning grows fast with them.
    """
    from novtor import BasedComplex
    p = int(rng.integers(1, max_dim + 1))
    r = int(rng.integers(1, max_dim + 1))
    n = p + r
    S = unimodular(rng, n, spread=u_spread)
    Sinv = unimodular_inverse(S)
    d0 = frac_mat(S[:, :p] @ rand_invertible(rng, p, spread=m_spread))
    d1 = frac_mat(rand_invertible(rng, r, spread=m_spread) @ Sinv[p:, :])
    b = None
    if with_b:
        b = []
        for dim in (p, n, r):
            T = unimodular(rng, dim, spread=u_spread)
            b.append(frac_mat(T.T @ T))
    return BasedComplex([p, n, r], [d0, d1], b=b)
