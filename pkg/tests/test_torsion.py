"""Torsion of acyclic complexes: contraction, Laplacian, cone, series."""

from fractions import Fraction

import numpy as np
import pytest

from conftest import frac_mat, rand_acyclic_complex
from novtor import (BasedComplex, ChainMap, NovikovSeries, convolve, invert,
                    mapping_cone, milnor_torsion, novikov_torsion,
                    relative_torsion, torsion_via_laplacian)
from novtor.complexes import NovikovComplex
from novtor.exact import QC
from novtor.torsion import CONVENTIONS, NotAcyclicError

OMEGA = (Fraction(-1),)


def test_two_term_torsion_is_determinant():
    d = frac_mat([[2, 1], [1, 1]])
    c = BasedComplex([2, 2], [d])
    tv = milnor_torsion(c)
    assert tv.representative == 1  # det = 1
    d2 = frac_mat([[3, 0], [0, 2]])
    tv2 = milnor_torsion(BasedComplex([2, 2], [d2]))
    assert tv2.squared_value == 36


def test_convention_table_reciprocal():
    d = frac_mat([[5]])
    c = BasedComplex([1, 1], [d])
    plus = milnor_torsion(c, convention="two-term-det")
    minus = milnor_torsion(c, convention="cone")
    assert plus.representative == 5
    assert minus.representative == Fraction(1, 5)
    assert set(CONVENTIONS) == {"two-term-det", "cone"}


def test_non_acyclic_rejected():
    c = BasedComplex([1, 1], [frac_mat([[0]])])
    with pytest.raises(NotAcyclicError):
        milnor_torsion(c)


def test_three_term_alternating_product():
    # 0 -> Q -(1,0)-> Q^2 -(0,3)-> Q -> 0: tau = 1 / 3... times pivot dets
    d0 = frac_mat([[1], [0]])
    d1 = frac_mat([[0, 3]])
    c = BasedComplex([1, 2, 1], [d0, d1])
    tv = milnor_torsion(c)
    assert tv.representative == Fraction(1, 3)


def test_torsion_squared_basis_stability():
    """Changing bases by determinant-one matrices preserves tau squared."""
    rng = np.random.default_rng(41)
    from conftest import unimodular, unimodular_inverse
    for _ in range(10):
        c = rand_acyclic_complex(rng, with_b=False)
        sq = milnor_torsion(c).squared_value
        ms = [unimodular(rng, n) for n in c.dims]
        d_new = [frac_mat(unimodular_inverse(ms[q + 1]) @ c.d[q] @ ms[q])
                 for q in range(c.n_degrees - 1)]
        c2 = BasedComplex(c.dims, d_new)
        assert milnor_torsion(c2).squared_value == sq


def test_laplacian_vs_contraction_exact():
    rng = np.random.default_rng(42)
    for _ in range(20):
        c = rand_acyclic_complex(rng)
        assert torsion_via_laplacian(c) == milnor_torsion(c).squared_value


def test_laplacian_vs_contraction_float():
    rng = np.random.default_rng(43)
    for _ in range(10):
        c_exact = rand_acyclic_complex(rng, max_dim=2, u_spread=1, m_spread=2)
        c = BasedComplex(c_exact.dims,
                         [m.astype(complex) for m in c_exact.d],
                         b=[m.astype(complex) for m in c_exact.b])
        lhs = torsion_via_laplacian(c)
        rhs = milnor_torsion(c).squared_value
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


def test_laplacian_rejects_non_acyclic():
    c = BasedComplex([1, 1], [frac_mat([[0]])],
                     b=[frac_mat([[1]]), frac_mat([[1]])])
    with pytest.raises(NotAcyclicError):
        torsion_via_laplacian(c)


def test_relative_torsion_of_scaling():
    """The cone of multiplication by a is the two-term complex (a)."""
    s = BasedComplex([1], [])
    f = ChainMap(s, s, [frac_mat([[7]])])
    tv = relative_torsion(f)
    assert tv.representative == Fraction(1, 7)
    assert tv.convention_id == "cone"


def test_relative_torsion_requires_quasi_iso():
    s = BasedComplex([1], [])
    f = ChainMap(s, s, [frac_mat([[0]])])
    with pytest.raises(NotAcyclicError):
        relative_torsion(f)


def one_by_one_series_complex(series):
    return NovikovComplex([1, 1], [[[series]]], 1, OMEGA, series.K)


def test_novikov_torsion_geometric_series():
    """cone convention: torsion of (1 - 2t) is its geometric inverse."""
    K = Fraction(6)
    one = NovikovSeries.unit(1, OMEGA, K)
    t = NovikovSeries.monomial(1, OMEGA, K, (1,), 2)
    c = one_by_one_series_complex(one - t)
    tau = novikov_torsion(c)
    assert tau == NovikovSeries(1, OMEGA, K, 1,
                                {(k,): 2 ** k for k in range(7)})


def test_novikov_torsion_unit_pivot_required():
    K = Fraction(4)
    t = NovikovSeries.monomial(1, OMEGA, K, (1,))
    c = one_by_one_series_complex(t)  # leading coefficient zero
    with pytest.raises(NotAcyclicError):
        novikov_torsion(c)


def test_novikov_torsion_matches_scalar_cone():
    """Series torsion of a constant complex equals the scalar torsion."""
    rng = np.random.default_rng(44)
    K = Fraction(3)
    for _ in range(5):
        c = rand_acyclic_complex(rng, with_b=False, max_dim=2)
        d_series = []
        for q in range(c.n_degrees - 1):
            block = [[NovikovSeries(1, OMEGA, K, 1, {(0,): c.d[q][i, j]})
                      for j in range(c.dims[q])]
                     for i in range(c.dims[q + 1])]
            d_series.append(block)
        nc = NovikovComplex(c.dims, d_series, 1, OMEGA, K)
        tau = novikov_torsion(nc, convention="two-term-det")
        scalar = milnor_torsion(c).representative
        assert tau.leading() == scalar
        assert len(tau.terms) == 1
