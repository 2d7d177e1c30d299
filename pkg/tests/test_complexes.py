"""Complex construction, square-zero checks, cones, spectral splits."""

from fractions import Fraction

import numpy as np
import pytest

from conftest import frac_mat, rand_acyclic_complex, rand_exact_weight
from novtor import (BasedComplex, ChainMap, WeightSystem, b_laplacian,
                    build_morse_differential, build_novikov_complex,
                    check_d_squared, cohomology, mapping_cone, spectral_split,
                    transpose_wrt_b)
from novtor.complexes import (DifferentialError, GuardBandError,
                              complex_from_json)
from novtor.exact import QC


def test_morse_differential_circle(circle_model):
    counts, _ = circle_model
    w = WeightSystem((Fraction(0),), multipliers=(QC(Fraction(1, 2)),))
    c = build_morse_differential(counts, w)
    assert c.dims == [1, 1]
    assert c.d[0][0, 0] == QC(Fraction(1, 2))  # 1 - 1/2
    assert check_d_squared(c).ok


def test_morse_d_squared_models(sphere_model, torus_model):
    rng = np.random.default_rng(31)
    for counts, _ in (sphere_model, torus_model):
        for _ in range(5):
            w = rand_exact_weight(rng, counts.rank)
            c = build_morse_differential(counts, w)
            report = check_d_squared(c)
            assert report.exact and report.ok


def test_corrupted_model_flagged(corrupted_model):
    counts, _ = corrupted_model
    w = WeightSystem((Fraction(0),), multipliers=(QC(Fraction(1, 2)),))
    c = build_morse_differential(counts, w)
    report = check_d_squared(c)
    assert not report.ok
    assert report.residuals[0] != 0


def test_cohomology_betti():
    # 0 -> Q -0-> Q -> 0 has two survivors; an iso has none
    c = BasedComplex([1, 1], [frac_mat([[0]])])
    assert cohomology(c) == [1, 1]
    iso = BasedComplex([1, 1], [frac_mat([[3]])])
    assert cohomology(iso) == [0, 0]


def test_chain_map_validation():
    c = BasedComplex([1, 1], [frac_mat([[2]])])
    good = ChainMap(c, c, [frac_mat([[1]]), frac_mat([[1]])])
    assert good.blocks[0][0, 0] == 1
    with pytest.raises(DifferentialError):
        ChainMap(c, c, [frac_mat([[1]]), frac_mat([[2]])])


def test_transpose_wrt_b_two_term():
    """dt = b0^-1 d^T b1 on a two-term complex with diagonal forms."""
    d = frac_mat([[5]])
    b = [frac_mat([[2]]), frac_mat([[3]])]
    c = BasedComplex([1, 1], [d], b=b)
    dt = transpose_wrt_b(c)
    assert dt[0][0, 0] == Fraction(15, 2)
    B = b_laplacian(c)
    assert B[0][0, 0] == Fraction(75, 2)
    assert B[1][0, 0] == Fraction(75, 2)


def test_laplacian_invertible_on_acyclic():
    rng = np.random.default_rng(32)
    for _ in range(5):
        c = rand_acyclic_complex(rng)
        for q, Bq in enumerate(b_laplacian(c)):
            det = np.linalg.det(Bq.astype(float)) if Bq.size else 1.0
            assert abs(det) > 1e-9, f"degree {q} Laplacian singular"


def test_mapping_cone_of_identity_is_acyclic():
    rng = np.random.default_rng(33)
    c = rand_acyclic_complex(rng, with_b=False)
    cone = mapping_cone(ChainMap.identity(c))
    assert check_d_squared(cone).ok
    assert all(b == 0 for b in cohomology(cone))


def test_mapping_cone_blocks():
    s = BasedComplex([1], [])
    t = BasedComplex([1], [])
    f = ChainMap(s, t, [frac_mat([[4]])])
    cone = mapping_cone(f)
    assert cone.dims == [1, 1]
    assert cone.d[0][0, 0] == 4
    assert cone.basis[0] == ["s:c0_0"] and cone.basis[1] == ["t:c0_0"]


def test_novikov_complex_d_squared(torus_model):
    counts, _ = torus_model
    w = WeightSystem((Fraction(0), Fraction(0)))
    nc = build_novikov_complex(counts, w, Fraction(6))
    assert nc.check_d_squared().ok


def test_novikov_complex_evaluate_matches_morse(sphere_model):
    counts, _ = sphere_model
    rng = np.random.default_rng(34)
    w = rand_exact_weight(rng, 1)
    nc = build_novikov_complex(counts, w, Fraction(10))
    evaluated = nc.evaluate(w)
    direct = build_morse_differential(counts, w)
    for q in range(direct.n_degrees - 1):
        assert (evaluated.d[q] == direct.d[q]).all()


def test_spectral_split_separates_zero_modes():
    """A block complex with a kernel part: the split isolates it."""
    d = np.array([[0.0, 0.0], [0.0, 2.0]])
    b = [np.eye(2), np.eye(2)]
    c = BasedComplex([2, 2], [d], b=b)
    split = spectral_split(c, radius=1.0)
    assert split.inside.dims == [1, 1]
    assert split.outside.dims == [1, 1]
    assert split.max_invariance_residual < 1e-9
    assert split.max_cross_pairing < 1e-9
    assert all(v == 0 for v in cohomology(split.outside))


def test_spectral_split_guard_band():
    d = np.array([[1.0]])
    c = BasedComplex([1, 1], [d], b=[np.eye(1), np.eye(1)])
    with pytest.raises(GuardBandError):
        spectral_split(c, radius=1.0)


def test_complex_from_json():
    c = complex_from_json({
        "dims": [1, 1],
        "d": [[[[2, 0]]]],
        "b": [[[1]], [[1]]],
    })
    assert c.d[0][0, 0] == QC(2)
    assert c.b[0][0, 0] == QC(1)
