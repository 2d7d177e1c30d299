"""Weight classes, potentials, multipliers and gauge shifts."""

import cmath
from fractions import Fraction

import numpy as np
import pytest

from conftest import rand_exact_weight
from novtor import WeightSystem, ray_weight
from novtor.exact import QC
from novtor.weights import (Lattice, RankMismatchError, UnknownZeroError,
                            weight_from_json)


def test_lattice_checks_rank():
    lat = Lattice(2)
    assert lat.check([1, -2]) == (1, -2)
    with pytest.raises(RankMismatchError):
        lat.check([1])


def test_linear_evaluation():
    w = WeightSystem((Fraction(1, 2), Fraction(-1)))
    assert w.eval((2, 1)) == Fraction(0)
    assert w.eval((0, 0)) == 0
    with pytest.raises(RankMismatchError):
        w.eval((1,))


def test_path_value_includes_potential_drop():
    w = WeightSystem((Fraction(1),), potentials={"x": Fraction(2), "y": Fraction(5)})
    # class term 3 plus h(y) - h(x) = 3
    assert w.path_value("x", "y", (3,)) == 6
    with pytest.raises(UnknownZeroError):
        w.path_value("x", "z", (0,))


def test_exp_class_exact_multipliers():
    w = WeightSystem((Fraction(0),), multipliers=(QC(Fraction(1, 2)),))
    assert w.is_multiplicative_exact
    assert w.exp_class((3,)) == QC(Fraction(1, 8))
    assert w.exp_class((-2,)) == QC(4)
    assert w.exp_class((0,)) == 1


def test_exp_class_float_fallback():
    w = WeightSystem((Fraction(1, 2),))
    assert abs(w.exp_class((2,)) - cmath.exp(1.0)) < 1e-12


def test_exp_path_combines_class_and_potentials():
    w = WeightSystem((Fraction(0),), potentials={"x": 0, "y": 0},
                     multipliers=(QC(3),),
                     potential_multipliers={"x": QC(2), "y": QC(Fraction(1, 2))})
    # e^{class(1)} * e^{h(y)} / e^{h(x)} = 3 * (1/2) / 2
    assert w.exp_path("x", "y", (1,)) == QC(Fraction(3, 4))


def test_gauge_shift_updates_potentials_and_multipliers():
    w = WeightSystem((Fraction(0),), potentials={"x": 1, "y": 2},
                     potential_multipliers={"x": QC(2), "y": QC(3)})
    w2 = w.shifted_by({"x": 1, "y": -1}, {"x": QC(5), "y": QC(Fraction(1, 7))})
    assert w2.potentials == {"x": 2, "y": 1}
    assert w2.potential_multipliers["x"] == QC(10)
    assert w2.potential_multipliers["y"] == QC(Fraction(3, 7))


def test_ray_weight_shifts_class():
    base = WeightSystem((Fraction(1), Fraction(0)))
    w = ray_weight(base, (1, 1), 2)
    assert w.class_part == (3, 2)
    w0 = ray_weight(base, (1, 1), 0)
    assert w0.class_part == (1, 0)
    with pytest.raises(RankMismatchError):
        ray_weight(base, (1,), 1)


def test_ray_weight_drops_multipliers_to_float():
    base = WeightSystem((Fraction(0),), multipliers=(QC(2),))
    w = ray_weight(base, (1,), -1.0)
    assert not w.is_multiplicative_exact
    assert abs(w.exp_class((1,)) - 2 * cmath.exp(-1.0)) < 1e-12


def test_random_exact_weights_are_monomial_exact():
    rng = np.random.default_rng(11)
    for _ in range(20):
        w = rand_exact_weight(rng, 2, zero_ids=("x", "y"))
        v = w.exp_path("x", "y", (1, -1))
        assert isinstance(v, QC)
        w_inv = w.exp_path("y", "x", (-1, 1))
        assert v * w_inv == 1


def test_weight_from_json():
    w = weight_from_json({
        "rank": 1,
        "class": [[[1, 2], 0]],
        "potentials": {"x": [1, 0]},
        "exp_class": [[[1, 3], 0]],
        "exp_potentials": {"x": [2, 0]},
    })
    assert w.class_part == (QC(Fraction(1, 2)),)
    assert w.exp_class((1,)) == QC(Fraction(1, 3))
    assert w.exp_potential("x") == QC(2)
    with pytest.raises(ValueError):
        weight_from_json({"rank": 2, "class": [[0, 0]]})
