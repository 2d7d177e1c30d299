"""Lattice weight classes, gauge potentials and ray restrictions.

A weight is the finite data the algebra needs: a linear functional on the
lattice ``Z^rank`` (additive part) together with per-zero potentials.  For
exact identity checks a weight may additionally carry *multipliers*: the
exponentials of the class entries and potentials as exact Gaussian
rationals.  When multipliers are present every ``exp``-type evaluation is
an exact Laurent-monomial computation; otherwise it falls back to float
``cmath.exp`` of the additive data.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .exact import QC, is_exact, parse_cnum, parse_rational, to_complex


class RankMismatchError(ValueError):
    pass


class UnknownZeroError(KeyError):
    pass


@dataclass(frozen=True)
class Lattice:
    """Free abelian lattice Z^rank; elements are integer tuples."""

    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be non-negative")

    def check(self, gamma: Sequence[int]) -> tuple:
        g = tuple(int(v) for v in gamma)
        if len(g) != self.rank:
            raise RankMismatchError(
                f"lattice element of length {len(g)}, expected rank {self.rank}")
        return g


class WeightSystem:
    """Complexified weight class plus gauge potentials at zeros.

    Parameters
    ----------
    class_part:
        additive values of the class on the lattice generators.
    potentials:
        additive gauge values at zero identifiers (default zero).
    ray_direction:
        optional real vector, kept for ray restrictions.
    multipliers / potential_multipliers:
        optional exact exponentials ``e^{class_i}`` resp. ``e^{h(x)}``.
        When present, :meth:`exp_class` and :meth:`exp_path` are exact.
    """

    def __init__(self, class_part: Sequence, potentials: Optional[Mapping] = None,
                 ray_direction: Optional[Sequence] = None,
                 multipliers: Optional[Sequence] = None,
                 potential_multipliers: Optional[Mapping] = None):
        self.class_part = tuple(class_part)
        self.rank = len(self.class_part)
        self.potentials = dict(potentials or {})
        self.ray_direction = tuple(ray_direction) if ray_direction is not None else None
        if self.ray_direction is not None and len(self.ray_direction) != self.rank:
            raise RankMismatchError("ray direction rank mismatch")
        if multipliers is not None and len(multipliers) != self.rank:
            raise RankMismatchError("multiplier vector rank mismatch")
        # ints are promoted so that negative powers stay exact
        self.multipliers = tuple(
            Fraction(u) if isinstance(u, int) else u
            for u in multipliers) if multipliers is not None else None
        self.potential_multipliers = (dict(potential_multipliers)
                                      if potential_multipliers is not None else None)

    # -- additive evaluation ------------------------------------------

    def _check_gamma(self, gamma) -> tuple:
        g = tuple(int(v) for v in gamma)
        if len(g) != self.rank:
            raise RankMismatchError(
                f"element of length {len(g)} against weight of rank {self.rank}")
        return g

    def eval(self, gamma):
        """Linear pairing of the class part with a lattice element."""
        g = self._check_gamma(gamma)
        total = 0
        for c, k in zip(self.class_part, g):
            if k:
                total = total + c * k
        return total

    def potential(self, zero_id):
        return self.potentials.get(zero_id, 0)

    def path_value(self, from_zero, to_zero, gamma):
        """Exponent of the instanton factor: class term plus potential drop.

        Potentials default to zero, but once any potential is declared the
        zero set is considered registered and unknown ids are rejected.
        """
        if self.potentials:
            for z in (from_zero, to_zero):
                if z not in self.potentials:
                    raise UnknownZeroError(f"zero {z!r} not registered in weight")
        return self.eval(gamma) + self.potential(to_zero) - self.potential(from_zero)

    # -- exponential (multiplicative) evaluation ----------------------

    @property
    def is_multiplicative_exact(self) -> bool:
        return self.multipliers is not None and \
            all(is_exact(u) for u in self.multipliers)

    def exp_class(self, gamma):
        """``e`` to the class pairing; exact when multipliers are attached."""
        g = self._check_gamma(gamma)
        if self.multipliers is not None:
            out = 1
            for u, k in zip(self.multipliers, g):
                if k:
                    out = out * u ** k
            return out
        return cmath.exp(to_complex(self.eval(g)))

    def exp_potential(self, zero_id):
        if self.potential_multipliers is not None:
            if zero_id in self.potential_multipliers:
                return self.potential_multipliers[zero_id]
            if self.potentials and zero_id not in self.potentials:
                raise UnknownZeroError(f"zero {zero_id!r} has no potential multiplier")
            return 1
        if self.potentials and zero_id not in self.potentials:
            raise UnknownZeroError(f"zero {zero_id!r} not registered in weight")
        val = self.potential(zero_id)
        if is_exact(val) and val == 0:
            return 1
        return cmath.exp(to_complex(val))

    def exp_path(self, from_zero, to_zero, gamma):
        """The factor ``e^{class(gamma)} * e^{h(to)} / e^{h(from)}``."""
        num = self.exp_class(gamma) * self.exp_potential(to_zero)
        den = self.exp_potential(from_zero)
        if isinstance(den, int):  # keep int/int division on the exact path
            den = Fraction(den)
        return num / den

    # -- derived weights ----------------------------------------------

    def with_potentials(self, potentials, potential_multipliers=None):
        return WeightSystem(self.class_part, potentials, self.ray_direction,
                            self.multipliers, potential_multipliers)

    def shifted_by(self, h: Mapping, h_multipliers: Optional[Mapping] = None):
        """Gauge shift: add ``h`` to the potentials (class part unchanged)."""
        new_pot = dict(self.potentials)
        for z in new_pot:
            if z not in h:
                raise UnknownZeroError(f"gauge function missing zero {z!r}")
        for z, v in h.items():
            new_pot[z] = new_pot.get(z, 0) + v
        new_mult = None
        if self.potential_multipliers is not None:
            if h_multipliers is None:
                new_mult = {z: self.potential_multipliers[z] *
                            cmath.exp(to_complex(h.get(z, 0)))
                            for z in self.potential_multipliers}
            else:
                new_mult = {z: self.potential_multipliers[z] * h_multipliers[z]
                            for z in self.potential_multipliers}
        elif h_multipliers is not None:
            new_mult = dict(h_multipliers)
        return WeightSystem(self.class_part, new_pot, self.ray_direction,
                            self.multipliers, new_mult)


@dataclass(frozen=True)
class RayPoint:
    """Point ``base + z * direction`` on an affine weight line."""

    base: WeightSystem
    direction: tuple
    parameter: complex

    def weight(self) -> WeightSystem:
        return ray_weight(self.base, self.direction, self.parameter)


def weight_eval(w: WeightSystem, gamma):
    """Pairing of the weight class with a lattice element (potentials ignored)."""
    return w.eval(gamma)


def path_weight(w: WeightSystem, from_zero, to_zero, gamma):
    """Exponent for a path class: linear term plus potential difference."""
    return w.path_value(from_zero, to_zero, gamma)


def ray_weight(eta: WeightSystem, omega: Sequence, z) -> WeightSystem:
    """Weight on the affine line: class shifted by ``z * omega``."""
    omega = tuple(omega)
    if len(omega) != eta.rank:
        raise RankMismatchError("omega rank mismatch")
    new_class = tuple(c + z * o for c, o in zip(eta.class_part, omega))
    multipliers = None
    if eta.multipliers is not None:
        # exp(c + z*o) = exp(c) * exp(z*o); transcendental, so drop to floats
        multipliers = tuple(to_complex(u) * cmath.exp(to_complex(z * o))
                            for u, o in zip(eta.multipliers, omega))
    return WeightSystem(new_class, eta.potentials, eta.ray_direction,
                        multipliers, eta.potential_multipliers)


# -- JSON interface ---------------------------------------------------

def weight_from_json(data) -> WeightSystem:
    """Weight descriptor: rank, class, potentials, ray (see README)."""
    if isinstance(data, str):
        data = json.loads(data)
    rank = int(data["rank"])
    cls = [parse_cnum(v) for v in data.get("class", [[0, 0]] * rank)]
    if len(cls) != rank:
        raise ValueError("class length does not match rank")
    pots = {k: parse_cnum(v) for k, v in data.get("potentials", {}).items()}
    ray = [parse_rational(v) for v in data["ray"]] if "ray" in data else None
    mult = None
    if "exp_class" in data:
        mult = [parse_cnum(v) for v in data["exp_class"]]
    pot_mult = None
    if "exp_potentials" in data:
        pot_mult = {k: parse_cnum(v) for k, v in data["exp_potentials"].items()}
    return WeightSystem(cls, pots, ray, mult, pot_mult)


def load_weight(path) -> WeightSystem:
    with open(path) as fh:
        return weight_from_json(json.load(fh))
