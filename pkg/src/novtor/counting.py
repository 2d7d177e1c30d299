"""Counting data for instantons and closed orbits, and their transforms.

Counts are supplied as input data (bundled models or JSON files); homotopy
classes are keyed by lattice elements under a fixed choice of lifts, so
every transform here is a finite weighted sum over stored support.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from .exact import parse_rational, to_complex
from .series import (NovikovSeries, Verdict, _tail_fit, _coeff_abs,
                     ShapeMismatchError)
from .weights import UnknownZeroError, WeightSystem


@dataclass(frozen=True)
class Zero:
    id: str
    index: int


class InstantonCounts:
    """Signed instanton counts per lattice element, per zero pair.

    Only pairs with Morse-index difference one may carry data; everything
    else counts as zero.
    """

    def __init__(self, rank: int, zeros: List[Zero], omega=None):
        self.rank = int(rank)
        self.zeros = list(zeros)
        self.by_id = {z.id: z for z in self.zeros}
        if len(self.by_id) != len(self.zeros):
            raise ValueError("duplicate zero ids")
        self.omega = tuple(omega) if omega is not None else (Fraction(-1),) * rank
        self.pairs: Dict[Tuple[str, str], Dict[tuple, int]] = {}

    def add_count(self, from_id: str, to_id: str, gamma, count: int):
        x = self._zero(from_id)
        y = self._zero(to_id)
        if x.index - y.index != 1:
            raise ValueError(
                f"pair ({from_id}, {to_id}) has index difference "
                f"{x.index - y.index}, counts require difference one")
        g = tuple(int(v) for v in gamma)
        if len(g) != self.rank:
            raise ValueError("gamma rank mismatch")
        table = self.pairs.setdefault((from_id, to_id), {})
        new = table.get(g, 0) + int(count)
        if new:
            table[g] = new
        else:
            table.pop(g, None)

    def _zero(self, zid: str) -> Zero:
        if zid not in self.by_id:
            raise UnknownZeroError(f"unknown zero {zid!r}")
        return self.by_id[zid]

    def counts(self, from_id: str, to_id: str) -> Dict[tuple, int]:
        self._zero(from_id)
        self._zero(to_id)
        return self.pairs.get((from_id, to_id), {})

    def zeros_of_index(self, q: int) -> List[Zero]:
        return [z for z in self.zeros if z.index == q]

    def max_index(self) -> int:
        return max((z.index for z in self.zeros), default=0)


class OrbitCounts:
    """Rational closed-orbit counts per lattice element."""

    def __init__(self, rank: int, values: Optional[Dict[tuple, Fraction]] = None,
                 omega=None):
        self.rank = int(rank)
        self.omega = tuple(omega) if omega is not None else (Fraction(-1),) * rank
        self.values: Dict[tuple, Fraction] = {}
        for g, v in (values or {}).items():
            gt = tuple(int(x) for x in g)
            if len(gt) != self.rank:
                raise ValueError("gamma rank mismatch")
            if v:
                self.values[gt] = v

    def to_series(self, K) -> NovikovSeries:
        terms = {g: v for g, v in self.values.items()
                 if -sum(o * x for o, x in zip(self.omega, g)) <= K}
        return NovikovSeries(self.rank, self.omega, K, 1, terms)


def laplace_instanton(counts: InstantonCounts, w: WeightSystem,
                      from_id: str, to_id: str):
    """Laplace transform of an instanton counting function at a weight.

    Returns ``(value, verdict)``; the value is exact when the weight
    carries exact multipliers.
    """
    x = counts._zero(from_id)
    y = counts._zero(to_id)
    if x.index - y.index != 1:
        raise ValueError("not an index-difference-one pair")
    table = counts.counts(from_id, to_id)
    value = 0
    by_level = {}
    for g, c in table.items():
        f = w.exp_path(from_id, to_id, g)
        value = value + c * f
        lv = -sum(o * v for o, v in zip(counts.omega, g))
        by_level[lv] = by_level.get(lv, 0.0) + abs(c) * abs(to_complex(f))
    levels = sorted(by_level)
    ratio = _tail_fit(levels, [by_level[l] for l in levels])
    if ratio is None:
        verdict = Verdict(True, None, 0.0 if len(levels) <= 3 else None)
    elif ratio < 1.0:
        tail = by_level[levels[-1]] * ratio / (1.0 - ratio)
        verdict = Verdict(True, ratio, tail)
    else:
        verdict = Verdict(False, ratio, None)
    return value, verdict


def laplace_orbits(orbits: OrbitCounts, w: WeightSystem):
    """Laplace transform of the orbit counting function at a weight.

    Potentials never enter: closed orbits are loops, so the transform is
    gauge invariant by construction.
    """
    if w.rank != orbits.rank:
        raise ShapeMismatchError("weight rank mismatch")
    value = 0
    by_level = {}
    for g, c in orbits.values.items():
        f = w.exp_class(g)
        value = value + c * f
        lv = -sum(o * v for o, v in zip(orbits.omega, g))
        by_level[lv] = by_level.get(lv, 0.0) + abs(to_complex(c)) * abs(to_complex(f))
    levels = sorted(by_level)
    ratio = _tail_fit(levels, [by_level[l] for l in levels])
    if ratio is None:
        verdict = Verdict(True, None, 0.0 if len(levels) <= 3 else None)
    elif ratio < 1.0:
        tail = by_level[levels[-1]] * ratio / (1.0 - ratio)
        verdict = Verdict(True, ratio, tail)
    else:
        verdict = Verdict(False, ratio, None)
    return value, verdict


@dataclass
class GaugeCheck:
    """Transform-law verification attached to a gauge shift."""
    instanton_factors: dict
    orbit_invariant: bool


def gauge_transform(w: WeightSystem, h: dict, h_multipliers: Optional[dict] = None,
                    counts: Optional[InstantonCounts] = None,
                    orbits: Optional[OrbitCounts] = None):
    """Shift the weight potentials by a gauge function.

    When counting data is supplied the transform laws are checked on it:
    instanton transforms scale by ``e^{h(y)-h(x)}`` and orbit transforms
    are unchanged.  Returns ``(new_weight, check)`` where ``check`` is
    None without data.
    """
    new_w = w.shifted_by(h, h_multipliers)
    if counts is None and orbits is None:
        return new_w, None
    factors = {}
    if counts is not None:
        for (xid, yid) in counts.pairs:
            old, _ = laplace_instanton(counts, w, xid, yid)
            new, _ = laplace_instanton(counts, new_w, xid, yid)
            if h_multipliers is not None:
                factor = h_multipliers[yid] / h_multipliers[xid]
            else:
                import cmath
                factor = cmath.exp(to_complex(h[yid]) - to_complex(h[xid]))
            factors[(xid, yid)] = (new, old * factor)
    orbit_ok = True
    if orbits is not None:
        old, _ = laplace_orbits(orbits, w)
        new, _ = laplace_orbits(orbits, new_w)
        orbit_ok = _close(old, new)
    check = GaugeCheck(factors, orbit_ok)
    return new_w, check


def _close(a, b, tol=1e-9):
    from .exact import is_exact
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(to_complex(a) - to_complex(b)) <= tol * max(1.0, abs(to_complex(a)))


def to_novikov(counts: InstantonCounts, w: WeightSystem, K,
               zero_order: Optional[List[str]] = None) -> NovikovSeries:
    """Package instanton counts as a matrix-valued series.

    Entry ``(x, y)`` of the coefficient at ``gamma`` is the count times the
    exponential of the potential difference; the class part stays symbolic
    in the series and only enters on evaluation.
    """
    order = zero_order or [z.id for z in counts.zeros]
    pos = {zid: i for i, zid in enumerate(order)}
    n = len(order)
    terms: Dict[tuple, np.ndarray] = {}
    for (xid, yid), table in counts.pairs.items():
        if xid not in pos or yid not in pos:
            raise UnknownZeroError(f"pair ({xid}, {yid}) outside zero ordering")
        pot = w.exp_potential(yid) / w.exp_potential(xid) \
            if (w.potential_multipliers or w.potentials) else 1
        for g, c in table.items():
            lv = -sum(o * v for o, v in zip(counts.omega, g))
            if lv > K:
                continue
            coeff = terms.get(g)
            if coeff is None:
                coeff = np.empty((n, n), dtype=object)
                coeff[:] = 0
                terms[g] = coeff
            coeff[pos[xid], pos[yid]] = coeff[pos[xid], pos[yid]] + c * pot
    return NovikovSeries(counts.rank, counts.omega, K, n, terms)


# -- JSON interface ----------------------------------------------------

def counting_from_json(data):
    """Counting file: rank, omega, zeros, instantons, orbits.

    Returns ``(InstantonCounts, OrbitCounts)``.
    """
    if isinstance(data, str):
        data = json.loads(data)
    rank = int(data["rank"])
    omega = tuple(parse_rational(v) for v in data.get("omega", [-1] * rank))
    zeros = [Zero(z["id"], int(z["index"])) for z in data.get("zeros", [])]
    inst = InstantonCounts(rank, zeros, omega)
    for rec in data.get("instantons", []):
        inst.add_count(rec["from"], rec["to"], rec["gamma"], rec["count"])
    orb_values = {}
    for rec in data.get("orbits", []):
        g = tuple(int(v) for v in rec["gamma"])
        v = parse_rational(rec["value"])
        orb_values[g] = orb_values.get(g, 0) + v
    orbits = OrbitCounts(rank, orb_values, omega)
    return inst, orbits


def load_counting(path):
    with open(path) as fh:
        return counting_from_json(json.load(fh))
