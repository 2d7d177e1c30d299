"""Combinatorial Euler chains on a one-skeleton.

Vertices carry the zeros of the gradient data, directed edges carry
lattice labels (the class of the edge after loop closure under the chosen
lifts).  The module provides the index-weighted zero chain, boundary
checks for comparison one-chains, and evaluation of a weight along a
one-chain — all exact integer/rational linear algebra.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .weights import WeightSystem


class UnknownEdgeError(KeyError):
    pass


@dataclass(frozen=True)
class Edge:
    tail: str
    head: str
    gamma: Tuple[int, ...]


class SkeletonGraph:
    """Directed graph with lattice-labeled edges and its boundary operator."""

    def __init__(self, vertices: List[str], edges: List[Edge]):
        self.vertices = list(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        vset = set(self.vertices)
        for e in edges:
            if e.tail not in vset or e.head not in vset:
                raise ValueError(f"edge {e} has endpoint outside vertex set")
        self.edges = list(edges)

    def boundary(self, c: "OneChain") -> "ZeroChain":
        """Apply the boundary matrix: each edge maps to head minus tail."""
        coeffs: Dict[str, int] = {}
        for idx, k in c.coeffs.items():
            e = self._edge(idx)
            coeffs[e.head] = coeffs.get(e.head, 0) + k
            coeffs[e.tail] = coeffs.get(e.tail, 0) - k
        return ZeroChain({v: k for v, k in coeffs.items() if k})

    def _edge(self, idx: int) -> Edge:
        if not 0 <= idx < len(self.edges):
            raise UnknownEdgeError(f"no edge with index {idx}")
        return self.edges[idx]


@dataclass
class ZeroChain:
    """Integer coefficients on vertices, finitely supported."""

    coeffs: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = {v: int(k) for v, k in self.coeffs.items() if k}

    def __add__(self, other: "ZeroChain") -> "ZeroChain":
        out = dict(self.coeffs)
        for v, k in other.coeffs.items():
            out[v] = out.get(v, 0) + k
        return ZeroChain(out)

    def __neg__(self) -> "ZeroChain":
        return ZeroChain({v: -k for v, k in self.coeffs.items()})

    def __sub__(self, other: "ZeroChain") -> "ZeroChain":
        return self + (-other)

    def __eq__(self, other) -> bool:
        return isinstance(other, ZeroChain) and self.coeffs == other.coeffs


@dataclass
class OneChain:
    """Integer coefficients on edge indices of a skeleton."""

    coeffs: Dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = {int(i): int(k) for i, k in self.coeffs.items() if k}

    def __add__(self, other: "OneChain") -> "OneChain":
        out = dict(self.coeffs)
        for i, k in other.coeffs.items():
            out[i] = out.get(i, 0) + k
        return OneChain(out)

    def __neg__(self) -> "OneChain":
        return OneChain({i: -k for i, k in self.coeffs.items()})

    def __sub__(self, other: "OneChain") -> "OneChain":
        return self + (-other)

    def __eq__(self, other) -> bool:
        return isinstance(other, OneChain) and self.coeffs == other.coeffs


def hopf_index(morse_index: int, ambient_dim: int) -> int:
    """Index of a nondegenerate zero of a gradient field: (-1)^(n - q)."""
    return (-1) ** ((ambient_dim - morse_index) % 2)


def euler_chain(indices: Dict[str, int]) -> ZeroChain:
    """Index-weighted zero chain over the supplied zeros.

    ``indices`` maps zero ids to their (already signed) vector-field
    indices; for Morse data use :func:`hopf_index` per zero first.
    """
    return ZeroChain(dict(indices))


def euler_chain_from_morse(zeros, ambient_dim: int) -> ZeroChain:
    """Euler chain of Morse data: each zero weighted by (-1)^(n - index)."""
    return ZeroChain({z.id: hopf_index(z.index, ambient_dim) for z in zeros})


@dataclass
class BoundaryVerdict:
    ok: bool
    defect: ZeroChain

    def __bool__(self):
        return self.ok


def cs_boundary_check(g: SkeletonGraph, c: OneChain,
                      ec1: ZeroChain, ec2: ZeroChain) -> BoundaryVerdict:
    """Verify that the one-chain interpolates the two Euler chains.

    Passes exactly when the boundary of ``c`` equals ``ec2 - ec1``; the
    defect chain is returned either way, so a failure is inspectable.
    """
    defect = g.boundary(c) - (ec2 - ec1)
    return BoundaryVerdict(ok=not defect.coeffs, defect=defect)


def eval_weight_on_chain(w: WeightSystem, g: SkeletonGraph, c: OneChain):
    """Pair a weight with a one-chain.

    Each edge contributes its lattice-class evaluation plus the potential
    difference from tail to head, scaled by the coefficient.  Exact when
    the weight is exact.
    """
    total = 0
    for idx, k in c.coeffs.items():
        e = g._edge(idx)
        if e.gamma is None:
            raise UnknownEdgeError(f"edge {idx} carries no lattice label")
        contrib = w.eval(e.gamma) + w.potential(e.head) - w.potential(e.tail)
        total = total + k * contrib
    return total


# -- JSON interface ----------------------------------------------------


def skeleton_from_json(data):
    """Skeleton file: vertices, labeled edges, optional named chains.

    Returns ``(SkeletonGraph, chains)`` where ``chains`` maps names to
    ZeroChain/OneChain objects (zero chains keyed by vertex id, one
    chains by edge index).
    """
    if isinstance(data, str):
        data = json.loads(data)
    vertices = [str(v) for v in data["vertices"]]
    edges = [Edge(str(e["from"]), str(e["to"]),
                  tuple(int(x) for x in e.get("gamma", [])))
             for e in data.get("edges", [])]
    g = SkeletonGraph(vertices, edges)
    chains = {}
    for name, spec in data.get("chains", {}).items():
        if spec.get("degree", 1) == 0:
            chains[name] = ZeroChain({str(k): int(v)
                                      for k, v in spec["coeffs"].items()})
        else:
            chains[name] = OneChain({int(k): int(v)
                                     for k, v in spec["coeffs"].items()})
    return g, chains


def load_skeleton(path):
    with open(path) as fh:
        return skeleton_from_json(json.load(fh))
