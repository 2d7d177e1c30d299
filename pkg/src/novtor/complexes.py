"""Finite based cochain complexes and their operators.

Covers the Morse complex built from counting data, validation of the
square-zero property, Betti numbers, the bilinear-form transpose and its
Laplacian, generalized-eigenspace splitting, mapping cones, and truncated
Novikov complexes.  The bilinear form is never conjugated: the torsion
theory needs the plain transpose.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.linalg

from ._linalg import (FLOAT_RANK_TOL, exact_matrix, identity_matrix,
                      matrix_inverse, matrix_is_exact, matrix_rank, max_abs,
                      to_float_matrix, zeros_like_field)
from .counting import InstantonCounts, laplace_instanton
from .exact import is_exact, parse_cnum, to_complex
from .series import NovikovSeries, ShapeMismatchError, convolve
from .weights import WeightSystem


class DifferentialError(ValueError):
    """d squared fails to vanish (or a chain map fails to commute)."""


class DivergentEntryError(ValueError):
    """A differential entry carries a non-converged verdict."""


class GuardBandError(ValueError):
    """An eigenvalue sits too close to the splitting circle."""


class BasedComplex:
    """Graded complex with distinguished bases and optional bilinear form.

    ``dims[q]`` is the dimension in degree q, ``d[q]`` the matrix of the
    differential from degree q to q+1 (shape ``dims[q+1] x dims[q]``),
    ``basis[q]`` the labels, ``b[q]`` an optional symmetric nondegenerate
    Gram matrix.
    """

    def __init__(self, dims: List[int], d: List[np.ndarray],
                 basis: Optional[List[List[str]]] = None,
                 b: Optional[List[np.ndarray]] = None):
        self.dims = [int(x) for x in dims]
        if len(d) != max(len(self.dims) - 1, 0):
            raise ValueError("need one differential per adjacent degree pair")
        self.d = list(d)
        for q, m in enumerate(self.d):
            if m.shape != (self.dims[q + 1], self.dims[q]):
                raise ValueError(
                    f"d[{q}] has shape {m.shape}, expected "
                    f"({self.dims[q + 1]}, {self.dims[q]})")
        if basis is None:
            basis = [[f"c{q}_{i}" for i in range(n)] for q, n in enumerate(self.dims)]
        self.basis = basis
        self.b = list(b) if b is not None else None
        if self.b is not None:
            if len(self.b) != len(self.dims):
                raise ValueError("need one bilinear form per degree")
            for q, m in enumerate(self.b):
                if m.shape != (self.dims[q], self.dims[q]):
                    raise ValueError(f"b[{q}] shape mismatch")

    @property
    def n_degrees(self) -> int:
        return len(self.dims)

    @property
    def is_exact(self) -> bool:
        for m in self.d:
            if m.size:
                return matrix_is_exact(m)
        return True

    def total_dim(self) -> int:
        return sum(self.dims)


@dataclass
class DSquaredReport:
    """Outcome of the square-zero check, degree by degree."""
    exact: bool
    residuals: dict
    max_residual: float

    @property
    def ok(self) -> bool:
        if self.exact:
            return all(r == 0 for r in self.residuals.values())
        return self.max_residual <= 1e-9


class ChainMap:
    """Degreewise matrices commuting with the differentials."""

    def __init__(self, source: BasedComplex, target: BasedComplex,
                 blocks: List[np.ndarray], tol: float = 1e-9, validate=True):
        self.source = source
        self.target = target
        self.blocks = list(blocks)
        if len(self.blocks) != source.n_degrees:
            raise ValueError("need one block per source degree")
        for q, m in enumerate(self.blocks):
            want = (target.dims[q] if q < target.n_degrees else 0, source.dims[q])
            if m.shape != want:
                raise ValueError(f"block {q} has shape {m.shape}, expected {want}")
        if validate:
            self.validate(tol)

    def validate(self, tol: float = 1e-9):
        for q in range(self.source.n_degrees - 1):
            lhs = self.target.d[q] @ self.blocks[q]
            rhs = self.blocks[q + 1] @ self.source.d[q]
            diff = lhs - rhs
            if matrix_is_exact(diff) if diff.size else True:
                if diff.size and any(v != 0 for v in diff.flat):
                    raise DifferentialError(f"chain map fails to commute at degree {q}")
            elif max_abs(diff) > tol:
                raise DifferentialError(f"chain map fails to commute at degree {q}")

    @classmethod
    def identity(cls, c: BasedComplex) -> "ChainMap":
        blocks = [identity_matrix(n, c.is_exact) for n in c.dims]
        return cls(c, c, blocks)


def build_morse_differential(counts: InstantonCounts, w: WeightSystem,
                             override_divergent: bool = False) -> BasedComplex:
    """Morse complex with differential entries given by Laplace transforms."""
    n_top = counts.max_index()
    by_degree = [counts.zeros_of_index(q) for q in range(n_top + 1)]
    dims = [len(zs) for zs in by_degree]
    exact = w.is_multiplicative_exact
    d = []
    for q in range(n_top):
        m = zeros_like_field(dims[q + 1], dims[q], exact)
        for i, x in enumerate(by_degree[q + 1]):
            for j, y in enumerate(by_degree[q]):
                if not counts.counts(x.id, y.id):
                    continue
                val, verdict = laplace_instanton(counts, w, x.id, y.id)
                if not verdict.converged and not override_divergent:
                    raise DivergentEntryError(
                        f"entry ({x.id}, {y.id}) not converged "
                        f"(ratio {verdict.ratio})")
                m[i, j] = val if exact else to_complex(val)
        d.append(m)
    basis = [[z.id for z in zs] for zs in by_degree]
    return BasedComplex(dims, d, basis)


def check_d_squared(c) -> DSquaredReport:
    """Square-zero check; exact verdict over rationals, residuals over floats."""
    if isinstance(c, NovikovComplex):
        return c.check_d_squared()
    residuals = {}
    worst = 0.0
    exact = c.is_exact
    for q in range(c.n_degrees - 2):
        prod = c.d[q + 1] @ c.d[q]
        if prod.size == 0:
            residuals[q] = 0
            continue
        if exact:
            bad = [v for v in prod.flat if v != 0]
            residuals[q] = 0 if not bad else max(abs(to_complex(v)) for v in bad)
        else:
            residuals[q] = max_abs(prod)
        worst = max(worst, float(abs(to_complex(residuals[q])))
                    if not isinstance(residuals[q], float) else residuals[q])
    return DSquaredReport(exact=exact, residuals=residuals, max_residual=worst)


def cohomology(c: BasedComplex, tol: float = FLOAT_RANK_TOL) -> List[int]:
    """Betti numbers per degree (d squared is assumed already verified)."""
    betti = []
    for q in range(c.n_degrees):
        r_out = matrix_rank(c.d[q], tol) if q < c.n_degrees - 1 else 0
        r_in = matrix_rank(c.d[q - 1], tol) if q > 0 else 0
        betti.append(c.dims[q] - r_out - r_in)
    return betti


def transpose_wrt_b(c: BasedComplex) -> List[np.ndarray]:
    """Formal transposes: ``dt[q] = b[q]^-1 d[q]^T b[q+1]``, degree q+1 -> q."""
    if c.b is None:
        raise ValueError("complex carries no bilinear form")
    dt = []
    for q in range(c.n_degrees - 1):
        b_q_inv = matrix_inverse(c.b[q]) if c.dims[q] else c.b[q]
        dt.append(b_q_inv @ c.d[q].T @ c.b[q + 1])
    return dt


def b_laplacian(c: BasedComplex) -> List[np.ndarray]:
    """Per-degree ``B = d dt + dt d`` with respect to the bilinear form."""
    dt = transpose_wrt_b(c)
    out = []
    for q in range(c.n_degrees):
        B = zeros_like_field(c.dims[q], c.dims[q], c.is_exact)
        if q < c.n_degrees - 1:
            B = B + dt[q] @ c.d[q]
        if q > 0:
            B = B + c.d[q - 1] @ dt[q - 1]
        out.append(B)
    return out


@dataclass
class SpectralSplit:
    inside: BasedComplex
    outside: BasedComplex
    inside_bases: list
    outside_bases: list
    max_invariance_residual: float
    max_cross_pairing: float


def spectral_split(c: BasedComplex, radius: float,
                   guard: float = 1e-8) -> SpectralSplit:
    """Split into the generalized eigenspaces of B inside/outside a circle.

    Both factors are closed under d and the b-transpose, carry the
    restricted bilinear form, and pair to zero against each other.
    Raises when an eigenvalue sits within ``guard`` of the circle.
    """
    B = [to_float_matrix(m) for m in b_laplacian(c)]
    d_f = [to_float_matrix(m) for m in c.d]
    b_f = [to_float_matrix(m) for m in c.b]
    v_in, v_out = [], []
    for q, Bq in enumerate(B):
        if Bq.shape[0] == 0:
            v_in.append(np.zeros((0, 0), dtype=complex))
            v_out.append(np.zeros((0, 0), dtype=complex))
            continue
        eigs = np.linalg.eigvals(Bq)
        if np.any(np.abs(np.abs(eigs) - radius) <= guard):
            raise GuardBandError(
                f"eigenvalue within guard band of |lambda| = {radius} "
                f"in degree {q}")
        _, z1, k1 = scipy.linalg.schur(Bq, output="complex",
                                       sort=lambda x: abs(x) < radius)
        _, z2, k2 = scipy.linalg.schur(Bq, output="complex",
                                       sort=lambda x: abs(x) >= radius)
        if k1 + k2 != Bq.shape[0]:
            raise GuardBandError("spectral split dimensions inconsistent")
        v_in.append(z1[:, :k1])
        v_out.append(z2[:, :k2])

    def restrict(bases):
        dims = [v.shape[1] for v in bases]
        resid = 0.0
        d_new = []
        for q in range(c.n_degrees - 1):
            img = d_f[q] @ bases[q]
            coeff, res, *_ = np.linalg.lstsq(bases[q + 1], img, rcond=None)
            approx = bases[q + 1] @ coeff
            if img.size:
                resid = max(resid, float(np.max(np.abs(img - approx))))
            d_new.append(coeff)
        b_new = [bases[q].T @ b_f[q] @ bases[q] for q in range(c.n_degrees)]
        labels = [[f"e{q}_{i}" for i in range(dims[q])] for q in range(c.n_degrees)]
        return BasedComplex(dims, d_new, labels, b_new), resid

    inside, r1 = restrict(v_in)
    outside, r2 = restrict(v_out)
    cross = 0.0
    for q in range(c.n_degrees):
        if v_in[q].size and v_out[q].size:
            pairing = v_in[q].T @ b_f[q] @ v_out[q]
            cross = max(cross, float(np.max(np.abs(pairing))))
    return SpectralSplit(inside, outside, v_in, v_out, max(r1, r2), cross)


def mapping_cone(f: ChainMap) -> BasedComplex:
    """Cone of a chain map: shifted target plus source, standard differential."""
    s, t = f.source, f.target
    n = max(s.n_degrees, t.n_degrees + 1)
    exact = s.is_exact and t.is_exact

    def sdim(q):
        return s.dims[q] if q < s.n_degrees else 0

    def tdim(q):
        return t.dims[q] if 0 <= q < t.n_degrees else 0

    dims = [tdim(q - 1) + sdim(q) for q in range(n)]
    d = []
    for q in range(n - 1):
        m = zeros_like_field(dims[q + 1], dims[q], exact)
        # target block in degree q of cone^{q+1} gets -d_T from T^{q-1}
        if q - 1 < len(t.d) and q >= 1 and tdim(q - 1) and tdim(q):
            m[:tdim(q), :tdim(q - 1)] = -t.d[q - 1]
        if q < len(f.blocks) and tdim(q) and sdim(q):
            m[:tdim(q), tdim(q - 1):] = f.blocks[q]
        if q < len(s.d) and sdim(q + 1) and sdim(q):
            m[tdim(q):, tdim(q - 1):] = s.d[q]
        d.append(m)
    basis = []
    for q in range(n):
        labels = []
        if tdim(q - 1):
            labels += [f"t:{lbl}" for lbl in t.basis[q - 1]]
        if sdim(q):
            labels += [f"s:{lbl}" for lbl in s.basis[q]]
        basis.append(labels)
    cone = BasedComplex(dims, d, basis)
    report = check_d_squared(cone)
    if not report.ok:
        raise DifferentialError("mapping cone differential fails d^2 = 0")
    return cone


class NovikovComplex:
    """Complex over the truncated ring; entries are scalar series."""

    def __init__(self, dims: List[int], d: List[list], rank: int, omega, K,
                 basis: Optional[List[List[str]]] = None):
        self.dims = [int(x) for x in dims]
        self.d = d  # d[q][i][j]: NovikovSeries, degree q -> q+1
        self.rank = rank
        self.omega = tuple(omega)
        self.K = K
        if basis is None:
            basis = [[f"c{q}_{i}" for i in range(n)] for q, n in enumerate(self.dims)]
        self.basis = basis

    @property
    def n_degrees(self):
        return len(self.dims)

    def zero_series(self) -> NovikovSeries:
        return NovikovSeries.zero(self.rank, self.omega, self.K)

    def mat_mul(self, a: list, b: list) -> list:
        rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
        out = [[self.zero_series() for _ in range(cols)] for _ in range(rows)]
        for i in range(rows):
            for j in range(cols):
                acc = self.zero_series()
                for k in range(inner):
                    acc = acc + convolve(a[i][k], b[k][j], self.K)
                out[i][j] = acc
        return out

    def check_d_squared(self) -> DSquaredReport:
        residuals = {}
        for q in range(self.n_degrees - 2):
            if not self.dims[q] or not self.dims[q + 2]:
                residuals[q] = 0
                continue
            prod = self.mat_mul(self.d[q + 1], self.d[q])
            bad = 0.0
            for row in prod:
                for entry in row:
                    if not entry.is_zero():
                        bad = max(bad, max(abs(to_complex(v))
                                           for v in entry.terms.values()
                                           if not isinstance(v, np.ndarray)))
            residuals[q] = bad
        worst = max((float(v) for v in residuals.values()), default=0.0)
        return DSquaredReport(exact=True, residuals=residuals, max_residual=worst)

    def evaluate(self, w: WeightSystem) -> BasedComplex:
        """Specialize through the evaluation homomorphism at a weight."""
        exact = w.is_multiplicative_exact
        d = []
        for q in range(self.n_degrees - 1):
            m = zeros_like_field(self.dims[q + 1], self.dims[q], exact)
            for i in range(self.dims[q + 1]):
                for j in range(self.dims[q]):
                    entry = self.d[q][i][j]
                    total = 0
                    for g, cf in entry.terms.items():
                        total = total + cf * w.exp_class(g)
                    m[i, j] = total if exact else to_complex(total)
            d.append(m)
        return BasedComplex(self.dims, d, self.basis)


def build_novikov_complex(counts: InstantonCounts, w: WeightSystem,
                          K) -> NovikovComplex:
    """Novikov complex over the truncated ring, potentials folded in."""
    n_top = counts.max_index()
    by_degree = [counts.zeros_of_index(q) for q in range(n_top + 1)]
    dims = [len(zs) for zs in by_degree]
    has_pots = bool(w.potentials) or bool(w.potential_multipliers)
    d = []
    for q in range(n_top):
        block = [[NovikovSeries.zero(counts.rank, counts.omega, K)
                  for _ in range(dims[q])] for _ in range(dims[q + 1])]
        for i, x in enumerate(by_degree[q + 1]):
            for j, y in enumerate(by_degree[q]):
                table = counts.counts(x.id, y.id)
                if not table:
                    continue
                pot = (w.exp_potential(y.id) / w.exp_potential(x.id)
                       if has_pots else 1)
                terms = {}
                for g, cnt in table.items():
                    lv = -sum(o * v for o, v in zip(counts.omega, g))
                    if lv <= K:
                        terms[g] = cnt * pot
                block[i][j] = NovikovSeries(counts.rank, counts.omega, K, 1, terms)
        d.append(block)
    basis = [[z.id for z in zs] for zs in by_degree]
    return NovikovComplex(dims, d, counts.rank, counts.omega, K, basis)


# -- JSON interface ----------------------------------------------------

def complex_from_json(data) -> BasedComplex:
    """Complex file: list of degrees with dims, matrices, optional b."""
    if isinstance(data, str):
        data = json.loads(data)
    dims = [int(v) for v in data["dims"]]
    d = []
    for q, rows in enumerate(data.get("d", [])):
        m = zeros_like_field(dims[q + 1], dims[q], True)
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                m[i, j] = parse_cnum(v)
        if any(not is_exact(v) for v in m.flat):
            m = to_float_matrix(m)
        d.append(m)
    b = None
    if "b" in data:
        b = []
        for q, rows in enumerate(data["b"]):
            m = zeros_like_field(dims[q], dims[q], True)
            for i, row in enumerate(rows):
                for j, v in enumerate(row):
                    m[i, j] = parse_cnum(v)
            if any(not is_exact(v) for v in m.flat):
                m = to_float_matrix(m)
            b.append(m)
    basis = data.get("basis")
    return BasedComplex(dims, d, basis, b)


def load_complex(path) -> BasedComplex:
    with open(path) as fh:
        return complex_from_json(json.load(fh))
