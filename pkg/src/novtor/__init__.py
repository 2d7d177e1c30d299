"""Exact algebra of counting functions, truncated series, and torsion.

The package computes Laplace-type transforms of instanton and closed-orbit
counting data, builds the associated complexes over truncated Novikov
rings, evaluates Milnor-style torsion of acyclic based complexes, and
verifies the torsion-equals-zeta identity on algebraic mapping tori —
exactly, over Gaussian rationals, wherever the inputs permit.
"""

from ._accel import USING_NUMBA
from .chains import (OneChain, SkeletonGraph, ZeroChain, cs_boundary_check,
                     euler_chain, euler_chain_from_morse,
                     eval_weight_on_chain, hopf_index, load_skeleton)
from .complexes import (BasedComplex, ChainMap, DifferentialError,
                        NovikovComplex, b_laplacian, build_morse_differential,
                        build_novikov_complex, check_d_squared, cohomology,
                        load_complex, mapping_cone, spectral_split,
                        transpose_wrt_b)
from .counting import (InstantonCounts, OrbitCounts, Zero, gauge_transform,
                       laplace_instanton, laplace_orbits, load_counting,
                       to_novikov)
from .exact import QC
from .series import (NovikovSeries, SupportError, Verdict, abscissa_estimate,
                     convolve, evaluate, exp_series, invert, l1_norm,
                     log_series)
from .suspension import (LefschetzData, RationalFunction, TorusAutomorphism,
                         algebraic_mapping_torus, brute_force_fixed_points,
                         lefschetz_numbers, lefschetz_zeta, load_map,
                         orbit_counts_from_map, verify_theorem_tor)
from .torsion import (NotAcyclicError, TorsionValue, milnor_torsion,
                      novikov_torsion, relative_torsion, torsion_via_laplacian)
from .weights import Lattice, RayPoint, WeightSystem, load_weight, ray_weight

__version__ = "0.1.0"

__all__ = [
    "BasedComplex", "ChainMap", "DifferentialError", "InstantonCounts",
    "Lattice", "LefschetzData", "NotAcyclicError", "NovikovComplex",
    "NovikovSeries", "OneChain", "OrbitCounts", "QC", "RationalFunction",
    "RayPoint", "SkeletonGraph", "SupportError", "TorsionValue",
    "TorusAutomorphism", "USING_NUMBA", "Verdict", "WeightSystem", "Zero",
    "ZeroChain", "abscissa_estimate", "algebraic_mapping_torus",
    "b_laplacian", "brute_force_fixed_points", "build_morse_differential",
    "build_novikov_complex", "check_d_squared", "cohomology", "convolve",
    "cs_boundary_check", "euler_chain", "euler_chain_from_morse",
    "eval_weight_on_chain", "evaluate", "exp_series", "gauge_transform",
    "hopf_index", "invert", "l1_norm", "laplace_instanton", "laplace_orbits",
    "lefschetz_numbers", "lefschetz_zeta", "load_complex", "load_counting",
    "load_map", "load_skeleton", "load_weight", "log_series", "mapping_cone",
    "milnor_torsion", "novikov_torsion", "orbit_counts_from_map",
    "ray_weight", "relative_torsion", "spectral_split", "to_novikov",
    "torsion_via_laplacian", "transpose_wrt_b", "verify_theorem_tor",
]
