"""Relative homology of (X^n, Y^(n)) over Q, the staircase realization of the
truncated groupoid algebra, and the transition maps between levels."""

from .exactla import QMatrix, rank, rref, kernel_basis, solve, coordinates_in_span
from .sset import (SimplexKey, SimplicialSet, SubsetMask, Eq, PinnedTo, standard_model,
                   power, face, coordinate_constraint_subset, union_subsets, intersect_subsets)
from .homology import (ChainComplex, HomologySpace, normalized_chain_complex, homology_space,
                       induced_map, connecting_triple, verify_les)
from .grpalg import (TruncElem, GroupoidSetup, parse_word, magnus, mul, project, basis_lift,
                     groupoid_class, groupoid_setup)
from .beilinson import (PairFamily, build_pair_family, staircase_chain, tau, tau_matrix,
                        excision_iso, kappa, verify_cd, embed_prev)

__version__ = "0.1.0"

__all__ = [
    "QMatrix",
    "rank",
    "rref",
    "kernel_basis",
    "solve",
    "coordinates_in_span",
    "SimplexKey",
    "SimplicialSet",
    "SubsetMask",
    "Eq",
    "PinnedTo",
    "standard_model",
    "power",
    "face",
    "coordinate_constraint_subset",
    "union_subsets",
    "intersect_subsets",
    "ChainComplex",
    "HomologySpace",
    "normalized_chain_complex",
    "homology_space",
    "induced_map",
    "connecting_triple",
    "verify_les",
    "TruncElem",
    "GroupoidSetup",
    "parse_word",
    "magnus",
    "mul",
    "project",
    "basis_lift",
    "groupoid_class",
    "groupoid_setup",
    "PairFamily",
    "build_pair_family",
    "staircase_chain",
    "tau",
    "tau_matrix",
    "excision_iso",
    "kappa",
    "verify_cd",
    "embed_prev",
]
