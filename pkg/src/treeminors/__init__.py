"""Principal minors of tree distance matrices, computed exactly from rooted spanning forests."""

from .errors import IdentityViolation, InputError, ParseError, TreeMinorsError
from .forest_enum import ForestKind, enumerate_forests, forest_stats, kappa, outdegree_histogram
from .graph_model import Tree, build_tree, convex_hull, distance_submatrix, leaves, subset_from_labels
from .minor_formulas import (
    analyze,
    cofactor_identity,
    equilibrium_vector,
    normalized_minor,
    principal_minor_formula,
)

__version__ = "0.1.0"

__all__ = [
    "ForestKind",
    "IdentityViolation",
    "InputError",
    "ParseError",
    "Tree",
    "TreeMinorsError",
    "analyze",
    "build_tree",
    "cofactor_identity",
    "convex_hull",
    "distance_submatrix",
    "enumerate_forests",
    "equilibrium_vector",
    "forest_stats",
    "kappa",
    "leaves",
    "normalized_minor",
    "outdegree_histogram",
    "principal_minor_formula",
    "subset_from_labels",
]
