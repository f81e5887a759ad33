"""Exact cluster transformations, the symplectic double and its polygon models."""

from .cluster_maps import (
    ClusterMap,
    ClusterMapError,
    FrozenIndexError,
    a_mutation,
    compose,
    d_mutation,
    iota_map,
    j_map,
    phi_map,
    pi_map,
    x_mutation,
)
from .flagconfig import (
    DecoratedFlag2,
    DecoratedPolygonConfig,
    DegenerateConfigurationError,
    DoubleConfig,
    FramedPolygonConfig,
    a_coord,
    double_coords,
    h_rescale,
    mirror_x_coords,
    reconstruct_double,
    x_coord,
)
from .ratfunc import CompositionError, PoleError, RationalFunction, VarSet, VarSetMismatchError
from .seed import Seed, SeedError, canonical_form, enumerate_mutation_class, mutate_seed
from .surface import IdealTriangulation, TriangulationError, flip, m_triangulation_seed, polygon_triangulation

__version__ = "0.1.0"

__all__ = [
    "ClusterMap",
    "ClusterMapError",
    "CompositionError",
    "DecoratedFlag2",
    "DecoratedPolygonConfig",
    "DegenerateConfigurationError",
    "DoubleConfig",
    "FramedPolygonConfig",
    "FrozenIndexError",
    "IdealTriangulation",
    "PoleError",
    "RationalFunction",
    "Seed",
    "SeedError",
    "TriangulationError",
    "VarSet",
    "VarSetMismatchError",
    "a_coord",
    "a_mutation",
    "canonical_form",
    "compose",
    "d_mutation",
    "double_coords",
    "enumerate_mutation_class",
    "flip",
    "h_rescale",
    "iota_map",
    "j_map",
    "m_triangulation_seed",
    "mirror_x_coords",
    "mutate_seed",
    "phi_map",
    "pi_map",
    "polygon_triangulation",
    "reconstruct_double",
    "x_coord",
    "x_mutation",
]
