"""Curved prototiles, edge typing, smoothability combinatorics and monotiled surface growth."""

from .config import TOL, Tolerances, load_config, override
from .edges import EdgeCongruence, SampledEdge, find_congruence
from .engine import TilingState, build_coronas, propagate
from .errors import TilekitError
from .geom3 import RigidMotion
from .prototile import EdgeType, Prototile, classify_edge_type

__all__ = [
    "TOL", "Tolerances", "load_config", "override",
    "EdgeCongruence", "SampledEdge", "find_congruence",
    "TilingState", "build_coronas", "propagate",
    "TilekitError", "RigidMotion",
    "EdgeType", "Prototile", "classify_edge_type",
]

__version__ = "0.1.0"
