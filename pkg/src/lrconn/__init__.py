"""Exact connections, curvature and Lie-Rinehart brackets on hypersurface rings."""

from .exactring import HypersurfaceRing, Poly, RingElem, parse_poly
from .idempotents import MatrixA, IdempotentPresentation, PRESETS, jacobian_splitting_idempotent
from .vectorfields import Derivation
from .connections import ConnectionPresentation, GeneratorMap, curvature_matrix, curvature_oracle

__all__ = [
    "ConnectionPresentation",
    "Derivation",
    "GeneratorMap",
    "HypersurfaceRing",
    "IdempotentPresentation",
    "MatrixA",
    "PRESETS",
    "Poly",
    "RingElem",
    "curvature_matrix",
    "curvature_oracle",
    "jacobian_splitting_idempotent",
    "parse_poly",
]

__version__ = "0.1.0"
