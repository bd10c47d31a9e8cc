"""Kneser graphs on chambers and line-plane flags of finite projective spaces."""
from .geometry import ProjectiveSpace, Subspace, gaussian_binomial
from .kernels import BACKEND
from .kneser import OppositionGraph, VertexSet, build_graph, is_independent, is_maximal_independent

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "OppositionGraph",
    "ProjectiveSpace",
    "Subspace",
    "VertexSet",
    "build_graph",
    "gaussian_binomial",
    "is_independent",
    "is_maximal_independent",
]
