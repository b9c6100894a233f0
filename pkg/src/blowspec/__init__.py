"""Eigenvalues of graph blowup hypergraphs via root-of-unity weighted subgraphs."""

from .engine import (
    EngineOptions,
    SpectrumReport,
    blowup_spectrum,
    cross_validate_reductions,
    verify_spectrum,
)
from .errors import (
    BlowspecError,
    CertificationError,
    GraphFormatError,
    NumericError,
    ValidationError,
    VerificationError,
)
from .graph import Graph, VertexSubset, parse_edge_list, parse_graph6, spectral_radius
from .hypergraph import build_blowup
from .spectra import SpectrumSet, char_poly, compare_spectra, merge_spectrum, rotation_closure
from .weights import EtaAssignment, WeightAssignment, adjacency_from_eta, adjacency_from_pi

__all__ = [
    "BlowspecError",
    "CertificationError",
    "EngineOptions",
    "EtaAssignment",
    "Graph",
    "GraphFormatError",
    "NumericError",
    "SpectrumReport",
    "SpectrumSet",
    "ValidationError",
    "VerificationError",
    "VertexSubset",
    "WeightAssignment",
    "adjacency_from_eta",
    "adjacency_from_pi",
    "blowup_spectrum",
    "build_blowup",
    "char_poly",
    "compare_spectra",
    "cross_validate_reductions",
    "merge_spectrum",
    "parse_edge_list",
    "parse_graph6",
    "rotation_closure",
    "spectral_radius",
    "verify_spectrum",
]
