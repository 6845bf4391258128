"""
Graph Core Module for KMSGraph

Countable weighted digraphs (finite tables and lazy generator families),
hereditary/saturated closures, cofinality, non-wandering sets and the
standing-assumption report.
"""

from .arithmetic import (
    EXACT, FLOAT, MODES, Number, as_vector, convert, format_number, joint_mode, mode_of, one,
    parse_number, within, zero, zeros,
)
from .config import GraphConfig
from .errors import (
    GraphFormatError, GraphModelError, InvalidVectorError, KMSError, MetadataError,
    NonMonotoneError, PreconditionError, SeriesDivergenceError, SubStochasticRowError,
    UnknownFamilyError, UnknownVertexError, ZeroVectorError,
)
from .exploration import LocalOperator
from .families import FAMILIES, GeneratorFamily, get_family, register_family
from .graph import (
    DeclaredMetadata, FiniteGraph, GeneratorGraph, GraphSource, Verdict, VertexId, out_edges,
)
from .parser import load_graph, load_vector, parse_generator_spec, parse_graph, parse_vector
from .structure import (
    AssumptionReport, classify_vertices, hereditary_saturated_closure, is_cofinal,
    is_hereditary, is_saturated, nonwandering_set, reachable_set,
)

__version__ = "1.0.0"
__all__ = [
    "EXACT", "FLOAT", "MODES", "Number", "as_vector", "convert", "format_number", "joint_mode",
    "mode_of", "one", "parse_number", "within", "zero", "zeros",
    "GraphConfig",
    "KMSError", "GraphFormatError", "GraphModelError", "InvalidVectorError", "MetadataError",
    "NonMonotoneError", "PreconditionError", "SeriesDivergenceError", "SubStochasticRowError",
    "UnknownFamilyError", "UnknownVertexError", "ZeroVectorError",
    "LocalOperator",
    "FAMILIES", "GeneratorFamily", "get_family", "register_family",
    "DeclaredMetadata", "FiniteGraph", "GeneratorGraph", "GraphSource", "Verdict", "VertexId",
    "out_edges",
    "load_graph", "load_vector", "parse_generator_spec", "parse_graph", "parse_vector",
    "AssumptionReport", "classify_vertices", "hereditary_saturated_closure", "is_cofinal",
    "is_hereditary", "is_saturated", "nonwandering_set", "reachable_set",
]
