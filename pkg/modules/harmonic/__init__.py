"""
Harmonic Module for KMSGraph

Almost harmonic vectors: validation, extreme points on finite graphs,
no-solution certificates, hereditary extension, the recurrent construction,
Riesz decomposition, potentials and lattice operations.
"""

from .config import HarmonicConfig
from .polytope import ConeDescription, DoubleDescription, constraint_rows, solve_finite
from .riesz import (
    RieszPair, descend, has_v_infinity, lattice_join, lattice_meet, potential_hat, riesz_decompose,
)
from .solver import (
    ExistenceVerdict, NoSolutionCertificate, certify_no_solution, existence_verdict,
    extend_from_hereditary, recurrent_harmonic,
)
from .vectors import (
    HarmonicVector, VectorCheck, check_vector, default_probe, require_almost_harmonic,
    vector_values,
)

__version__ = "1.0.0"
__all__ = [
    "HarmonicConfig",
    "ConeDescription", "DoubleDescription", "constraint_rows", "solve_finite",
    "RieszPair", "descend", "has_v_infinity", "lattice_join", "lattice_meet", "potential_hat",
    "riesz_decompose",
    "ExistenceVerdict", "NoSolutionCertificate", "certify_no_solution", "existence_verdict",
    "extend_from_hereditary", "recurrent_harmonic",
    "HarmonicVector", "VectorCheck", "check_vector", "default_probe", "require_almost_harmonic",
    "vector_values",
]
