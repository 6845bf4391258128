"""Exception hierarchy shared by all KMSGraph modules."""

from typing import Optional


class KMSError(Exception):
    """Base class for domain errors raised by KMSGraph."""

    exit_code: int = 1

    def __init__(self, message: str, *args):
        super().__init__(message, *args)
        self.message = message


class GraphFormatError(KMSError):
    """Graph or vector document does not conform to the text format."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnknownVertexError(KMSError):
    """Vertex is not part of the graph."""

    def __init__(self, vertex: str):
        super().__init__(f"Unknown vertex: {vertex!r}")
        self.vertex = vertex


class UnknownFamilyError(KMSError):
    """Generator family name is not registered."""


class GraphModelError(KMSError):
    """Graph violates a structural property the model relies on."""


class MetadataError(KMSError):
    """Declared generator metadata disagrees with the probed graph."""


class PreconditionError(KMSError):
    """Operation called outside its domain of validity."""


class SeriesDivergenceError(KMSError):
    """A series required to converge was flagged as divergent."""


class InvalidVectorError(KMSError):
    """Vector fails the almost harmonic constraints or misses values."""


class ZeroVectorError(InvalidVectorError):
    """The zero vector was supplied where a non-zero vector is required."""


class NonMonotoneError(KMSError):
    """Iterates that must be non-increasing increased (arithmetic breakdown)."""


class SubStochasticRowError(KMSError):
    """A transition row does not sum to one."""

    def __init__(self, message: str, vertex: Optional[str] = None):
        super().__init__(message)
        self.vertex = vertex
