"""Configuration for series module."""

import os
from dataclasses import dataclass, replace
from typing import Optional
from dotenv import load_dotenv

load_dotenv()


def _optional_float(name: str) -> Optional[float]:
    raw = os.getenv(name, "").strip()
    return float(raw) if raw else None


@dataclass
class TruncationConfig:
    """Truncation and convergence settings shared by every series computation."""

    # Maximal series index N and per-row enumeration limit for emitters
    depth: int = int(os.getenv("KMS_DEPTH", "256"))
    row_limit: int = int(os.getenv("KMS_ROW_LIMIT", "64"))

    # Convergence tolerance (0 means exact comparisons in exact mode)
    tol: float = float(os.getenv("KMS_TOL", "1e-10"))

    # Optional ratio rho < 1 certifying a geometric tail beyond depth
    tail_ratio_bound: Optional[float] = _optional_float("KMS_TAIL_RATIO_BOUND")

    # Blow-up threshold of the divergence heuristic
    divergence_threshold: float = float(os.getenv("KMS_DIVERGENCE_THRESHOLD", "1e12"))

    # Power iteration budget for finite Perron roots
    power_iterations: int = int(os.getenv("KMS_POWER_ITERATIONS", "10000"))

    # Largest denominator tried when recovering a rational Perron root
    max_denominator: int = int(os.getenv("KMS_MAX_DENOMINATOR", "1000"))

    # Consult family closed forms for critical values and recurrence
    use_closed_forms: bool = os.getenv("KMS_USE_CLOSED_FORMS", "true").lower() == "true"

    # Radius of probe windows used where a vertex set must be enumerated
    window_radius: int = int(os.getenv("KMS_WINDOW_RADIUS", "5"))

    # Number of leading terms kept in SeriesEstimate.partial_terms
    kept_terms: int = 16

    def __post_init__(self):
        """Validate settings."""
        if self.depth < 0:
            raise ValueError("depth must be non-negative")
        if self.row_limit < 1:
            raise ValueError("row_limit must be at least 1")
        if self.tol < 0:
            raise ValueError("tol must be non-negative")
        if self.tail_ratio_bound is not None and not 0 < self.tail_ratio_bound < 1:
            raise ValueError("tail_ratio_bound must lie in (0, 1)")
        if self.divergence_threshold <= 0:
            raise ValueError("divergence_threshold must be positive")
        if self.power_iterations < 1:
            raise ValueError("power_iterations must be at least 1")

    def with_depth(self, depth: int) -> "TruncationConfig":
        """Copy of this configuration with another depth."""
        return replace(self, depth=depth)
