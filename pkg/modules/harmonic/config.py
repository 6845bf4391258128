"""Configuration for harmonic module."""

import os
from dataclasses import dataclass
from dotenv import load_dotenv

load_dotenv()

SCHEDULES = ("queue", "stack")


@dataclass
class HarmonicConfig:
    """Configuration for vector checks, cone enumeration and extensions."""

    # Zero test of the double-description method in float mode
    dd_tol: float = float(os.getenv("KMS_DD_TOL", "1e-9"))

    # Relative residual tolerance of check_vector in float mode
    check_tol: float = float(os.getenv("KMS_CHECK_TOL", "1e-9"))

    # Order in which the saturation sweep visits pending vertices
    schedule: str = os.getenv("KMS_SCHEDULE", "queue")

    def __post_init__(self):
        """Validate settings."""
        if self.dd_tol < 0 or self.check_tol < 0:
            raise ValueError("Tolerances must be non-negative")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"schedule must be one of {SCHEDULES}")
