"""Configuration for graph_core module."""

import os
from dataclasses import dataclass
from dotenv import load_dotenv

load_dotenv()


@dataclass
class GraphConfig:
    """Configuration for graph sources and structural checks."""

    # Arithmetic modes fixed at parse time
    finite_mode: str = os.getenv("KMS_FINITE_MODE", "exact")
    generator_mode: str = os.getenv("KMS_GENERATOR_MODE", "float")

    # Number of out-edges probed when cross-checking declared emitters
    probe_limit: int = int(os.getenv("KMS_PROBE_LIMIT", "64"))

    # Radius of the default probe window around a generator's base vertex
    window_radius: int = int(os.getenv("KMS_WINDOW_RADIUS", "5"))

    def __post_init__(self):
        """Validate settings."""
        for mode in (self.finite_mode, self.generator_mode):
            if mode not in ("exact", "float"):
                raise ValueError(f"Unknown arithmetic mode: {mode}")
        if self.probe_limit < 1:
            raise ValueError("probe_limit must be at least 1")
        if self.window_radius < 0:
            raise ValueError("window_radius must be non-negative")
