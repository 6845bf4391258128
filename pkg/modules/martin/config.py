"""Configuration for martin module."""

import os
from dataclasses import dataclass
from dotenv import load_dotenv

load_dotenv()


@dataclass
class MartinConfig:
    """Configuration for kernel limits, h-transforms and path sampling."""

    # Green series depth used while sampling: factor x horizon (at least cfg.depth)
    kernel_depth_factor: int = int(os.getenv("KMS_KERNEL_DEPTH_FACTOR", "3"))

    # Relative distance between sampled kernels and psi counted as converged
    sample_tol: float = float(os.getenv("KMS_SAMPLE_TOL", "0.05"))

    # Kernel evaluations per sampled path (the last one sits at the horizon)
    checkpoints: int = int(os.getenv("KMS_CHECKPOINTS", "4"))

    # Allowed deviation of h-transform row sums from 1 in float mode
    row_tol: float = float(os.getenv("KMS_ROW_TOL", "1e-9"))

    # Show a tqdm progress bar while sampling
    show_progress: bool = os.getenv("KMS_SHOW_PROGRESS", "false").lower() == "true"

    def __post_init__(self):
        """Validate settings."""
        if self.kernel_depth_factor < 1:
            raise ValueError("kernel_depth_factor must be at least 1")
        if not 0 < self.sample_tol < 1:
            raise ValueError("sample_tol must lie in (0, 1)")
        if self.checkpoints < 1:
            raise ValueError("checkpoints must be at least 1")
        if self.row_tol < 0:
            raise ValueError("row_tol must be non-negative")
