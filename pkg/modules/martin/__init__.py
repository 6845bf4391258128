"""
Martin Module for KMSGraph

Martin kernels, kernel limits along target sequences, emitter-type extremal
vectors, h-transforms and path sampling of the boundary.
"""

from .config import MartinConfig
from .h_transform import StochasticKernel, cylinder_measure, h_transform
from .kernel import (
    KernelLimitReport, KernelValue, default_targets, emitter_extremal, kernel_bound, kernel_limit,
    martin_kernel,
)
from .sampler import (
    PathSample, SampleReport, checkpoint_steps, loop_erase, path_rng, sample_boundary_paths,
)

__version__ = "1.0.0"
__all__ = [
    "MartinConfig",
    "StochasticKernel", "cylinder_measure", "h_transform",
    "KernelLimitReport", "KernelValue", "default_targets", "emitter_extremal", "kernel_bound",
    "kernel_limit", "martin_kernel",
    "PathSample", "SampleReport", "checkpoint_steps", "loop_erase", "path_rng",
    "sample_boundary_paths",
]
