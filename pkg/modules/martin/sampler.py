"""Path sampling for the h-transformed chain and empirical boundary convergence."""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from graph_core import PreconditionError, VertexId
from series import GreenColumns, TruncationConfig

from .config import MartinConfig
from .h_transform import StochasticKernel

logger = logging.getLogger(__name__)


@dataclass
class PathSample:
    """One sampled trajectory with its kernel errors at the checkpoints."""

    index: int
    path: List[VertexId]
    checkpoints: List[int]
    errors: List[float]
    converged: bool
    loop_erased: List[VertexId] = field(default_factory=list)


@dataclass
class SampleReport:
    """Aggregate of sampled paths."""

    v0: VertexId
    n_paths: int
    horizon: int
    seed: int
    tol: float
    depth: int
    paths: List[PathSample]

    @property
    def fraction(self) -> float:
        if not self.paths:
            return 0.0
        return sum(p.converged for p in self.paths) / len(self.paths)

    def to_records(self) -> List[dict]:
        return [
            {"path": p.index, "step": t, "vertex": p.path[t], "kernel_error": e, "converged": p.converged}
            for p in self.paths
            for t, e in zip(p.checkpoints, p.errors)
        ]


def loop_erase(path: Sequence[VertexId]) -> List[VertexId]:
    """Chronological loop erasure: drop every cycle as soon as it closes."""
    erased: List[VertexId] = []
    position: Dict[VertexId, int] = {}
    for v in path:
        if v in position:
            cut = position[v]
            for u in erased[cut + 1:]:
                del position[u]
            erased = erased[:cut + 1]
        else:
            position[v] = len(erased)
            erased.append(v)
    return erased


def path_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream of one path, keyed by (seed, path index)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def _choose(rng: np.random.Generator, row) -> VertexId:
    u = rng.random()
    acc = 0.0
    for w, p in row:
        acc += float(p)
        if u < acc:
            return w
    return row[-1][0]


def checkpoint_steps(horizon: int, count: int) -> List[int]:
    """Evenly spread steps ending at the horizon."""
    if horizon == 0:
        return [0]
    return sorted({max(1, round(horizon * (j + 1) / count)) for j in range(count)})


def sample_boundary_paths(
    kernel: StochasticKernel,
    v0: VertexId,
    n_paths: int,
    horizon: int,
    seed: int,
    cfg: Optional[TruncationConfig] = None,
    config: Optional[MartinConfig] = None,
    probe: Optional[Iterable[VertexId]] = None
) -> SampleReport:
    """
    Simulate the h-transformed chain from v0 and test kernel convergence along each path.

    At every checkpoint the Martin kernels K_v(x_t) on the probe window are
    compared with psi_v / psi_{v0}; a path converges when the maximal
    relative error at the horizon is within sample_tol.

    Args:
        kernel: Stochastic kernel of the h-transform
        v0: Start vertex (also the kernel normalization vertex)
        n_paths: Number of paths
        horizon: Steps per path
        seed: Seed of the per-path random streams
        cfg: Truncation configuration (depth raised to kernel_depth_factor x horizon)
        config: Sampling configuration
        probe: Vertices where kernels are compared (default: probe window within psi's support)

    Returns:
        SampleReport (identical for identical arguments)

    Raises:
        SubStochasticRowError: If a path reaches a vertex without a transition row
    """
    cfg = cfg or TruncationConfig()
    config = config or MartinConfig()
    if n_paths < 0 or horizon < 0:
        raise ValueError("n_paths and horizon must be non-negative")
    g = kernel.graph
    psi = kernel.psi.values
    if v0 not in psi:
        raise PreconditionError(f"psi has no value at the start vertex {v0}")
    if probe is None:
        window = g.vertices if g.is_finite else g.probe_window(cfg.window_radius)
        probe = [v for v in window if v in psi]
    probe = list(dict.fromkeys([v0, *probe]))
    logger.info(f"Sampling {n_paths} paths of {horizon} steps from {v0} (seed {seed})")

    paths = []
    for index in tqdm(range(n_paths), desc="Sampling paths", disable=not config.show_progress):
        rng = path_rng(seed, index)
        path = [v0]
        for _ in range(horizon):
            path.append(_choose(rng, kernel.row(path[-1])))
        paths.append(path)

    steps = checkpoint_steps(horizon, config.checkpoints)
    targets = list(dict.fromkeys(path[t] for path in paths for t in steps))
    depth = max(cfg.depth, config.kernel_depth_factor * horizon)
    errors: Dict[VertexId, float] = {}
    if targets:
        columns = GreenColumns(g, targets, kernel.lam, probe, cfg.with_depth(depth))
        expected = {v: float(psi[v]) / float(psi[v0]) for v in probe}
        for w in targets:
            den = float(columns.get(v0, w))
            if den == 0:
                errors[w] = float("inf")
                continue
            errors[w] = max(abs(float(columns.get(v, w)) / den - expected[v]) / expected[v] for v in probe)

    samples = []
    for index, path in enumerate(paths):
        path_errors = [errors[path[t]] for t in steps]
        samples.append(PathSample(
            index=index,
            path=path,
            checkpoints=steps,
            errors=path_errors,
            converged=path_errors[-1] <= config.sample_tol,
            loop_erased=loop_erase(path),
        ))
    report = SampleReport(v0, n_paths, horizon, seed, config.sample_tol, depth, samples)
    logger.info(f"✓ {report.fraction:.1%} of paths within {config.sample_tol:.0%} of psi")
    return report
