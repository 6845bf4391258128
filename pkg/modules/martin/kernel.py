"""Martin kernels K_v(w) = G(v, w) / G(v0, w) and their limits along target sequences."""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

from graph_core import (
    GraphSource, Number, PreconditionError, SeriesDivergenceError, VertexId, format_number,
)
from harmonic import HarmonicConfig, HarmonicVector, check_vector, default_probe, has_v_infinity
from series import GreenColumns, SeriesEstimate, TruncationConfig, as_lambda, power_sequence

logger = logging.getLogger(__name__)


@dataclass
class KernelValue:
    """K_v(w) with bounds derived from the two Green series."""

    v: VertexId
    w: VertexId
    value: Number
    lower: Optional[Number] = None
    upper: Optional[Number] = None
    numerator: Optional[SeriesEstimate] = None
    denominator: Optional[SeriesEstimate] = None

    @property
    def certainty(self) -> str:
        """exact when both Green series are exhausted, bounds when both are bracketed."""
        if self.numerator is None or self.denominator is None:
            return "heuristic"
        if self.numerator.certainty == "exact" and self.denominator.certainty == "exact":
            return "exact"
        if self.lower is not None and self.upper is not None:
            return "bounds"
        return "heuristic"

    def to_dict(self) -> dict:
        return {
            "v": self.v,
            "w": self.w,
            "value": format_number(self.value),
            "lower": None if self.lower is None else format_number(self.lower),
            "upper": None if self.upper is None else format_number(self.upper),
            "certainty": self.certainty,
        }


@dataclass
class KernelLimitReport:
    """Kernels along a target sequence and the resulting limit estimate."""

    sequence: List[VertexId]
    trajectories: Dict[VertexId, List[Number]]
    limit_estimate: HarmonicVector
    cauchy_gap: float
    verdict: str
    diagnostics: Dict[str, object] = field(default_factory=dict)

    def to_records(self) -> List[dict]:
        return [
            {"vertex": v, "limit": format_number(self.limit_estimate.get(v)),
             "last_gap": float(abs(t[-1] - t[-2])) if len(t) > 1 else None}
            for v, t in sorted(self.trajectories.items())
        ]


def _denominator(columns: GreenColumns, v0: VertexId, w: VertexId) -> SeriesEstimate:
    est = columns.estimate(v0, w)
    if est.lower == 0:
        raise PreconditionError(f"Target {w} is not reachable from {v0} within depth {columns.cfg.depth}")
    if est.diverged:
        raise SeriesDivergenceError(f"G({v0},{w}) diverges; kernels need the transient regime")
    return est


def martin_kernel(
    g: GraphSource,
    lam,
    v0: VertexId,
    v: VertexId,
    w: VertexId,
    cfg: Optional[TruncationConfig] = None
) -> KernelValue:
    """
    Martin kernel K_v(w) normalized at v0.

    Args:
        g: Graph source
        lam: lambda = e^beta
        v0: Normalization vertex
        v: Evaluation vertex
        w: Target in H_{v0}
        cfg: Truncation configuration

    Returns:
        KernelValue; K_{v0}(w) = 1 exactly

    Raises:
        PreconditionError: If w is not reachable from v0 within depth
        SeriesDivergenceError: If a Green series diverges
    """
    cfg = cfg or TruncationConfig()
    lam = as_lambda(lam)
    columns = GreenColumns(g, [w], lam, [v0, v], cfg, track=[v0, v])
    den = _denominator(columns, v0, w)
    num = columns.estimate(v, w)
    if num.diverged:
        raise SeriesDivergenceError(f"G({v},{w}) diverges; kernels need the transient regime")
    value = num.lower / den.lower
    lower = num.lower / den.upper if den.upper is not None else None
    upper = num.upper / den.lower if num.upper is not None else None
    return KernelValue(v, w, value, lower, upper, num, den)


def kernel_bound(
    g: GraphSource,
    lam,
    v0: VertexId,
    v: VertexId,
    cfg: Optional[TruncationConfig] = None
) -> Number:
    """
    Upper bound N_v = lambda^l / A^l_{v0 v} on K_v(w), l the least exponent with A^l_{v0 v} > 0.

    Raises:
        PreconditionError: If v is not reachable from v0 within depth
    """
    cfg = cfg or TruncationConfig()
    lam = as_lambda(lam)
    powers = power_sequence(g, v0, v, cfg.depth, cfg)
    for l, entry in enumerate(powers):
        if entry > 0:
            return lam ** l / entry
    raise PreconditionError(f"{v} is not reachable from {v0} within depth {cfg.depth}")


def default_targets(g: GraphSource, direction: str = "+", count: int = 32) -> List[VertexId]:
    """Family default target sequence (a march towards one end of the graph)."""
    if g.is_finite:
        raise PreconditionError("Finite graphs have no escaping target sequences")
    return g.family.targets(g.params, direction, count)


def kernel_limit(
    g: GraphSource,
    lam,
    v0: VertexId,
    targets: Sequence[VertexId],
    probe_window: Optional[Iterable[VertexId]] = None,
    cfg: Optional[TruncationConfig] = None,
    config: Optional[HarmonicConfig] = None
) -> KernelLimitReport:
    """
    Kernels K_v(w_k) along distinct targets and their limit on a probe window.

    The verdict is ``converged`` when the last two kernels differ by less
    than tol (relative to max(1, |K_v|)) on the window and the limit passes
    check_vector; otherwise ``inconclusive``.

    Args:
        g: Graph source
        lam: lambda = e^beta
        v0: Normalization vertex
        targets: Distinct target vertices in H_{v0}
        probe_window: Vertices to evaluate (default: probe window, all of a finite graph)
        cfg: Truncation configuration
        config: Harmonic configuration for the final check

    Returns:
        KernelLimitReport

    Raises:
        PreconditionError: If targets repeat or leave H_{v0}
        SeriesDivergenceError: If a denominator diverges
    """
    cfg = cfg or TruncationConfig()
    lam = as_lambda(lam)
    targets = [g.require_vertex(w) for w in targets]
    if len(set(targets)) != len(targets):
        raise PreconditionError("Kernel limits need distinct targets")
    if not targets:
        raise PreconditionError("At least one target is required")
    if probe_window is None:
        probe_window = g.vertices if g.is_finite else g.probe_window(cfg.window_radius)
    probe = [g.require_vertex(v) for v in probe_window]
    if v0 not in probe:
        probe.insert(0, g.require_vertex(v0))
    logger.info(f"Kernel limit from {v0} along {len(targets)} targets, window of {len(probe)}")

    columns = GreenColumns(g, targets, lam, probe, cfg, track=[v0])
    dens = [_denominator(columns, v0, w).lower for w in targets]
    trajectories = {v: [columns.get(v, w) / d for w, d in zip(targets, dens)] for v in probe}

    gap = float("inf")
    if len(targets) > 1:
        gap = max(
            abs(float(t[-1] - t[-2])) / max(1.0, abs(float(t[-1]))) for t in trajectories.values()
        )
    limit = {v: t[-1] for v, t in trajectories.items()}

    kind, check_passed = "candidate", False
    if any(x > 0 for x in limit.values()):
        report = check_vector(
            g, lam, limit, probe=default_probe(g, limit, cfg.row_limit), row_limit=cfg.row_limit,
            config=config,
        )
        check_passed = report.is_almost_harmonic
        if gap < cfg.tol and check_passed:
            kind = "harmonic" if report.is_harmonic else "almost_harmonic"
    verdict = "converged" if gap < cfg.tol and check_passed else "inconclusive"
    if verdict != "converged":
        logger.warning(f"Kernel limit inconclusive: Cauchy gap {gap:.3e}")
    return KernelLimitReport(
        sequence=targets,
        trajectories=trajectories,
        limit_estimate=HarmonicVector(columns.lam, limit, kind=kind),
        cauchy_gap=gap,
        verdict=verdict,
        diagnostics={"depth": cfg.depth, "check_passed": check_passed},
    )


def emitter_extremal(
    g: GraphSource,
    lam,
    v0: VertexId,
    u: VertexId,
    cfg: Optional[TruncationConfig] = None,
    support: Optional[Iterable[VertexId]] = None
) -> HarmonicVector:
    """
    Extremal almost harmonic vector xi_v = K_v(u) attached to u in V_infinity.

    Its only strict slack is at u; it is the potential of the Dirac charge
    at u normalized at v0.

    Raises:
        PreconditionError: If V_infinity is empty, u is not in it, or u is unreachable from v0
    """
    cfg = cfg or TruncationConfig()
    lam = as_lambda(lam)
    if not has_v_infinity(g):
        raise PreconditionError("V_infinity is empty")
    if not g.in_v_infinity(g.require_vertex(u)):
        raise PreconditionError(f"{u} is not a sink or an infinite emitter")
    if support is None:
        support = g.vertices if g.is_finite else g.probe_window(cfg.window_radius)
    support = list(dict.fromkeys([v0, u, *support]))

    columns = GreenColumns(g, [u], lam, support, cfg, track=[v0])
    den = _denominator(columns, v0, u).lower
    values = {v: columns.get(v, u) / den for v in support}
    return HarmonicVector(columns.lam, values, kind="almost_harmonic", label=f"emitter({u})",
                          diagnostics={"slack_vertex": u})
