"""No-solution certificates, hereditary extension and the recurrent construction."""

import logging
import math
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional

from graph_core import (
    EXACT, GraphSource, InvalidVectorError, Number, PreconditionError, VertexId, convert,
    format_number, joint_mode, one, within,
)
from series import (
    TruncationConfig, as_lambda, beta0_estimate, classify_recurrence, first_passage_column,
    power_sequence,
)

from .config import HarmonicConfig
from .vectors import HarmonicVector, check_vector, vector_values

logger = logging.getLogger(__name__)

# Log-space margin when comparing A^n_vv with lambda^n in float mode
_LOG_MARGIN = 1e-12


@dataclass
class NoSolutionCertificate:
    """(A^n_vv)^{1/n} > lambda, so no positive xi satisfies A^n xi <= lambda^n xi."""

    witness_vertex: VertexId
    exponent: int
    value: float
    lam: Number

    def to_dict(self) -> dict:
        return {
            "witness_vertex": self.witness_vertex,
            "exponent": self.exponent,
            "value": self.value,
            "lambda": format_number(self.lam),
        }


@dataclass
class ExistenceVerdict:
    """Whether E(A, lambda) contains a non-zero vector."""

    exists: str
    rule: str
    certificate: Optional[NoSolutionCertificate] = None

    def to_dict(self) -> dict:
        return {
            "exists": self.exists,
            "rule": self.rule,
            "certificate": self.certificate.to_dict() if self.certificate else None,
        }


def nw_probe(g: GraphSource, radius: int) -> List[VertexId]:
    """NW vertices to search: all of NW on finite graphs, the probe window otherwise."""
    if g.is_finite:
        return sorted(g.nw)
    return [v for v in g.probe_window(radius) if g.in_nw(v)]


def _exceeds(entry: Number, n: int, lam: Number, exact: bool) -> bool:
    if entry <= 0:
        return False
    if exact:
        return entry > lam ** n
    return math.log(float(entry)) > n * math.log(float(lam)) + _LOG_MARGIN * max(1, n)


def certify_no_solution(
    g: GraphSource,
    lam,
    cfg: Optional[TruncationConfig] = None
) -> Optional[NoSolutionCertificate]:
    """
    Search n <= depth and probed NW vertices for (A^n_vv)^{1/n} > lambda.

    Returns:
        The witness with the smallest exponent (ties broken by vertex order),
        or None when no witness exists within the search range
    """
    cfg = cfg or TruncationConfig()
    lam = as_lambda(lam)
    exact = joint_mode(g.mode, lam) == EXACT
    best: Optional[NoSolutionCertificate] = None
    for v in nw_probe(g, cfg.window_radius):
        powers = power_sequence(g, v, v, cfg.depth, cfg)
        for n in range(1, len(powers)):
            if best is not None and n >= best.exponent:
                break
            if _exceeds(powers[n], n, lam, exact):
                best = NoSolutionCertificate(v, n, float(powers[n]) ** (1.0 / n), lam)
                break
    if best is not None:
        logger.info(f"No-solution witness at {best.witness_vertex}, n={best.exponent}")
    return best


def existence_verdict(g: GraphSource, lam, cfg: Optional[TruncationConfig] = None) -> ExistenceVerdict:
    """
    Decide whether a non-zero almost harmonic vector exists at lambda.

    Empty NW always admits one; finite non-empty NW only at lambda0; infinite
    NW exactly for lambda >= lambda0, undecided inside the lambda0 bracket.
    """
    cfg = cfg or TruncationConfig()
    if g.nw_kind == "empty":
        return ExistenceVerdict("yes", "empty non-wandering set")
    certificate = certify_no_solution(g, lam, cfg)
    if certificate is not None:
        return ExistenceVerdict("no", "lambda below lambda0 (power witness)", certificate)

    report = beta0_estimate(g, cfg)
    lam_f = float(lam)
    if g.nw_kind == "finite":
        if report.lambda0_exact is not None and joint_mode(g.mode, lam) == EXACT:
            same = lam == report.lambda0_exact
        else:
            same = within(lam_f - float(report.lambda0), cfg.tol, lam_f)
        if same:
            return ExistenceVerdict("yes", "finite non-wandering set at lambda = lambda0")
        return ExistenceVerdict("no", "finite non-wandering set requires lambda = lambda0")

    if lam_f < report.lambda0_lower:
        return ExistenceVerdict("no", "lambda below the lambda0 lower bound")
    if report.lambda0_upper is not None and lam_f >= report.lambda0_upper:
        return ExistenceVerdict("yes", "infinite non-wandering set with lambda >= lambda0")
    return ExistenceVerdict("unknown", "lambda inside the lambda0 bracket")


def _is_hereditary(g: GraphSource, subset: Iterable[VertexId], row_limit: int) -> bool:
    subset = set(subset)
    limit = None if g.is_finite else row_limit
    return all(w in subset for v in subset for w, _ in g.out_edges(v, limit))


def extend_from_hereditary(
    g: GraphSource,
    lam,
    subset: Iterable[VertexId],
    eta: Mapping[VertexId, Number],
    cfg: Optional[TruncationConfig] = None,
    config: Optional[HarmonicConfig] = None,
    schedule: Optional[str] = None
) -> HarmonicVector:
    """
    Extend eta from a hereditary set H by the saturation sweep.

    Vertices outside V_infinity whose out-neighbors are all valued receive
    xi_v = lambda^{-1} sum_w A_vw xi_w until nothing changes. Finite cofinal
    graphs end up fully valued; generators are extended over the probe
    window.

    Args:
        g: Graph source
        lam: lambda = e^beta
        subset: Hereditary set H
        eta: Values on H
        cfg: Truncation configuration (row limit and window radius)
        config: Harmonic configuration
        schedule: ``queue`` or ``stack`` visiting order (default from config)

    Returns:
        HarmonicVector on the valued vertices

    Raises:
        PreconditionError: If H is empty or not hereditary
        InvalidVectorError: If eta violates the constraints inside H
    """
    cfg = cfg or TruncationConfig()
    config = config or HarmonicConfig()
    schedule = schedule or config.schedule
    subset = [g.require_vertex(v) for v in subset]
    if not subset:
        raise PreconditionError("The hereditary set is empty")
    if not _is_hereditary(g, subset, cfg.row_limit):
        raise PreconditionError("The given set is not hereditary")
    values = vector_values({v: eta[v] for v in subset if v in eta})
    if len(values) != len(subset):
        missing = sorted(set(subset) - set(values))
        raise InvalidVectorError(f"Missing values on H at {missing[:5]}")
    inside = check_vector(g, lam, values, probe=subset, row_limit=cfg.row_limit, config=config)
    if not inside.is_almost_harmonic:
        raise InvalidVectorError(f"eta violates the constraints inside H at {inside.violations[:5]}")

    mode = joint_mode(g.mode, lam, *values.values())
    inv = one(mode) / convert(lam, mode)
    valued: Dict[VertexId, Number] = {v: convert(x, mode) for v, x in values.items()}
    candidates = g.vertices if g.is_finite else g.probe_window(cfg.window_radius)
    pending = [v for v in candidates if v not in valued and not g.in_v_infinity(v)]

    rounds = 0
    while pending:
        rounds += 1
        order, blocked, progress = deque(pending), [], False
        while order:
            v = order.popleft() if schedule == "queue" else order.pop()
            row = list(g.out_edges(v))
            if all(w in valued for w, _ in row):
                valued[v] = inv * sum((convert(a, mode) * valued[w] for w, a in row), convert(0, mode))
                progress = True
            else:
                blocked.append(v)
        if not progress:
            break
        pending = blocked
    if pending:
        logger.warning(f"{len(pending)} vertices could not be reached by the sweep")
    logger.debug(f"Saturation sweep ({schedule}) finished after {rounds} rounds")

    kind = "almost_harmonic"
    if g.is_finite and not pending:
        report = check_vector(g, lam, valued, config=config)
        if report.is_harmonic:
            kind = "harmonic"
    return HarmonicVector(convert(lam, mode), valued, kind=kind)


def recurrent_harmonic(
    g: GraphSource,
    w: VertexId,
    cfg: Optional[TruncationConfig] = None,
    sources: Optional[Iterable[VertexId]] = None
) -> HarmonicVector:
    """
    The lambda0-harmonic vector xi_v = sum_n r_vw(n) lambda0^{-n} of a recurrent matrix.

    The vector is divided by the return series sum_n r_ww(n) lambda0^{-n},
    whose limit is 1; the undivided value is kept as a diagnostic and the
    result is a ``candidate`` unless it lies within tol of 1.

    Args:
        g: Graph source
        w: Base vertex in NW
        cfg: Truncation configuration
        sources: Vertices to report (default: all vertices of a finite graph,
            the probe window of a generator)

    Returns:
        HarmonicVector at lambda0 with xi_w = 1

    Raises:
        PreconditionError: If the matrix is not known to be recurrent or w is outside NW
    """
    cfg = cfg or TruncationConfig()
    w = g.require_vertex(w)
    if not g.in_nw(w):
        raise PreconditionError(f"Vertex {w} is not in the non-wandering set")
    verdict = classify_recurrence(g, cfg)
    if verdict.verdict != "recurrent":
        raise PreconditionError(f"Matrix is not known to be recurrent ({verdict.verdict}: {verdict.evidence})")
    lam0 = beta0_estimate(g, cfg).lambda0
    if sources is None:
        sources = g.vertices if g.is_finite else g.probe_window(cfg.window_radius)
    sources = [g.require_vertex(v) for v in sources]
    logger.info(f"Recurrent construction at lambda0={format_number(lam0)}, base {w}, depth {cfg.depth}")

    op, column, returns = first_passage_column(g, w, lam0, sources, cfg)
    diagnostic = column[op.index[w]]
    if diagnostic == 0:
        raise PreconditionError(f"No return path to {w} within depth {cfg.depth}")
    values = {v: column[op.index[v]] / diagnostic for v in sources}
    values[w] = one(op.mode)

    converged = within(diagnostic - 1, cfg.tol)
    if not converged:
        logger.warning(f"Return series at {w} is {float(diagnostic):.12g} after depth {cfg.depth}")
    return HarmonicVector(
        lam0,
        values,
        kind="harmonic" if converged else "candidate",
        diagnostics={"return_series": float(diagnostic), "depth": cfg.depth},
    )
