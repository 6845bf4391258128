"""Critical value beta0, recurrence classification and the Vere-Jones identity check."""

import logging
import math
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from graph_core import (
    EXACT, FLOAT, FiniteGraph, GraphSource, PreconditionError, VertexId, convert, joint_mode, one,
)

from .config import TruncationConfig
from .estimates import Beta0Report, RecurrenceVerdict, as_lambda
from .powers import _operator, _row_terms, green_series

logger = logging.getLogger(__name__)


def _require_nonempty_nw(g: GraphSource):
    if g.nw_kind == "empty":
        raise PreconditionError("beta0 undefined: the non-wandering set is empty")


def _nw_matrix(g: FiniteGraph, nw: Sequence[VertexId], mode: str) -> List[list]:
    index = {v: i for i, v in enumerate(nw)}
    rows = [[convert(0, mode)] * len(nw) for _ in nw]
    for v in nw:
        for w, weight in g.out_edges(v):
            j = index.get(w)
            if j is not None:
                rows[index[v]][j] = convert(weight, mode)
    return rows


def is_exactly_singular(matrix: List[List[Fraction]]) -> bool:
    """Rank test by Gaussian elimination over the rationals."""
    m = [list(row) for row in matrix]
    n = len(m)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return True
        m[col], m[pivot] = m[pivot], m[col]
        for r in range(col + 1, n):
            factor = m[r][col] / m[col][col]
            if factor:
                for c in range(col, n):
                    m[r][c] -= factor * m[col][c]
    return False


def _recover_rational(g: FiniteGraph, nw: Sequence[VertexId], estimate: float,
                      cfg: TruncationConfig) -> Optional[Fraction]:
    candidate = Fraction(estimate).limit_denominator(cfg.max_denominator)
    if abs(float(candidate) - estimate) > max(cfg.tol, 1e-12) * max(1.0, estimate):
        return None
    shifted = _nw_matrix(g, nw, EXACT)
    for i in range(len(nw)):
        shifted[i][i] -= candidate
    return candidate if is_exactly_singular(shifted) else None


def _finite_beta0(g: FiniteGraph, cfg: TruncationConfig) -> Beta0Report:
    nw = sorted(g.nw)
    A = np.array(_nw_matrix(g, nw, FLOAT), dtype=float)
    # A + I is primitive on each strongly connected block, so the iterates
    # converge to a Perron vector of A
    B = A + np.eye(len(nw))
    x = np.ones(len(nw))
    lower = upper = 0.0
    converged = False
    for iteration in range(1, cfg.power_iterations + 1):
        ratios = (A @ x) / x
        lower, upper = float(ratios.min()), float(ratios.max())
        if upper - lower <= cfg.tol * max(1.0, upper):
            converged = True
            break
        y = B @ x
        x = y / y.max()
    logger.debug(f"Power iteration stopped after {iteration} steps: [{lower}, {upper}]")

    exact = None
    if g.mode == EXACT:
        exact = _recover_rational(g, nw, (lower + upper) / 2, cfg)
    if exact is not None:
        lower = min(lower, float(exact))
        upper = max(upper, float(exact))
        method = "power iteration with Collatz-Wielandt bounds; exact rational root"
    else:
        method = "power iteration with Collatz-Wielandt bounds"
    return Beta0Report(
        mode="exact" if converged or exact is not None else "bounds",
        lambda0_lower=lower,
        lambda0_upper=upper,
        witness_vertex=nw[0],
        method=method,
        lambda0_exact=exact,
    )


def diagonal_growth(g: GraphSource, v: VertexId, cfg: TruncationConfig) -> float:
    """
    sup_{1<=n<=depth} (A^n_{vv})^{1/n}, computed with rescaled iterates.

    A^{m+n}_{vv} >= A^m_{vv} A^n_{vv}, so the supremum is a lower bound of
    the limsup.
    """
    op = _operator(g, [v], cfg.depth, cfg, FLOAT)
    i = op.index[v]
    x = op.unit(v)
    log_scale, best = 0.0, -math.inf
    for n in range(1, cfg.depth + 1):
        x = op.rmatvec(x)
        peak = float(x.max())
        if peak == 0:
            break
        x = x / peak
        log_scale += math.log(peak)
        if x[i] > 0:
            best = max(best, (math.log(x[i]) + log_scale) / n)
    return math.exp(best) if best > -math.inf else 0.0


def beta0_estimate(g: GraphSource, cfg: Optional[TruncationConfig] = None) -> Beta0Report:
    """
    Bounds on lambda0 = e^{beta0}.

    Finite graphs use the spectral radius of A restricted to NW; generators
    give the diagonal growth lower bound at the declared witness and an upper
    bound only from a registered closed form.

    Args:
        g: Graph source
        cfg: Truncation configuration

    Returns:
        Beta0Report

    Raises:
        PreconditionError: If NW is empty
    """
    cfg = cfg or TruncationConfig()
    _require_nonempty_nw(g)
    if g.is_finite:
        report = _finite_beta0(g, cfg)
    else:
        witness = g.metadata.witness
        if witness is None or not g.in_nw(witness):
            raise PreconditionError(f"{g.description}: no declared witness vertex in NW")
        lower = diagonal_growth(g, witness, cfg)
        closed = g.family.lambda0(g.params) if cfg.use_closed_forms else None
        if closed is not None:
            lower = min(lower, closed)
            tight = closed - lower <= cfg.tol * max(1.0, closed)
            report = Beta0Report(
                mode="exact" if tight else "bounds",
                lambda0_lower=lower,
                lambda0_upper=closed,
                witness_vertex=witness,
                method=f"diagonal growth to depth {cfg.depth}; closed form for {g.family.name}",
                closed_form=True,
            )
        else:
            report = Beta0Report(
                mode="bounds",
                lambda0_lower=lower,
                lambda0_upper=None,
                witness_vertex=witness,
                method=f"diagonal growth to depth {cfg.depth}",
            )
    logger.info(f"beta0 report for {g.description}: {report.mode}, lambda0 ~ {float(report.lambda0):.12g}")
    return report


def classify_recurrence(g: GraphSource, cfg: Optional[TruncationConfig] = None) -> RecurrenceVerdict:
    """
    Decide whether A is recurrent, i.e. sum_n A^n_{vv} lambda0^{-n} diverges.

    Finite NW is recurrent without computation. Otherwise a registered closed
    form decides; failing that a certified finite upper bound means transient
    and anything else is unknown.
    """
    cfg = cfg or TruncationConfig()
    _require_nonempty_nw(g)
    if g.nw_kind == "finite":
        return RecurrenceVerdict(
            verdict="recurrent",
            partial_sum=None,
            evidence="finite non-wandering set",
            rule="finite-nonwandering",
        )

    report = beta0_estimate(g, cfg)
    lam0 = report.lambda0
    w = report.witness_vertex
    est = green_series(g, w, w, lam0, cfg)
    partial = float(est.lower)

    if cfg.use_closed_forms:
        closed = g.family.diagonal_green(g.params, float(lam0))
        if closed is not None:
            verdict = "recurrent" if math.isinf(closed) else "transient"
            return RecurrenceVerdict(
                verdict=verdict,
                partial_sum=partial,
                evidence=f"closed form G({w},{w}) = {closed} at lambda0 = {float(lam0):.12g}",
                rule="closed-form",
                lambda0=lam0,
            )

    # lam0 never exceeds the true critical value here, so an upper bound carries over
    if est.upper is not None:
        return RecurrenceVerdict(
            verdict="transient",
            partial_sum=partial,
            evidence=f"certified upper bound {float(est.upper):.12g} on the diagonal series",
            rule="series-upper-bound",
            lambda0=lam0,
        )

    flag = " (divergence heuristic fired)" if est.diverged else ""
    logger.warning(f"Recurrence of {g.description} undecided{flag}")
    return RecurrenceVerdict(
        verdict="unknown",
        partial_sum=partial,
        evidence=f"partial sum {partial:.12g} to depth {cfg.depth}{flag}",
        rule="undecided",
        lambda0=lam0,
    )


def vere_jones_residual(
    g: GraphSource,
    v: VertexId,
    w: VertexId,
    lam,
    cfg: Optional[TruncationConfig] = None,
    product: str = "cauchy"
) -> float:
    """
    Residual of G(v, w) = I_{vw} + F(v, w) G(w, w) at a common truncation depth.

    With ``product="cauchy"`` F G is the Cauchy product truncated at cfg.depth,
    so on exact graphs the residual vanishes at every depth. ``product="full"``
    multiplies the two truncated sums instead; that residual carries the
    truncation error of both series and shrinks to 0 only as the depth grows.

    Args:
        g: Graph source
        v: Source vertex in NW
        w: Target vertex in NW
        lam: lambda > lambda0
        cfg: Truncation configuration
        product: ``cauchy`` or ``full``

    Returns:
        |LHS - I_{vw} - (F * G)| as a float

    Raises:
        PreconditionError: If v or w is outside NW or lambda <= lambda0
        ValueError: If the product kind is unknown
    """
    cfg = cfg or TruncationConfig()
    if product not in ("cauchy", "full"):
        raise ValueError(f"Unknown product kind: {product}")
    lam = as_lambda(lam)
    for u in (v, w):
        if not g.in_nw(u):
            raise PreconditionError(f"Vertex {u} is not in the non-wandering set")
    report = beta0_estimate(g, cfg)
    if float(lam) <= report.lambda0_lower or (report.mode == "exact" and not lam > report.lambda0):
        raise PreconditionError(f"lambda={lam} must exceed lambda0={float(report.lambda0):.12g}")
    if report.lambda0_upper is not None and float(lam) <= report.lambda0_upper:
        logger.warning(f"lambda={lam} lies inside the lambda0 bracket; identity may not apply")

    mode = joint_mode(g.mode, lam)
    inv = one(mode) / convert(lam, mode)
    zero = convert(0, mode)
    op = _operator(g, [v, w], cfg.depth, cfg, mode)
    lhs, _ = _row_terms(op, v, w, inv, cfg.depth)
    diag, _ = _row_terms(op, w, w, inv, cfg.depth)
    passage, _ = _row_terms(op, v, w, inv, cfg.depth, taboo=True)

    if product == "full":
        total = sum(passage[1:], zero) * sum(diag[1:], diag[0])
    else:
        total = sum(
            (passage[m] * diag[n - m] for n in range(1, cfg.depth + 1) for m in range(1, n + 1)), zero
        )
    identity = one(mode) if v == w else zero
    residual = abs(sum(lhs[1:], lhs[0]) - identity - total)
    logger.debug(f"Vere-Jones residual ({product}) at ({v},{w}), lambda={lam}: {float(residual):.3e}")
    return float(residual)
