"""Riesz decomposition, potentials and lattice operations on E(A, lambda)."""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from graph_core import (
    EXACT, GraphSource, InvalidVectorError, LocalOperator, NonMonotoneError, Number,
    PreconditionError, SeriesDivergenceError, VertexId, convert, format_number, joint_mode, one,
)
from series import GreenColumns, TruncationConfig, as_lambda

from .config import HarmonicConfig
from .vectors import HarmonicVector, VectorLike, require_almost_harmonic, vector_values

logger = logging.getLogger(__name__)


@dataclass
class RieszPair:
    """psi = phi + k-hat with phi harmonic and k a charge on V_infinity."""

    phi: HarmonicVector
    k: Dict[VertexId, Number]
    lam: Number
    reconstruction_residual: float = 0.0
    steps: int = 0
    converged: bool = False
    exact: bool = False
    diagnostics: Dict[str, float] = field(default_factory=dict)

    def to_records(self) -> List[dict]:
        rows = [
            {"part": "phi", "vertex": v, "value": format_number(x)}
            for v, x in sorted(self.phi.values.items())
        ]
        rows += [{"part": "k", "vertex": u, "value": format_number(x)} for u, x in sorted(self.k.items())]
        return rows


def has_v_infinity(g: GraphSource) -> bool:
    if g.is_finite:
        return bool(g.sinks)
    return bool(g.emitters) or not g.metadata.no_sinks


def default_support(g: GraphSource, cfg: TruncationConfig, extra: Iterable[VertexId] = ()) -> List[VertexId]:
    """Every vertex of a finite graph, the probe window (plus ``extra``) of a generator."""
    if g.is_finite:
        return list(g.vertices)
    window = list(g.probe_window(cfg.window_radius))
    return window + [v for v in extra if v not in set(window)]


def descend(
    g: GraphSource,
    lam,
    values: Mapping[VertexId, Number],
    probe: List[VertexId],
    cfg: TruncationConfig
) -> Tuple[Dict[VertexId, Number], int, bool, bool]:
    """
    Iterate x -> lambda^{-1} A x from ``values`` and return the limit estimate on ``probe``.

    The iterates of an almost harmonic vector are non-increasing; the loop
    stops once the probe entries move by less than tol (relative), or at
    cfg.depth.

    Returns:
        (limit estimate on probe, steps taken, converged flag, exact fixed point reached)

    Raises:
        NonMonotoneError: If an iterate increases beyond tolerance
    """
    mode = joint_mode(g.mode, lam, *values.values())
    inv = one(mode) / convert(lam, mode)
    op = LocalOperator(g, probe, cfg.depth, cfg.row_limit, mode)
    unvalued = [v for v in op.vertices if v not in values]
    if unvalued and not g.is_finite:
        logger.info(f"{len(unvalued)} explored vertices carry no value; estimates are lower bounds")
    x = op.vector({v: convert(val, mode) for v, val in values.items()})
    # Iterating with A restricted to the valued set keeps the sequence monotone
    outside = np.array([v not in values for v in op.vertices], dtype=bool)
    valued = [i for i, v in enumerate(op.vertices) if v in values]
    rows = [op.index[v] for v in probe]
    exact = mode == EXACT and cfg.tol == 0

    steps, converged, settled = 0, False, False
    for steps in range(1, cfg.depth + 1):
        y = op.matvec(x) * inv
        if outside.any():
            y[outside] = convert(0, mode)
        for i in valued:
            slack = 0 if exact else cfg.tol * max(1.0, abs(float(x[i])))
            if y[i] > x[i] + slack:
                raise NonMonotoneError(f"Iterate increased at vertex {op.vertices[i]} (step {steps})")
        gap = max((abs(y[i] - x[i]) for i in rows), default=0)
        scale = max((abs(float(y[i])) for i in rows), default=0.0)
        x = y
        if (gap == 0) if exact else float(gap) <= cfg.tol * max(1.0, scale):
            converged = True
            settled = mode == EXACT and gap == 0
            break
    if not converged:
        logger.warning(f"Monotone iteration not settled after {cfg.depth} steps")
    return {v: x[op.index[v]] for v in probe}, steps, converged, settled


def potential_hat(
    g: GraphSource,
    lam,
    k: Mapping[VertexId, Number],
    cfg: Optional[TruncationConfig] = None,
    support: Optional[Iterable[VertexId]] = None
) -> HarmonicVector:
    """
    Potential k-hat_v = sum_u G(v, u) k_u of a charge k on V_infinity.

    Args:
        g: Graph source
        lam: lambda = e^beta
        k: Non-negative charge supported on V_infinity
        cfg: Truncation configuration
        support: Vertices to evaluate (default: whole finite graph or probe window)

    Returns:
        Almost harmonic vector with strict slack exactly where k > 0

    Raises:
        PreconditionError: If V_infinity is empty and k is non-zero
        InvalidVectorError: If k is negative or charges a vertex outside V_infinity
        SeriesDivergenceError: If a diagonal Green series diverges
    """
    cfg = cfg or TruncationConfig()
    lam = as_lambda(lam)
    if any(x < 0 for x in k.values()):
        raise InvalidVectorError("Charges must be non-negative")
    charge = {g.require_vertex(u): x for u, x in k.items() if x != 0}
    if charge and not has_v_infinity(g):
        raise PreconditionError("V_infinity is empty, so only the zero charge is allowed")
    for u in charge:
        if not g.in_v_infinity(u):
            raise InvalidVectorError(f"Charge at {u}, which is not in V_infinity")
    targets = sorted(charge)
    support = list(support) if support is not None else default_support(g, cfg, targets)
    support = [g.require_vertex(v) for v in support]

    mode = joint_mode(g.mode, lam, *charge.values())
    if not charge:
        return HarmonicVector(convert(lam, mode), {v: convert(0, mode) for v in support},
                              diagnostics={"summability": 0.0})

    columns = GreenColumns(g, targets, lam, support + targets, cfg, track=targets)
    summability = 0.0
    for u in targets:
        est = columns.estimate(u, u)
        if est.diverged:
            raise SeriesDivergenceError(f"G({u},{u}) diverges at lambda={lam}; k is not summable")
        summability += float(est.lower) * float(charge[u])
    values = {v: sum((columns.get(v, u) * charge[u] for u in targets), convert(0, mode)) for v in support}
    logger.info(f"Potential of {len(targets)} charges, summability diagnostic {summability:.6g}")
    return HarmonicVector(convert(lam, mode), values, diagnostics={"summability": summability})


def riesz_decompose(
    g: GraphSource,
    lam,
    psi: VectorLike,
    cfg: Optional[TruncationConfig] = None,
    config: Optional[HarmonicConfig] = None
) -> RieszPair:
    """
    Split an almost harmonic psi into its harmonic part and the potential of a charge.

    phi is the monotone limit of lambda^{-n} A^n psi; the charge is
    k_u = psi_u - lambda^{-1} (A psi)_u on V_infinity.

    Raises:
        InvalidVectorError: If psi is not almost harmonic
        NonMonotoneError: If the iterates increase
    """
    cfg = cfg or TruncationConfig()
    lam = as_lambda(lam)
    values = vector_values(psi)
    require_almost_harmonic(g, lam, values, row_limit=cfg.row_limit, config=config)
    probe = default_support(g, cfg) if g.is_finite else sorted(values)
    mode = joint_mode(g.mode, lam, *values.values())
    inv = one(mode) / convert(lam, mode)

    k: Dict[VertexId, Number] = {}
    for u in probe:
        if not g.in_v_infinity(u):
            continue
        limit = cfg.row_limit if g.is_emitter(u) else None
        flow = sum((convert(a, mode) * values.get(w, 0) for w, a in g.out_edges(u, limit)), convert(0, mode))
        charge = convert(values[u], mode) - inv * flow
        if mode != EXACT and charge < 0:
            charge = 0.0
        if charge != 0:
            k[u] = charge

    phi_values, steps, converged, settled = descend(g, lam, values, probe, cfg)
    phi = HarmonicVector(convert(lam, mode), phi_values, kind="harmonic" if converged else "candidate")
    k_hat = potential_hat(g, lam, k, cfg, support=probe)
    residual = max(
        (abs(float(values[v]) - float(phi_values[v]) - float(k_hat.get(v))) for v in probe),
        default=0.0,
    )
    logger.info(f"Riesz decomposition: {len(k)} charges, reconstruction residual {residual:.3e}")
    return RieszPair(
        phi=phi,
        k=k,
        lam=convert(lam, mode),
        reconstruction_residual=residual,
        steps=steps,
        converged=converged,
        exact=settled and g.is_finite,
        diagnostics={"summability": k_hat.diagnostics.get("summability", 0.0)},
    )


def lattice_meet(
    g: GraphSource,
    lam,
    xi: VectorLike,
    mu: VectorLike,
    cfg: Optional[TruncationConfig] = None,
    config: Optional[HarmonicConfig] = None,
    probe: Optional[Iterable[VertexId]] = None
) -> HarmonicVector:
    """
    Greatest lower bound of xi and mu in E(A, lambda).

    The limit of lambda^{-n} A^n min(xi, mu), which is non-increasing in n.
    """
    cfg = cfg or TruncationConfig()
    lam = as_lambda(lam)
    a, b = vector_values(xi), vector_values(mu)
    for vec in (a, b):
        require_almost_harmonic(g, lam, vec, row_limit=cfg.row_limit, config=config)
    common = set(a) & set(b)
    nu = {v: min(a[v], b[v]) for v in common}
    if probe is None:
        probe = default_support(g, cfg) if g.is_finite else sorted(common)
    probe = list(probe)
    values, steps, converged, _ = descend(g, lam, nu, probe, cfg)
    mode = joint_mode(g.mode, lam, *values.values())
    return HarmonicVector(
        convert(lam, mode), values, kind="almost_harmonic" if converged else "candidate",
        diagnostics={"steps": steps},
    )


def lattice_join(
    g: GraphSource,
    lam,
    xi: VectorLike,
    mu: VectorLike,
    cfg: Optional[TruncationConfig] = None,
    config: Optional[HarmonicConfig] = None,
    probe: Optional[Iterable[VertexId]] = None
) -> HarmonicVector:
    """Least upper bound xi + mu - (xi meet mu)."""
    meet = lattice_meet(g, lam, xi, mu, cfg, config, probe)
    a, b = vector_values(xi), vector_values(mu)
    values = {v: a[v] + b[v] - m for v, m in meet.values.items()}
    zero = convert(0, joint_mode(g.mode, meet.lam, *values.values()))
    values = {v: max(x, zero) for v, x in values.items()}
    return HarmonicVector(meet.lam, values, kind=meet.kind, diagnostics=dict(meet.diagnostics))
