"""Doob h-transform of A by a harmonic vector and the induced path measures."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from graph_core import (
    EXACT, GraphSource, InvalidVectorError, Number, SubStochasticRowError, VertexId, convert,
    format_number, joint_mode, one,
)
from harmonic import HarmonicVector, default_probe, vector_values

from .config import MartinConfig

logger = logging.getLogger(__name__)


@dataclass
class StochasticKernel:
    """Transition probabilities B_vw = lambda^{-1} psi_v^{-1} A_vw psi_w."""

    graph: GraphSource
    lam: Number
    psi: HarmonicVector
    rows: Dict[VertexId, List[Tuple[VertexId, Number]]] = field(default_factory=dict)
    mode: str = "float"

    def row(self, v: VertexId) -> List[Tuple[VertexId, Number]]:
        try:
            return self.rows[v]
        except KeyError:
            raise SubStochasticRowError(
                f"No transition row at {v}; psi does not cover its neighborhood", vertex=v
            ) from None

    def probability(self, v: VertexId, w: VertexId) -> Number:
        return next((p for x, p in self.row(v) if x == w), convert(0, self.mode))

    def to_records(self) -> List[dict]:
        return [
            {"from": v, "to": w, "probability": format_number(p)}
            for v, row in sorted(self.rows.items())
            for w, p in row
        ]


def h_transform(
    g: GraphSource,
    lam,
    psi: HarmonicVector,
    row_limit: int = 64,
    config: Optional[MartinConfig] = None
) -> StochasticKernel:
    """
    Stochastic kernel of the h-transform by a strictly positive harmonic psi.

    Rows are built for every vertex whose out-neighborhood psi covers and
    must sum to 1 (exactly in exact mode, within row_tol otherwise).

    Raises:
        InvalidVectorError: If psi is not strictly positive
        SubStochasticRowError: If a row does not sum to 1 (psi not harmonic there)
    """
    config = config or MartinConfig()
    values = vector_values(psi)
    if any(x <= 0 for x in values.values()):
        raise InvalidVectorError("psi must be strictly positive")
    mode = joint_mode(g.mode, lam, *values.values())
    inv = one(mode) / convert(lam, mode)
    values = {v: convert(x, mode) for v, x in values.items()}

    rows: Dict[VertexId, List[Tuple[VertexId, Number]]] = {}
    for v in default_probe(g, values, row_limit):
        limit = row_limit if g.is_emitter(v) else None
        scale = inv / values[v]
        row = [(w, scale * convert(a, mode) * values[w]) for w, a in g.out_edges(v, limit) if w in values]
        total = sum((p for _, p in row), convert(0, mode))
        ok = total == 1 if mode == EXACT else abs(float(total) - 1.0) <= config.row_tol
        if not ok:
            raise SubStochasticRowError(f"Row of {v} sums to {format_number(total)}", vertex=v)
        rows[v] = row
    logger.info(f"h-transform with {len(rows)} rows")
    return StochasticKernel(graph=g, lam=convert(lam, mode), psi=psi, rows=rows, mode=mode)


def cylinder_measure(
    g: GraphSource,
    lam,
    psi: HarmonicVector,
    path: Sequence[VertexId],
    row_limit: int = 1024
) -> Tuple[Number, Number]:
    """
    Measure of the cylinder of a finite path.

    Returns:
        (m_psi, m_{v1}) where m_psi(C(v1...vn)) = A_{v1v2}...A_{v(n-1)vn}
        lambda^{-(n-1)} psi_{vn} and m_{v1} = m_psi / psi_{v1}
    """
    if not path:
        raise ValueError("Empty path")
    values = vector_values(psi)
    mode = joint_mode(g.mode, lam, *values.values())
    inv = one(mode) / convert(lam, mode)
    weight = one(mode)
    for v, w in zip(path, path[1:]):
        limit = row_limit if g.is_emitter(v) else None
        a = next((x for u, x in g.out_edges(v, limit) if u == w), None)
        weight = weight * convert(a or 0, mode) * inv
    measure = weight * convert(values.get(path[-1], 0), mode)
    return measure, measure / convert(values[path[0]], mode)
