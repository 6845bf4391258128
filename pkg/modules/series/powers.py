"""Matrix powers, Green series and first-passage series on local operators."""

import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from graph_core import (
    EXACT, GraphSource, LocalOperator, Number, VertexId, convert, joint_mode, one, zero, zeros,
)

from .config import TruncationConfig
from .estimates import SeriesEstimate, as_lambda, summarize_terms

logger = logging.getLogger(__name__)


def is_zero_vector(x: np.ndarray) -> bool:
    return not np.any(x != 0)


def _operator(
    g: GraphSource,
    sources: Iterable[VertexId],
    radius: int,
    cfg: TruncationConfig,
    mode: str
) -> LocalOperator:
    op = LocalOperator(g, sources, radius, cfg.row_limit, mode)
    if op.truncated:
        logger.warning(
            f"{len(op.truncated_rows)} emitter rows truncated at {cfg.row_limit} edges; "
            f"results are lower bounds"
        )
    return op


def power_entry(
    g: GraphSource,
    v: VertexId,
    w: VertexId,
    n: int,
    cfg: Optional[TruncationConfig] = None
) -> SeriesEstimate:
    """
    A^n_{vw} by forward dynamic programming from v.

    Args:
        g: Graph source
        v: Row vertex
        w: Column vertex
        n: Exponent (A^0 is the identity)
        cfg: Truncation configuration (row_limit applies to emitters)

    Returns:
        SeriesEstimate whose lower bound is the computed entry; exact unless
        an emitter row was truncated
    """
    cfg = cfg or TruncationConfig()
    if n < 0:
        raise ValueError("n must be non-negative")
    g.require_vertex(v)
    g.require_vertex(w)
    op = _operator(g, [v], n, cfg, g.mode)
    x = op.unit(v)
    for _ in range(n):
        x = op.rmatvec(x)
    value = x[op.index[w]] if w in op else zero(op.mode)
    complete = not op.truncated
    return SeriesEstimate(
        lower=value,
        upper=value if complete else None,
        partial_terms=[value],
        converged=True,
        certainty="exact" if complete else "lower-bound",
    )


def power_sequence(
    g: GraphSource,
    v: VertexId,
    w: VertexId,
    depth: int,
    cfg: Optional[TruncationConfig] = None
) -> List[Number]:
    """A^n_{vw} for n = 0..depth in the graph's arithmetic mode."""
    cfg = cfg or TruncationConfig()
    g.require_vertex(w)
    op = _operator(g, [v], depth, cfg, g.mode)
    terms, _ = _row_terms(op, v, w, one(op.mode), depth)
    return terms


def _row_terms(
    op: LocalOperator,
    v: VertexId,
    w: VertexId,
    scale: Number,
    steps: int,
    taboo: bool = False
) -> Tuple[List[Number], bool]:
    """
    Terms (e_v (A/lambda)^n)_w for n = 0..steps.

    With ``taboo`` the mass arriving at w is recorded and removed after every
    step, which yields first-passage terms (index 0 is always 0). The flag
    returned tells whether the iterate vanished before ``steps``.
    """
    j = op.index.get(w)
    nil = zero(op.mode)
    x = op.unit(v)
    terms = [nil if taboo else (x[j] if j is not None else nil)]
    for n in range(1, steps + 1):
        x = op.rmatvec(x) * scale
        if j is None:
            terms.append(nil)
        else:
            terms.append(x[j])
            if taboo:
                x[j] = nil
        if is_zero_vector(x):
            terms.extend([nil] * (steps - n))
            return terms, True
    return terms, False


def green_series(
    g: GraphSource,
    v: VertexId,
    w: VertexId,
    lam,
    cfg: Optional[TruncationConfig] = None
) -> SeriesEstimate:
    """
    Green series G(v, w) = sum_n A^n_{vw} lambda^{-n} truncated at cfg.depth.

    Args:
        g: Graph source
        v: Source vertex
        w: Target vertex
        lam: lambda = e^beta
        cfg: Truncation configuration

    Returns:
        SeriesEstimate; ``upper`` when the iterate vanishes or a tail ratio
        bound is configured, ``diverged`` when the divergence heuristic fires
    """
    cfg = cfg or TruncationConfig()
    lam = as_lambda(lam)
    g.require_vertex(v)
    g.require_vertex(w)
    mode = joint_mode(g.mode, lam)
    lam = convert(lam, mode)
    logger.debug(f"Green series G({v},{w}) at lambda={lam}, depth {cfg.depth}")

    op = _operator(g, [v], cfg.depth, cfg, mode)
    terms, exhausted = _row_terms(op, v, w, one(mode) / lam, cfg.depth)
    return summarize_terms(terms, cfg, exhausted=exhausted, complete=not op.truncated)


def first_passage(
    g: GraphSource,
    v: VertexId,
    w: VertexId,
    n: int,
    cfg: Optional[TruncationConfig] = None
) -> Number:
    """
    First-passage weight r_{vw}(n) of length-n paths from v reaching w only at the end.

    r_{vw}(0) = 0 and r_{vw}(1) = A_{vw}. Exact on finite graphs, a lower
    bound when emitter rows are truncated.
    """
    cfg = cfg or TruncationConfig()
    if n < 0:
        raise ValueError("n must be non-negative")
    g.require_vertex(v)
    g.require_vertex(w)
    op = _operator(g, [v], n, cfg, g.mode)
    terms, _ = _row_terms(op, v, w, one(op.mode), n, taboo=True)
    return terms[n]


def first_passage_series(
    g: GraphSource,
    v: VertexId,
    w: VertexId,
    lam,
    cfg: Optional[TruncationConfig] = None
) -> SeriesEstimate:
    """sum_{n>=1} r_{vw}(n) lambda^{-n} truncated at cfg.depth."""
    cfg = cfg or TruncationConfig()
    lam = as_lambda(lam)
    g.require_vertex(v)
    g.require_vertex(w)
    mode = joint_mode(g.mode, lam)
    lam = convert(lam, mode)
    op = _operator(g, [v], cfg.depth, cfg, mode)
    terms, exhausted = _row_terms(op, v, w, one(mode) / lam, cfg.depth, taboo=True)
    return summarize_terms(terms, cfg, exhausted=exhausted, complete=not op.truncated)


class GreenColumns:
    """
    Truncated Green series G(u, w) for a batch of targets w.

    Columns are accumulated with the column recursion
    x_{n+1} = lambda^{-1} A x_n started at the unit vectors e_w, so each
    column holds G(u, w) for every u of the explored ball. Entries are exact
    truncations for the ball's source vertices.
    """

    def __init__(
        self,
        g: GraphSource,
        targets: Sequence[VertexId],
        lam,
        sources: Iterable[VertexId],
        cfg: Optional[TruncationConfig] = None,
        track: Iterable[VertexId] = ()
    ):
        """
        Run the column recursion.

        Args:
            g: Graph source
            targets: Target vertices w (one column each)
            lam: lambda = e^beta
            sources: Vertices whose rows must be exact
            cfg: Truncation configuration
            track: Source vertices whose per-step terms are kept, so that a
                SeriesEstimate can be produced for them
        """
        self.cfg = cfg or TruncationConfig()
        lam = as_lambda(lam)
        self.targets = [g.require_vertex(w) for w in targets]
        self.mode = joint_mode(g.mode, lam)
        self.lam = convert(lam, self.mode)
        sources = [g.require_vertex(v) for v in sources]
        self.op = _operator(g, sources, self.cfg.depth, self.cfg, self.mode)
        self.column = {w: k for k, w in enumerate(self.targets)}

        tracked = list(dict.fromkeys(u for u in track if u in self.op))
        self._terms: Dict[VertexId, List[List[Number]]] = {u: [] for u in tracked}
        self.exhausted = False
        self.values = self._run(tracked)

    def _run(self, tracked: List[VertexId]) -> np.ndarray:
        op, k = self.op, len(self.targets)
        inv = one(self.mode) / self.lam
        if self.mode == EXACT:
            x = np.empty((op.n, k), dtype=object)
            for c in range(k):
                x[:, c] = zeros(op.n, EXACT)
        else:
            x = np.zeros((op.n, k))
        for c, w in enumerate(self.targets):
            if w in op:
                x[op.index[w], c] = one(self.mode)
        acc = x.copy()
        self._record(tracked, x)

        for n in range(1, self.cfg.depth + 1):
            if self.mode == EXACT:
                x = np.column_stack([op.matvec(x[:, c]) * inv for c in range(k)]) if k else x
            else:
                x = op.matvec(x) * inv
            acc = acc + x
            self._record(tracked, x)
            if is_zero_vector(x):
                self.exhausted = True
                for u in tracked:
                    self._terms[u].extend([[zero(self.mode)] * k] * (self.cfg.depth - n))
                break
        return acc

    def _record(self, tracked: List[VertexId], x: np.ndarray):
        for u in tracked:
            self._terms[u].append(list(x[self.op.index[u], :]))

    def __contains__(self, v: VertexId) -> bool:
        return v in self.op

    def get(self, v: VertexId, w: VertexId) -> Number:
        """G(v, w); zero when v lies outside the explored ball."""
        i = self.op.index.get(v)
        if i is None:
            return zero(self.mode)
        return self.values[i, self.column[w]]

    def column_map(self, w: VertexId) -> Dict[VertexId, Number]:
        """Non-zero entries of the column G(., w) over the ball."""
        c = self.column[w]
        return {u: self.values[i, c] for u, i in self.op.index.items() if self.values[i, c] != 0}

    def estimate(self, v: VertexId, w: VertexId) -> SeriesEstimate:
        """SeriesEstimate for a tracked source vertex v."""
        if v not in self._terms:
            raise KeyError(f"Vertex {v} was not tracked")
        c = self.column[w]
        terms = [row[c] for row in self._terms[v]]
        return summarize_terms(terms, self.cfg, exhausted=self.exhausted, complete=not self.op.truncated)


def green_column(
    g: GraphSource,
    targets: Sequence[VertexId],
    lam,
    sources: Iterable[VertexId],
    cfg: Optional[TruncationConfig] = None
) -> GreenColumns:
    """Batched Green series G(., w) for many targets at once."""
    return GreenColumns(g, targets, lam, sources, cfg, track=sources)


def first_passage_column(
    g: GraphSource,
    w: VertexId,
    lam,
    sources: Iterable[VertexId],
    cfg: Optional[TruncationConfig] = None
) -> Tuple[LocalOperator, np.ndarray, List[Number]]:
    """
    Truncated first-passage series F(u, w) = sum_{n>=1} r_{uw}(n) lambda^{-n} for all u of a ball.

    Uses the taboo column recursion R_1 = lambda^{-1} A e_w,
    R_{n+1} = lambda^{-1} A (R_n with the w entry cleared).

    Returns:
        Local operator, accumulated column and the per-step terms at w
        (the return series r_{ww}(n) lambda^{-n})
    """
    cfg = cfg or TruncationConfig()
    lam = as_lambda(lam)
    w = g.require_vertex(w)
    mode = joint_mode(g.mode, lam)
    inv = one(mode) / convert(lam, mode)
    op = _operator(g, list(sources) + [w], cfg.depth, cfg, mode)
    j = op.index[w]
    nil = zero(mode)

    r = op.matvec(op.unit(w)) * inv
    acc = r.copy()
    returns = [nil, r[j]]
    for _ in range(2, cfg.depth + 1):
        r[j] = nil
        if is_zero_vector(r):
            break
        r = op.matvec(r) * inv
        acc = acc + r
        returns.append(r[j])
    return op, acc, returns
