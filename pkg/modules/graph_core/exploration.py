"""Finite sections of the matrix A explored around source vertices."""

import logging
from collections import deque
from itertools import islice
from typing import Dict, Iterable, List, Optional, Set, Tuple

import numpy as np
import scipy.sparse as sp

from .arithmetic import EXACT, Number, one, zeros
from .graph import GraphSource, VertexId

logger = logging.getLogger(__name__)


class LocalOperator:
    """
    Restriction of A to the ball of given radius around a set of sources.

    Every path of length at most ``radius`` that starts at a source stays in
    the ball and only uses rows of vertices at distance < radius, which are
    stored in full (up to the emitter row limit). Powers A^n applied along
    such paths are therefore exact for n <= radius. Finite graphs are always
    loaded completely.
    """

    def __init__(
        self,
        g: GraphSource,
        sources: Iterable[VertexId],
        radius: int,
        row_limit: int,
        mode: Optional[str] = None
    ):
        """
        Explore the ball and assemble the local matrix.

        Args:
            g: Graph source
            sources: Vertices the ball is centred on
            radius: Maximal path length that must be represented exactly
            row_limit: Maximal number of edges enumerated per infinite row
            mode: Arithmetic mode (defaults to the graph's mode)
        """
        self.mode = mode or g.mode
        self.graph = g.to_mode(self.mode)
        self.radius = radius
        self.row_limit = row_limit
        self.truncated_rows: Set[VertexId] = set()

        sources = [g.require_vertex(v) for v in sources]
        if g.is_finite:
            self.vertices: List[VertexId] = list(g.vertices)
            expand = set(self.vertices)
        else:
            self.vertices, expand = self._explore(sources)
        self.index: Dict[VertexId, int] = {v: i for i, v in enumerate(self.vertices)}

        self.rows: List[List[Tuple[int, Number]]] = [[] for _ in self.vertices]
        for v in expand:
            i = self.index[v]
            row = self.rows[i]
            for w, weight in self._row(v):
                j = self.index.get(w)
                if j is not None:
                    row.append((j, weight))

        if self.mode != EXACT:
            data, rows, cols = [], [], []
            for i, row in enumerate(self.rows):
                for j, weight in row:
                    rows.append(i)
                    cols.append(j)
                    data.append(float(weight))
            n = len(self.vertices)
            self.matrix = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
            self.matrix_t = self.matrix.T.tocsr()
        logger.debug(
            f"Local operator: {len(self.vertices)} vertices, radius {radius}, "
            f"{len(self.truncated_rows)} truncated rows"
        )

    def _row(self, v: VertexId) -> List[Tuple[VertexId, Number]]:
        if self.graph.is_finite:
            return list(self.graph.out_edges(v))
        row = list(islice(self.graph.out_edges(v), self.row_limit + 1))
        if len(row) > self.row_limit:
            self.truncated_rows.add(v)
            row = row[:self.row_limit]
        return row

    def _explore(self, sources: List[VertexId]) -> Tuple[List[VertexId], Set[VertexId]]:
        order, dist = [], {}
        queue = deque()
        for v in sources:
            if v not in dist:
                dist[v] = 0
                order.append(v)
                queue.append(v)
        expand = set()
        while queue:
            v = queue.popleft()
            if dist[v] >= self.radius:
                continue
            expand.add(v)
            for w, _ in self._row(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    order.append(w)
                    queue.append(w)
        return order, expand

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def truncated(self) -> bool:
        """Whether some emitter row was cut at the row limit."""
        return bool(self.truncated_rows)

    def __contains__(self, v: VertexId) -> bool:
        return v in self.index

    def unit(self, v: VertexId) -> np.ndarray:
        x = zeros(self.n, self.mode)
        x[self.index[v]] = one(self.mode)
        return x

    def vector(self, values: Dict[VertexId, Number]) -> np.ndarray:
        """Embed a vertex map; vertices outside the ball are dropped."""
        x = zeros(self.n, self.mode)
        for v, value in values.items():
            i = self.index.get(v)
            if i is not None:
                x[i] = value
        return x

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Column action (A x)_v = sum_w A_vw x_w; accepts 2-D blocks in float mode."""
        if self.mode != EXACT:
            return self.matrix @ x
        out = zeros(self.n, self.mode)
        for i, row in enumerate(self.rows):
            if row:
                out[i] = sum(weight * x[j] for j, weight in row)
        return out

    def rmatvec(self, x: np.ndarray) -> np.ndarray:
        """Row action (x A)_w = sum_v x_v A_vw."""
        if self.mode != EXACT:
            return self.matrix_t @ x
        out = zeros(self.n, self.mode)
        for i, row in enumerate(self.rows):
            xi = x[i]
            if xi:
                for j, weight in row:
                    out[j] += xi * weight
        return out
