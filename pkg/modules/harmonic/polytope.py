"""Extreme points of the finite-graph solution polytope by the double-description method."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from graph_core import (
    EXACT, FiniteGraph, Number, VertexId, as_vector, convert, format_number, is_cofinal, joint_mode,
)

from .config import HarmonicConfig
from .vectors import HarmonicVector

logger = logging.getLogger(__name__)


@dataclass
class ConeDescription:
    """Extreme points of {xi in E(A, lambda) : xi_{v0} = 1} on a finite graph."""

    base_vertex: VertexId
    lam: Number
    extreme_points: List[HarmonicVector] = field(default_factory=list)
    unbounded_rays: int = 0

    @property
    def labels(self) -> List[str]:
        return [p.label for p in self.extreme_points]

    @property
    def is_empty(self) -> bool:
        return not self.extreme_points

    def to_records(self) -> List[dict]:
        return [
            {"point": i, "label": p.label, "vertex": v, "value": format_number(x)}
            for i, p in enumerate(self.extreme_points)
            for v, x in sorted(p.values.items())
        ]


class DoubleDescription:
    """
    Extreme rays of {x >= 0, E x = 0, I x >= 0} in R^n.

    Starts from the non-negative orthant (rays e_i) and intersects one
    constraint at a time. Two rays are combined only when they are adjacent,
    tested combinatorially: no third ray is tight on every inequality tight
    at both.
    """

    def __init__(self, n: int, mode: str, tol: float = 1e-9):
        self.n = n
        self.mode = mode
        self.tol = 0.0 if mode == EXACT else tol
        self.rays: List[np.ndarray] = []
        for i in range(n):
            e = as_vector([0] * n, mode)
            e[i] = convert(1, mode)
            self.rays.append(e)
        # Inequality rows processed so far; the orthant rows are implicit
        self.inequalities: List[np.ndarray] = []

    def is_zero(self, value: Number, scale: float = 1.0) -> bool:
        if self.tol == 0:
            return value == 0
        return abs(float(value)) <= self.tol * max(1.0, scale)

    def _zero_set(self, r: np.ndarray) -> frozenset:
        tight = {i for i in range(self.n) if self.is_zero(r[i])}
        for k, a in enumerate(self.inequalities):
            if self.is_zero(np.dot(a, r), float(np.abs(a.astype(float)).sum())):
                tight.add(self.n + k)
        return frozenset(tight)

    def _normalize(self, r: np.ndarray) -> np.ndarray:
        if self.mode != EXACT:
            r = np.where(np.abs(r) <= self.tol, 0.0, r)
        peak = max(r)
        return r / peak

    def _adjacent(self, i: int, j: int, zero_sets: Sequence[frozenset]) -> bool:
        common = zero_sets[i] & zero_sets[j]
        return not any(
            k != i and k != j and common <= zero_sets[k] for k in range(len(zero_sets))
        )

    def add(self, a: Sequence[Number], equality: bool):
        """Intersect the current cone with a.x >= 0 (or a.x = 0)."""
        a = as_vector(a, self.mode)
        scale = float(np.abs(a.astype(float)).sum())
        products = [np.dot(a, r) for r in self.rays]
        plus, zero, minus = [], [], []
        for k, p in enumerate(products):
            if self.is_zero(p, scale):
                zero.append(k)
            elif p > 0:
                plus.append(k)
            else:
                minus.append(k)

        zero_sets = [self._zero_set(r) for r in self.rays]
        combined = []
        for i in plus:
            for j in minus:
                if self._adjacent(i, j, zero_sets):
                    r = products[i] * self.rays[j] - products[j] * self.rays[i]
                    combined.append(self._normalize(r))

        keep = zero if equality else plus + zero
        self.rays = self._deduplicate([self.rays[k] for k in keep] + combined)
        if not equality:
            self.inequalities.append(a)
        logger.debug(
            f"DD step ({'=' if equality else '>='}): +{len(plus)} 0{len(zero)} -{len(minus)} "
            f"-> {len(self.rays)} rays"
        )

    def _deduplicate(self, rays: List[np.ndarray]) -> List[np.ndarray]:
        out: List[np.ndarray] = []
        for r in rays:
            if not any(self._same(r, s) for s in out):
                out.append(r)
        return out

    def _same(self, r: np.ndarray, s: np.ndarray) -> bool:
        if self.tol == 0:
            return all(x == y for x, y in zip(r, s))
        return bool(np.all(np.abs(r.astype(float) - s.astype(float)) <= self.tol))


def constraint_rows(g: FiniteGraph, lam: Number, mode: str) -> Tuple[List[VertexId], List[list]]:
    """
    Rows of the homogeneous system defining the cone E(A, lambda) plus zero.

    Non-sinks give equalities sum_w A_vw x_w - lambda x_v = 0; sinks give
    lambda x_s >= 0, which the orthant already implies, so they are omitted.
    """
    vertices = list(g.vertices)
    index = {v: i for i, v in enumerate(vertices)}
    lam = convert(lam, mode)
    equalities = []
    for v in vertices:
        if g.is_sink(v):
            continue
        row = [convert(0, mode)] * len(vertices)
        for w, weight in g.out_edges(v):
            row[index[w]] += convert(weight, mode)
        row[index[v]] -= lam
        equalities.append(row)
    return vertices, equalities


def _label(g: FiniteGraph, values) -> str:
    charged = [s for s in g.sinks if values[s] > 0]
    if not charged:
        return "harmonic"
    return "sink(" + ",".join(charged) + ")"


def solve_finite(
    g: FiniteGraph,
    lam,
    v0: VertexId,
    config: Optional[HarmonicConfig] = None
) -> ConeDescription:
    """
    Enumerate the extreme points of the normalized solution set on a finite graph.

    The polytope is {xi >= 0, xi_{v0} = 1, sum_w A_vw xi_w = lambda xi_v off
    sinks}; sinks carry no constraint beyond positivity.

    Args:
        g: Finite graph
        lam: lambda = e^beta
        v0: Normalization vertex
        config: Harmonic configuration (float zero tolerance)

    Returns:
        ConeDescription with points sorted lexicographically by value vector
    """
    config = config or HarmonicConfig()
    g.require_vertex(v0)
    if not g.is_finite:
        raise TypeError("solve_finite needs a finite graph")
    if not is_cofinal(g).holds:
        logger.warning(f"{g.description} is not cofinal; enumerating anyway")
    mode = joint_mode(g.mode, lam)
    lam = convert(lam, mode)
    logger.info(f"Solving cone of {g.description} at lambda={format_number(lam)}, v0={v0}")

    vertices, equalities = constraint_rows(g, lam, mode)
    dd = DoubleDescription(len(vertices), mode, config.dd_tol)
    for row in equalities:
        dd.add(row, equality=True)

    i0 = vertices.index(v0)
    points, unbounded = [], 0
    for ray in dd.rays:
        if dd.is_zero(ray[i0]):
            unbounded += 1
            continue
        scaled = ray / ray[i0]
        values = {v: scaled[i] for i, v in enumerate(vertices)}
        values[v0] = convert(1, mode)
        points.append(values)
    if unbounded:
        logger.warning(f"{unbounded} extreme rays vanish at {v0}; the normalized set is unbounded")

    points.sort(key=lambda p: tuple(p[v] for v in vertices))
    extreme = []
    for values in points:
        label = _label(g, values)
        kind = "harmonic" if label == "harmonic" else "almost_harmonic"
        extreme.append(HarmonicVector(lam, values, kind=kind, label=label))
    logger.info(f"✓ {len(extreme)} extreme points")
    return ConeDescription(base_vertex=v0, lam=lam, extreme_points=extreme, unbounded_rays=unbounded)
