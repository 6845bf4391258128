"""Hereditary/saturated closures, cofinality, non-wandering sets and assumption checks."""

import logging
from collections import deque
from dataclasses import dataclass, field
from itertools import islice
from typing import FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx

from .config import GraphConfig
from .errors import GraphModelError, MetadataError, UnknownVertexError
from .graph import FiniteGraph, GraphSource, Verdict, VertexId

logger = logging.getLogger(__name__)


@dataclass
class AssumptionReport:
    """Outcome of checking the standing assumptions on a graph."""

    cofinal: Verdict
    sinks: List[VertexId]
    infinite_emitters: List[VertexId]
    powers_finite: Verdict
    nw_kind: str
    nw: Optional[List[VertexId]] = None
    notes: List[str] = field(default_factory=list)

    @property
    def v_infinity(self) -> List[VertexId]:
        return sorted(set(self.sinks) | set(self.infinite_emitters))

    def to_dict(self) -> dict:
        return {
            "cofinal": str(self.cofinal),
            "sinks": self.sinks,
            "infinite_emitters": self.infinite_emitters,
            "v_infinity": self.v_infinity,
            "powers_finite": str(self.powers_finite),
            "nw_kind": self.nw_kind,
            "nw": self.nw,
            "notes": self.notes,
        }


def _check_subset(g: FiniteGraph, subset: Iterable[VertexId]) -> Set[VertexId]:
    subset = set(subset)
    for v in subset:
        if not g.has_vertex(v):
            raise UnknownVertexError(v)
    return subset


def is_hereditary(g: FiniteGraph, subset: Iterable[VertexId]) -> bool:
    """Every edge leaving a vertex of the set lands in the set."""
    subset = _check_subset(g, subset)
    return all(w in subset for v in subset for w, _ in g.adjacency[v])


def is_saturated(g: FiniteGraph, subset: Iterable[VertexId]) -> bool:
    """Every non-sink vertex whose out-neighbors all lie in the set belongs to it."""
    subset = _check_subset(g, subset)
    for v in g.vertices:
        row = g.adjacency[v]
        if v not in subset and row and all(w in subset for w, _ in row):
            return False
    return True


def hereditary_saturated_closure(
    g: FiniteGraph,
    subset: Iterable[VertexId]
) -> FrozenSet[VertexId]:
    """
    Smallest hereditary and saturated set containing ``subset``.

    Alternates a hereditary sweep (forward reachability) with a saturation
    sweep (adjoin finite emitters whose whole range is inside) until neither
    changes the set.

    Args:
        g: Finite graph
        subset: Starting vertex set

    Returns:
        frozenset: The closure
    """
    closure = _check_subset(g, subset)
    changed = True
    while changed:
        changed = False
        queue = deque(sorted(closure))
        while queue:
            v = queue.popleft()
            for w, _ in g.adjacency[v]:
                if w not in closure:
                    closure.add(w)
                    queue.append(w)
                    changed = True
        for v in g.vertices:
            row = g.adjacency[v]
            if v not in closure and row and all(w in closure for w, _ in row):
                closure.add(v)
                changed = True
    return frozenset(closure)


def is_cofinal(g: GraphSource) -> Verdict:
    """
    Cofinality: no hereditary saturated sets besides the empty set and V.

    Finite graphs are decided by closing every singleton; generators echo
    their declared metadata.
    """
    if not g.is_finite:
        return Verdict(g.metadata.cofinal, "declared")
    everything = frozenset(g.vertices)
    for v in g.vertices:
        if hereditary_saturated_closure(g, {v}) != everything:
            logger.debug(f"Closure of {{{v}}} is a proper hereditary saturated set")
            return Verdict(False)
    return Verdict(True)


def nonwandering_set(g: FiniteGraph) -> Tuple[FrozenSet[VertexId], bool]:
    """
    Vertices lying on a cycle, and whether they induce a strongly connected graph.

    Returns:
        Tuple of (NW, strongly_connected); the empty NW counts as strongly connected
    """
    nw = g.nw
    if not nw:
        return nw, True
    subgraph = g.to_networkx().subgraph(nw)
    return nw, nx.is_strongly_connected(subgraph)


def reachable_set(g: GraphSource, v0: VertexId, radius: int) -> FrozenSet[VertexId]:
    """
    Vertices w with A^l_{v0 w} > 0 for some 1 <= l <= radius.

    Infinite emitter rows are followed without truncation only on finite
    graphs; on generators the rows are cut at ``radius`` edges.
    """
    g.require_vertex(v0)
    frontier, seen = [v0], set()
    for _ in range(radius):
        nxt = []
        for v in frontier:
            limit = None if g.is_finite else radius
            for w, _ in g.out_edges(v, limit):
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
        if not frontier:
            break
    return frozenset(seen)


def classify_vertices(g: GraphSource, probe_limit: Optional[int] = None) -> AssumptionReport:
    """
    List sinks and infinite emitters and check the standing assumptions.

    Args:
        g: Graph source
        probe_limit: Number of out-edges probed to confirm declared emitters

    Returns:
        AssumptionReport

    Raises:
        MetadataError: A declared emitter has a finite out-neighborhood
        GraphModelError: An infinite emitter lies outside NW
    """
    probe_limit = probe_limit or GraphConfig().probe_limit
    notes: List[str] = []

    if g.is_finite:
        nw, strongly_connected = nonwandering_set(g)
        if nw and not strongly_connected:
            notes.append("G^NW is not strongly connected")
        return AssumptionReport(
            cofinal=is_cofinal(g),
            sinks=list(g.sinks),
            infinite_emitters=[],
            powers_finite=Verdict(True),
            nw_kind=g.nw_kind,
            nw=sorted(nw),
            notes=notes,
        )

    meta = g.metadata
    for u in meta.v_infinity:
        probed = list(islice(g.out_edges(u), probe_limit + 1))
        if len(probed) <= probe_limit:
            raise MetadataError(
                f"Declared infinite emitter {u} has only {len(probed)} out-edges"
            )
        if not g.in_nw(u):
            raise GraphModelError(f"Infinite emitter {u} lies outside the non-wandering set")

    window = g.probe_window(GraphConfig().window_radius)
    sinks = [v for v in window if next(iter(g.out_edges(v, 1)), None) is None]
    if meta.no_sinks and sinks:
        raise MetadataError(f"Family declares no sinks but {sinks} have empty rows")
    if meta.v_infinity:
        notes.append("powers finiteness is declared for non row-finite families")
    notes.append("cofinality and V_infinity are declared by the generator family")

    return AssumptionReport(
        cofinal=is_cofinal(g),
        sinks=sinks,
        infinite_emitters=list(meta.v_infinity),
        powers_finite=Verdict(True, "declared") if meta.v_infinity else Verdict(True),
        nw_kind=meta.nw_kind,
        notes=notes,
    )
