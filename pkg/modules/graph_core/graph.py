"""Graph sources: finite weighted tables and lazy generator families."""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from itertools import islice
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

import networkx as nx

from .arithmetic import EXACT, MODES, Number, convert, format_number
from .errors import GraphModelError, UnknownVertexError

logger = logging.getLogger(__name__)

VertexId = str
Edge = Tuple[VertexId, Number]


@dataclass(frozen=True)
class Verdict:
    """Yes/no answer together with how it was obtained."""

    holds: Optional[bool]
    basis: str = "computed"  # 'computed', 'declared', 'unknown'

    def __str__(self) -> str:
        if self.holds is None:
            return "unknown"
        answer = "yes" if self.holds else "no"
        return f"{answer}(declared)" if self.basis == "declared" else answer

    @classmethod
    def unknown(cls) -> "Verdict":
        return cls(None, "unknown")


@dataclass(frozen=True)
class DeclaredMetadata:
    """Trusted, hand-verified structural facts about a generator family."""

    cofinal: bool
    no_sinks: bool
    nw_kind: str  # 'empty', 'finite', 'infinite'
    v_infinity: Tuple[VertexId, ...] = ()
    witness: Optional[VertexId] = None

    def __post_init__(self):
        if self.nw_kind not in ("empty", "finite", "infinite"):
            raise ValueError(f"Unknown NW kind: {self.nw_kind}")
        if self.nw_kind != "empty" and self.witness is None:
            raise ValueError("A non-empty NW set needs a witness vertex")


class GraphSource(ABC):
    """A non-negative matrix over a countable vertex set, seen as a digraph."""

    mode: str = EXACT

    @property
    @abstractmethod
    def is_finite(self) -> bool:
        """Whether the vertex set is an explicit finite table."""

    @abstractmethod
    def has_vertex(self, v: VertexId) -> bool:
        """Membership test for vertex ids."""

    @abstractmethod
    def _edges(self, v: VertexId) -> Iterator[Edge]:
        """Unchecked out-neighborhood stream."""

    @abstractmethod
    def probe_window(self, radius: int) -> List[VertexId]:
        """Finite list of vertices around the base vertex."""

    @abstractmethod
    def in_nw(self, v: VertexId) -> bool:
        """Whether ``v`` lies on a cycle."""

    @property
    @abstractmethod
    def nw_kind(self) -> str:
        """'empty', 'finite' or 'infinite'."""

    @property
    @abstractmethod
    def emitters(self) -> Tuple[VertexId, ...]:
        """Infinite emitters (empty for finite graphs)."""

    @property
    @abstractmethod
    def base_vertex(self) -> VertexId:
        """Deterministic default vertex (NW witness when NW is non-empty)."""

    @abstractmethod
    def to_mode(self, mode: str) -> "GraphSource":
        """Same graph with weights in another arithmetic mode."""

    @property
    @abstractmethod
    def description(self) -> str:
        """Short human readable identification."""

    def require_vertex(self, v: VertexId) -> VertexId:
        if not self.has_vertex(v):
            raise UnknownVertexError(v)
        return v

    def out_edges(self, v: VertexId, limit: Optional[int] = None) -> Iterator[Edge]:
        """
        Enumerate out-neighbors of ``v`` in deterministic order.

        Args:
            v: Source vertex
            limit: Maximum number of edges; truncation under-approximates row sums

        Returns:
            Iterator of (target, weight) pairs
        """
        self.require_vertex(v)
        stream = self._edges(v)
        return islice(stream, limit) if limit is not None else stream

    def is_sink(self, v: VertexId) -> bool:
        return next(iter(self.out_edges(v, 1)), None) is None

    def is_emitter(self, v: VertexId) -> bool:
        return v in self.emitters

    def in_v_infinity(self, v: VertexId) -> bool:
        """Sinks and infinite emitters: where only sub-invariance is imposed."""
        return self.is_emitter(v) or self.is_sink(v)


class FiniteGraph(GraphSource):
    """Finite weighted digraph given as an edge table."""

    def __init__(
        self,
        edges: Iterable[Tuple[VertexId, VertexId, Number]],
        vertices: Iterable[VertexId] = (),
        mode: str = EXACT
    ):
        """
        Build a finite graph.

        Args:
            edges: (source, target, weight) triples with positive weights
            vertices: Extra isolated vertices
            mode: Arithmetic mode ('exact' or 'float')
        """
        if mode not in MODES:
            raise ValueError(f"Unknown arithmetic mode: {mode}")
        self.mode = mode
        names = set(vertices)
        rows: Dict[VertexId, Dict[VertexId, Number]] = {}
        for src, dst, weight in edges:
            weight = convert(weight, mode)
            if weight <= 0:
                raise GraphModelError(f"Non-positive weight on edge {src}->{dst}")
            row = rows.setdefault(src, {})
            if dst in row:
                raise GraphModelError(f"Duplicate edge {src}->{dst}")
            row[dst] = weight
            names.update((src, dst))
        for name in names:
            if not name or any(ch.isspace() for ch in name):
                raise GraphModelError(f"Invalid vertex id: {name!r}")
        self.vertices: Tuple[VertexId, ...] = tuple(sorted(names))
        self.adjacency: Dict[VertexId, Tuple[Edge, ...]] = {
            v: tuple(sorted(rows.get(v, {}).items())) for v in self.vertices
        }
        self._nw: Optional[frozenset] = None

    @property
    def is_finite(self) -> bool:
        return True

    def has_vertex(self, v: VertexId) -> bool:
        return v in self.adjacency

    def _edges(self, v: VertexId) -> Iterator[Edge]:
        return iter(self.adjacency[v])

    def edges(self) -> Iterator[Tuple[VertexId, VertexId, Number]]:
        for v in self.vertices:
            for w, weight in self.adjacency[v]:
                yield v, w, weight

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from((v, w) for v, w, _ in self.edges())
        return graph

    @property
    def nw(self) -> frozenset:
        """Vertices on a cycle: SCCs with an internal edge."""
        if self._nw is None:
            graph = self.to_networkx()
            cyclic = set()
            for component in nx.strongly_connected_components(graph):
                if len(component) > 1:
                    cyclic.update(component)
                else:
                    (v,) = component
                    if graph.has_edge(v, v):
                        cyclic.add(v)
            self._nw = frozenset(cyclic)
        return self._nw

    def in_nw(self, v: VertexId) -> bool:
        return self.require_vertex(v) in self.nw

    @property
    def nw_kind(self) -> str:
        return "finite" if self.nw else "empty"

    @property
    def emitters(self) -> Tuple[VertexId, ...]:
        return ()

    @property
    def sinks(self) -> Tuple[VertexId, ...]:
        return tuple(v for v in self.vertices if not self.adjacency[v])

    @property
    def base_vertex(self) -> VertexId:
        if self.nw:
            return min(self.nw)
        if not self.vertices:
            raise GraphModelError("Graph has no vertices")
        return self.vertices[0]

    def probe_window(self, radius: int) -> List[VertexId]:
        return list(self.vertices)

    def to_mode(self, mode: str) -> "FiniteGraph":
        if mode == self.mode:
            return self
        return FiniteGraph(self.edges(), self.vertices, mode)

    @property
    def description(self) -> str:
        n_edges = sum(len(row) for row in self.adjacency.values())
        return f"finite graph ({len(self.vertices)} vertices, {n_edges} edges, {self.mode})"

    def weight(self, v: VertexId, w: VertexId) -> Number:
        for target, weight in self.adjacency[self.require_vertex(v)]:
            if target == w:
                return weight
        return convert(0, self.mode)


@dataclass
class GeneratorGraph(GraphSource):
    """Infinite graph produced lazily by a registered generator family."""

    family: "object"
    params: Dict[str, Number] = field(default_factory=dict)
    mode: str = "float"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"Unknown arithmetic mode: {self.mode}")
        self.params = {k: convert(v, self.mode) if k not in self.family.integer_params else v
                       for k, v in self.params.items()}
        self.metadata: DeclaredMetadata = self.family.metadata(self.params)

    @property
    def is_finite(self) -> bool:
        return False

    def has_vertex(self, v: VertexId) -> bool:
        return isinstance(v, str) and self.family.contains(self.params, v)

    def _edges(self, v: VertexId) -> Iterator[Edge]:
        for w, weight in self.family.neighbors(self.params, v, self.mode):
            if weight > 0:
                yield w, weight

    def probe_window(self, radius: int) -> List[VertexId]:
        return self.family.window(self.params, radius)

    def in_nw(self, v: VertexId) -> bool:
        return self.family.in_nw(self.params, self.require_vertex(v))

    @property
    def nw_kind(self) -> str:
        return self.metadata.nw_kind

    @property
    def emitters(self) -> Tuple[VertexId, ...]:
        return self.metadata.v_infinity

    def is_sink(self, v: VertexId) -> bool:
        if self.metadata.no_sinks:
            self.require_vertex(v)
            return False
        return super().is_sink(v)

    @property
    def base_vertex(self) -> VertexId:
        return self.metadata.witness or self.family.window(self.params, 0)[0]

    def to_mode(self, mode: str) -> "GeneratorGraph":
        if mode == self.mode:
            return self
        return GeneratorGraph(self.family, dict(self.params), mode)

    @property
    def description(self) -> str:
        rendered = " ".join(f"{k}={format_number(v)}" for k, v in sorted(self.params.items()))
        return f"gen:{self.family.name} {rendered}".strip()


def out_edges(g: GraphSource, v: VertexId, limit: Optional[int] = None) -> List[Edge]:
    """Materialized out-neighborhood of ``v`` (``limit`` truncates infinite rows)."""
    return list(g.out_edges(v, limit))
