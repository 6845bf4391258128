"""Parsing of graph description documents and vector files."""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .arithmetic import MODES, Number, parse_number
from .config import GraphConfig
from .errors import GraphFormatError, GraphModelError
from .families import get_family
from .graph import FiniteGraph, GeneratorGraph, GraphSource, VertexId

logger = logging.getLogger(__name__)

HEADER = "kmsgraph v1"
GENERATOR_PREFIX = "gen:"


def _content_lines(text: str) -> List[Tuple[int, str]]:
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((number, line))
    return lines


def parse_generator_spec(spec: str, config: Optional[GraphConfig] = None) -> GeneratorGraph:
    """
    Parse ``gen:NAME key=value ...`` (the ``gen:`` prefix is optional).

    Args:
        spec: Generator specification
        config: Configuration supplying the default arithmetic mode

    Returns:
        GeneratorGraph: Resolved generator
    """
    config = config or GraphConfig()
    spec = spec.strip()
    if spec.startswith(GENERATOR_PREFIX):
        spec = spec[len(GENERATOR_PREFIX):]
    tokens = spec.split()
    if not tokens:
        raise GraphFormatError("Empty generator specification", 1)
    name, raw = tokens[0], {}
    for token in tokens[1:]:
        if "=" not in token:
            raise GraphFormatError(f"Expected key=value, got {token!r}", 1)
        key, value = token.split("=", 1)
        if key in raw:
            raise GraphFormatError(f"Repeated parameter {key!r}", 1)
        raw[key] = value
    mode = raw.pop("mode", config.generator_mode)
    if mode not in MODES:
        raise GraphFormatError(f"Unknown arithmetic mode {mode!r}", 1)
    family = get_family(name)
    try:
        params = family.parse_params(raw, mode)
    except ValueError as e:
        raise GraphFormatError(str(e), 1) from e
    graph = GeneratorGraph(family, params, mode)
    logger.info(f"Resolved generator: {graph.description}")
    return graph


def parse_graph(text: str, config: Optional[GraphConfig] = None) -> GraphSource:
    """
    Parse a graph description document.

    Args:
        text: Either a ``kmsgraph v1`` edge table or a single ``gen:`` line
        config: Configuration supplying default arithmetic modes

    Returns:
        GraphSource: Validated finite graph or generator

    Raises:
        GraphFormatError: Syntax error, non-positive weight or duplicate edge
        UnknownFamilyError: Unknown generator family
    """
    config = config or GraphConfig()
    lines = _content_lines(text)
    if not lines:
        raise GraphFormatError("Empty graph document", 1)

    first_number, first = lines[0]
    if first.startswith(GENERATOR_PREFIX):
        if len(lines) > 1:
            raise GraphFormatError("Generator documents consist of a single line", lines[1][0])
        return parse_generator_spec(first, config)
    if first != HEADER:
        raise GraphFormatError(f"Expected header {HEADER!r}", first_number)

    mode = config.finite_mode
    section: Optional[str] = None
    raw_edges: List[Tuple[int, str, str, str]] = []
    for number, line in lines[1:]:
        if line.startswith("[mode]"):
            mode = line[len("[mode]"):].strip()
            if mode not in MODES:
                raise GraphFormatError(f"Unknown arithmetic mode {mode!r}", number)
            continue
        if line == "[edges]":
            section = "edges"
            continue
        if line.startswith("["):
            raise GraphFormatError(f"Unknown section {line!r}", number)
        if section != "edges":
            raise GraphFormatError("Edge line outside the [edges] section", number)
        fields = line.split()
        if len(fields) != 3:
            raise GraphFormatError("Expected 'SRC DST WEIGHT'", number)
        raw_edges.append((number, *fields))

    if section is None:
        raise GraphFormatError("Missing [edges] section", len(text.splitlines()) or 1)

    seen: Dict[Tuple[VertexId, VertexId], int] = {}
    edges = []
    for number, src, dst, token in raw_edges:
        try:
            weight = parse_number(token, mode)
        except ValueError as e:
            raise GraphFormatError(str(e), number) from e
        if weight <= 0:
            raise GraphFormatError(f"Non-positive weight {token} on edge {src}->{dst}", number)
        if (src, dst) in seen:
            raise GraphFormatError(
                f"Duplicate edge {src}->{dst} (first defined on line {seen[(src, dst)]})", number
            )
        seen[(src, dst)] = number
        edges.append((src, dst, weight))

    try:
        graph = FiniteGraph(edges, mode=mode)
    except GraphModelError as e:
        raise GraphFormatError(e.message) from e
    logger.info(f"Parsed {graph.description}")
    return graph


def load_graph(path: Union[str, Path], config: Optional[GraphConfig] = None) -> GraphSource:
    """Read and parse a graph document from disk."""
    return parse_graph(Path(path).read_text(encoding="utf-8"), config)


def parse_vector(text: str, mode: str) -> Dict[VertexId, Number]:
    """
    Parse ``VERTEX VALUE`` lines into a vertex to value map.

    Raises:
        GraphFormatError: Malformed line, negative or repeated entry
    """
    values: Dict[VertexId, Number] = {}
    for number, line in _content_lines(text):
        fields = line.split()
        if len(fields) != 2:
            raise GraphFormatError("Expected 'VERTEX VALUE'", number)
        vertex, token = fields
        try:
            value = parse_number(token, mode)
        except ValueError as e:
            raise GraphFormatError(str(e), number) from e
        if value < 0:
            raise GraphFormatError(f"Negative value for {vertex}", number)
        if vertex in values:
            raise GraphFormatError(f"Repeated vertex {vertex}", number)
        values[vertex] = value
    return values


def load_vector(path: Union[str, Path], mode: str) -> Dict[VertexId, Number]:
    return parse_vector(Path(path).read_text(encoding="utf-8"), mode)


