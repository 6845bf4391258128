"""Almost harmonic vectors and their validation."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Union

from graph_core import (
    EXACT, GraphSource, InvalidVectorError, Number, VertexId, ZeroVectorError, convert,
    format_number, joint_mode,
)

from .config import HarmonicConfig

logger = logging.getLogger(__name__)

KINDS = ("almost_harmonic", "harmonic", "candidate")


@dataclass
class HarmonicVector:
    """Non-negative vector over an explored support, tagged with its lambda."""

    lam: Number
    values: Dict[VertexId, Number]
    kind: str = "almost_harmonic"
    label: Optional[str] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"Unknown vector kind: {self.kind}")
        negative = [v for v, x in self.values.items() if x < 0]
        if negative:
            raise InvalidVectorError(f"Negative entries at {sorted(negative)[:5]}")

    def __getitem__(self, v: VertexId) -> Number:
        return self.values[v]

    def get(self, v: VertexId, default: Number = 0) -> Number:
        return self.values.get(v, default)

    @property
    def is_zero(self) -> bool:
        return all(x == 0 for x in self.values.values())

    @property
    def support(self) -> List[VertexId]:
        return sorted(v for v, x in self.values.items() if x > 0)

    def scaled(self, factor: Number) -> "HarmonicVector":
        return HarmonicVector(
            self.lam, {v: x * factor for v, x in self.values.items()}, self.kind, self.label,
            dict(self.diagnostics),
        )

    def to_records(self) -> List[dict]:
        return [{"vertex": v, "value": format_number(x)} for v, x in sorted(self.values.items())]


VectorLike = Union[HarmonicVector, Mapping[VertexId, Number]]


def vector_values(xi: VectorLike) -> Dict[VertexId, Number]:
    """Plain vertex map of a vector argument, rejecting negative and all-zero input."""
    values = dict(xi.values if isinstance(xi, HarmonicVector) else xi)
    if any(x < 0 for x in values.values()):
        raise InvalidVectorError("Vector has negative entries")
    if not values or all(x == 0 for x in values.values()):
        raise ZeroVectorError("The zero vector is not a valid input")
    return values


@dataclass
class VectorCheck:
    """Per-vertex residuals r_v = sum_w A_vw xi_w - lambda xi_v over the probed vertices."""

    is_almost_harmonic: bool
    is_harmonic: bool
    positivity_ok: bool
    residuals: Dict[VertexId, Number]
    violations: List[VertexId] = field(default_factory=list)
    slack: List[VertexId] = field(default_factory=list)
    truncated: List[VertexId] = field(default_factory=list)

    def to_records(self) -> List[dict]:
        return [
            {
                "vertex": v,
                "residual": format_number(r),
                "violated": v in self.violations,
                "slack": v in self.slack,
            }
            for v, r in sorted(self.residuals.items())
        ]


def default_probe(g: GraphSource, values: Mapping[VertexId, Number], row_limit: int) -> List[VertexId]:
    """
    Vertices whose constraints can be evaluated from ``values``.

    Finite graphs probe every vertex. Generators probe the valued vertices
    whose (truncated) rows only reach valued vertices, plus valued emitters,
    whose rows only need to give a lower bound.
    """
    if g.is_finite:
        return list(g.vertices)
    probe = []
    for v in values:
        if g.is_emitter(v) or all(w in values for w, _ in g.out_edges(v, row_limit)):
            probe.append(v)
    return sorted(probe)


def check_vector(
    g: GraphSource,
    lam,
    xi: VectorLike,
    tol: Optional[float] = None,
    probe: Optional[Iterable[VertexId]] = None,
    row_limit: int = 64,
    config: Optional[HarmonicConfig] = None
) -> VectorCheck:
    """
    Test the almost harmonic (in)equalities sum_w A_vw xi_w <= lambda xi_v.

    Equality is demanded outside V_infinity. Emitter rows are enumerated up
    to ``row_limit`` edges and missing values count as zero there, so the
    left side is a lower bound and reported violations are certified.

    Args:
        g: Graph source
        lam: lambda = e^beta
        xi: Vector to check
        tol: Relative tolerance (default 0 in exact mode, check_tol otherwise)
        probe: Vertices to test (default: every vertex whose row is covered)
        row_limit: Edges enumerated per infinite row
        config: Harmonic configuration

    Returns:
        VectorCheck

    Raises:
        ZeroVectorError: If xi vanishes identically
        InvalidVectorError: If a probed constraint needs a missing value
    """
    config = config or HarmonicConfig()
    values = vector_values(xi)
    mode = joint_mode(g.mode, lam, *values.values())
    lam = convert(lam, mode)
    if tol is None:
        tol = 0.0 if mode == EXACT else config.check_tol
    values = {g.require_vertex(v): convert(x, mode) for v, x in values.items()}
    probe = list(probe) if probe is not None else default_probe(g, values, row_limit)

    residuals: Dict[VertexId, Number] = {}
    violations, slack, truncated = [], [], []
    harmonic = True
    for v in probe:
        if v not in values:
            raise InvalidVectorError(f"Missing value at probed vertex {v}")
        emitter = g.is_emitter(v)
        row = list(g.out_edges(v, row_limit + 1 if emitter else None))
        if emitter and len(row) > row_limit:
            row = row[:row_limit]
            truncated.append(v)
        total = convert(0, mode)
        for w, weight in row:
            if w in values:
                total += convert(weight, mode) * values[w]
            elif not emitter:
                raise InvalidVectorError(f"Missing value at {w}, needed by the row of {v}")
        target = lam * values[v]
        r = total - target
        residuals[v] = r
        bound = 0 if tol == 0 else tol * max(1.0, abs(float(target)), abs(float(total)))

        if g.in_v_infinity(v):
            if r > bound:
                violations.append(v)
            elif r < -bound:
                slack.append(v)
                harmonic = False
            elif v in truncated:
                harmonic = False
        elif abs(r) > bound:
            violations.append(v)

    positivity = all(values[v] > 0 for v in probe)
    if truncated:
        logger.debug(f"{len(truncated)} emitter rows truncated at {row_limit} edges")
    almost = not violations
    return VectorCheck(
        is_almost_harmonic=almost,
        is_harmonic=almost and harmonic,
        positivity_ok=positivity,
        residuals=residuals,
        violations=violations,
        slack=slack,
        truncated=truncated,
    )


def require_almost_harmonic(g: GraphSource, lam, xi: VectorLike, row_limit: int = 64,
                            probe: Optional[Iterable[VertexId]] = None,
                            config: Optional[HarmonicConfig] = None) -> VectorCheck:
    """check_vector that raises InvalidVectorError on violations."""
    report = check_vector(g, lam, xi, probe=probe, row_limit=row_limit, config=config)
    if not report.is_almost_harmonic:
        raise InvalidVectorError(
            f"Vector violates the almost harmonic constraints at {report.violations[:5]}"
        )
    return report
