"""Result types for truncated series and critical-value computations."""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence

from graph_core import Number, VertexId, convert, format_number, mode_of, within

from .config import TruncationConfig

logger = logging.getLogger(__name__)

# Relative slack used when comparing consecutive float terms
_TERM_SLACK = 1e-12


def as_lambda(value) -> Number:
    """
    Validate a parameter lambda = e^beta.

    Args:
        value: Fraction, int, float or a ``p/q`` / decimal string

    Returns:
        Fraction for rational input, float otherwise

    Raises:
        ValueError: If lambda is not a finite positive number
    """
    if isinstance(value, str):
        try:
            value = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Invalid lambda: {value!r}") from e
    if isinstance(value, int):
        value = Fraction(value)
    if isinstance(value, float) and not math.isfinite(value):
        raise ValueError(f"Invalid lambda: {value}")
    if value <= 0:
        raise ValueError(f"lambda must be positive, got {value}")
    return value


def lambda_from_beta(beta: float) -> float:
    """lambda = e^beta; only used at the command-line boundary."""
    return math.exp(beta)


@dataclass
class SeriesEstimate:
    """Truncated value of a non-negative series."""

    lower: Number
    upper: Optional[Number] = None
    partial_terms: List[Number] = field(default_factory=list)
    converged: bool = False
    diverged: bool = False
    certainty: str = "lower-bound"

    def __post_init__(self):
        if self.upper is not None and self.upper < self.lower:
            raise ValueError(f"upper {self.upper} below lower {self.lower}")
        if self.diverged and self.converged:
            raise ValueError("A series cannot be both converged and diverged")

    @property
    def value(self) -> Number:
        return self.lower

    @property
    def is_exact(self) -> bool:
        return self.upper is not None and self.upper == self.lower

    def to_dict(self) -> dict:
        return {
            "lower": format_number(self.lower),
            "upper": None if self.upper is None else format_number(self.upper),
            "converged": self.converged,
            "diverged": self.diverged,
            "certainty": self.certainty,
        }


@dataclass
class Beta0Report:
    """Bounds on lambda0 = e^{beta0}."""

    mode: str
    lambda0_lower: float
    lambda0_upper: Optional[float]
    witness_vertex: VertexId
    method: str
    lambda0_exact: Optional[Fraction] = None
    closed_form: bool = False

    def __post_init__(self):
        if self.mode not in ("exact", "bounds"):
            raise ValueError(f"Unknown Beta0Report mode: {self.mode}")
        if self.lambda0_upper is not None and self.lambda0_lower > self.lambda0_upper:
            raise ValueError("lambda0_lower exceeds lambda0_upper")

    @property
    def lambda0(self) -> Number:
        """Best single value: the exact root, the closed form, or the bracket midpoint."""
        if self.lambda0_exact is not None:
            return self.lambda0_exact
        if self.lambda0_upper is None:
            return self.lambda0_lower
        if self.closed_form:
            return self.lambda0_upper
        return (self.lambda0_lower + self.lambda0_upper) / 2

    @property
    def beta0(self) -> float:
        return math.log(float(self.lambda0))

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "lambda0": format_number(self.lambda0),
            "lambda0_lower": format_number(self.lambda0_lower),
            "lambda0_upper": None if self.lambda0_upper is None else format_number(self.lambda0_upper),
            "beta0": self.beta0,
            "witness_vertex": self.witness_vertex,
            "method": self.method,
        }


@dataclass
class RecurrenceVerdict:
    """Recurrent, transient or unknown, with the rule that decided it."""

    verdict: str
    partial_sum: Optional[float]
    evidence: str
    rule: str
    lambda0: Optional[Number] = None

    def __post_init__(self):
        if self.verdict not in ("recurrent", "transient", "unknown"):
            raise ValueError(f"Unknown verdict: {self.verdict}")


def term_period(terms: Sequence[Number]) -> int:
    """Gcd of the gaps between non-zero terms (1 when undetermined)."""
    support = [i for i, t in enumerate(terms) if t > 0]
    p = 0
    for a, b in zip(support, support[1:]):
        p = gcd(p, b - a)
    return p or 1


def _looks_divergent(terms: Sequence[Number], partial: Number, cfg: TruncationConfig) -> bool:
    support = [i for i, t in enumerate(terms) if t > 0]
    if not support:
        return False
    p = term_period(terms)
    last = support[-1]
    if last < len(terms) - p:
        # Terms died out before the end of the window
        return False
    if last >= p and float(partial) > cfg.divergence_threshold:
        if terms[last] >= terms[last - p] * (1 - _TERM_SLACK):
            return True
    if len(support) < 5 or last < 3 * p:
        return False
    chain = [terms[last - k * p] for k in (3, 2, 1, 0)]
    return all(b >= a * (1 - _TERM_SLACK) for a, b in zip(chain, chain[1:]))


def summarize_terms(
    terms: Sequence[Number],
    cfg: TruncationConfig,
    exhausted: bool = False,
    complete: bool = True
) -> SeriesEstimate:
    """
    Turn the computed terms of a non-negative series into a SeriesEstimate.

    Args:
        terms: Terms with index 0..N
        cfg: Truncation configuration
        exhausted: All terms beyond the computed ones are known to vanish
        complete: No truncated emitter row influenced the terms

    Returns:
        SeriesEstimate with certified lower bound
    """
    if not terms:
        return SeriesEstimate(lower=0.0, converged=False)
    partial = sum(terms[1:], terms[0])
    mode = mode_of(partial)
    diverged = not exhausted and _looks_divergent(terms, partial, cfg)

    upper = None
    if complete and not diverged:
        if exhausted:
            upper = partial
        elif cfg.tail_ratio_bound is not None:
            p = term_period(terms)
            rho = convert(cfg.tail_ratio_bound, mode)
            upper = partial + max(terms[-p:]) * rho / (1 - rho)

    if diverged:
        converged = False
    elif upper is not None:
        converged = True
    else:
        p = term_period(terms)
        converged = within(sum(terms[-p:], terms[0] * 0), cfg.tol, partial)

    if exhausted and complete:
        certainty = "exact"
    elif upper is not None:
        certainty = "bounds"
    elif diverged:
        certainty = "heuristic"
    else:
        certainty = "lower-bound"

    if diverged:
        logger.warning(f"Series flagged divergent (heuristic): partial sum {float(partial):.6g}")
    return SeriesEstimate(
        lower=partial,
        upper=upper,
        partial_terms=list(terms[:cfg.kept_terms]),
        converged=converged,
        diverged=diverged,
        certainty=certainty,
    )
