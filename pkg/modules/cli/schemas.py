"""Request and output documents of the command-line interface."""

import numbers
from typing import Any, Dict, List, Literal, Mapping, Optional

from pydantic import BaseModel, Field, model_validator

from graph_core import Number, format_number

from .config import SCHEMA_VERSION

COMMANDS = (
    "analyze", "beta0", "classify", "green", "solve", "certify", "extend", "riesz",
    "kernel", "kernel-limit", "sample", "check",
)

Certainty = Literal["exact", "lower-bound", "heuristic", "bounds"]


class CommandRequest(BaseModel):
    """Validated command-line request."""

    command: Literal[COMMANDS]
    graph: Optional[str] = None
    gen: Optional[str] = None
    lam: Optional[str] = Field(None, serialization_alias="lambda")
    beta: Optional[float] = None
    depth: int = Field(256, ge=1)
    tol: float = Field(1e-10, ge=0)
    row_limit: int = Field(64, ge=1)
    window: Optional[int] = Field(None, ge=0)
    seed: int = 0
    closed_forms: bool = True
    format: Literal["json", "tsv"] = "json"

    v: Optional[str] = None
    w: Optional[str] = None
    v0: Optional[str] = None
    target: Optional[str] = None
    vector: Optional[str] = None
    subset: Optional[str] = None
    psi: Optional[str] = None
    targets_file: Optional[str] = None
    direction: Optional[Literal["+", "-"]] = None
    count: int = Field(32, ge=2)
    schedule: Literal["queue", "stack"] = "queue"
    paths: int = Field(100, ge=0)
    horizon: int = Field(100, ge=0)
    suite: Optional[str] = None
    trials: int = Field(20, ge=1)

    @model_validator(mode="after")
    def check_sources(self) -> "CommandRequest":
        sources = [s for s in (self.graph, self.gen) if s is not None]
        if self.command != "check" and len(sources) != 1:
            raise ValueError("exactly one of --graph or --gen is required")
        if self.command == "check" and self.suite is None and len(sources) != 1:
            raise ValueError("check needs --suite or exactly one graph source")
        if self.lam is not None and self.beta is not None:
            raise ValueError("--lambda and --beta are mutually exclusive")
        return self


class NumericValue(BaseModel):
    """A number with its certainty marker."""

    value: str
    approx: Optional[float] = None
    certainty: Certainty

    @classmethod
    def of(cls, value: Number, certainty: Certainty) -> "NumericValue":
        return cls(value=format_number(value), approx=float(value), certainty=certainty)


def certainty_of(value: Number, certified: bool = True) -> Certainty:
    """Rational values of a certified computation are exact; everything else is heuristic."""
    return "exact" if certified and isinstance(value, numbers.Rational) else "heuristic"


def numeric_map(values: Mapping[str, Number], certified: bool = True) -> Dict[str, Dict[str, Any]]:
    return {
        str(v): NumericValue.of(x, certainty_of(x, certified)).model_dump()
        for v, x in sorted(values.items())
    }


class ErrorRecord(BaseModel):
    """Structured description of a domain error."""

    type: str
    message: str
    exit_code: int = 1


class OutputDocument(BaseModel):
    """Everything a command writes to standard output."""

    schema_version: str = SCHEMA_VERSION
    command: str
    request: Dict[str, Any] = Field(default_factory=dict)
    result: Optional[Dict[str, Any]] = None
    diagnostics: Dict[str, Any] = Field(default_factory=dict)
    error: Optional[ErrorRecord] = None

    @property
    def records(self) -> List[Dict[str, Any]]:
        if self.result is None:
            return []
        return list(self.result.get("records", []))
