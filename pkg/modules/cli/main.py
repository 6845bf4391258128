"""Command-line entry point of KMSGraph."""

import argparse
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import ValidationError

from graph_core import (
    GraphSource, KMSError, Number, PreconditionError, classify_vertices, format_number, load_graph,
    load_vector, parse_generator_spec,
)
from harmonic import (
    HarmonicConfig, HarmonicVector, certify_no_solution, check_vector, existence_verdict,
    extend_from_hereditary, riesz_decompose, solve_finite,
)
from martin import (
    MartinConfig, default_targets, h_transform, kernel_bound, kernel_limit, martin_kernel,
    sample_boundary_paths,
)
from series import (
    TruncationConfig, as_lambda, beta0_estimate, classify_recurrence, green_series, lambda_from_beta,
)

from .config import CLIConfig
from .schemas import (
    COMMANDS, CommandRequest, ErrorRecord, NumericValue, OutputDocument, certainty_of, numeric_map,
)
from .suites import SUITES, run_suite

logger = logging.getLogger(__name__)


class UsageError(Exception):
    """Missing or inconsistent command-line arguments (exit status 2)."""


@dataclass
class Outcome:
    result: Dict[str, Any]
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    exit_code: int = 0
    error: Optional[ErrorRecord] = None


class Context:
    """Lazily resolved inputs shared by the command handlers."""

    def __init__(self, request: CommandRequest):
        self.request = request
        defaults = TruncationConfig()
        self.cfg = TruncationConfig(
            depth=request.depth,
            row_limit=request.row_limit,
            tol=request.tol,
            use_closed_forms=request.closed_forms,
            window_radius=request.window if request.window is not None else defaults.window_radius,
        )
        self.harmonic = HarmonicConfig(schedule=request.schedule)
        self._graph: Optional[GraphSource] = None

    @property
    def graph(self) -> GraphSource:
        if self._graph is None:
            if self.request.graph is not None:
                self._graph = load_graph(self.request.graph)
            elif self.request.gen is not None:
                self._graph = parse_generator_spec(self.request.gen)
            else:
                raise UsageError("a graph source (--graph or --gen) is required")
        return self._graph

    @property
    def has_lambda(self) -> bool:
        return self.request.lam is not None or self.request.beta is not None

    @property
    def lam(self) -> Number:
        try:
            if self.request.lam is not None:
                return as_lambda(self.request.lam)
            if self.request.beta is not None:
                return lambda_from_beta(self.request.beta)
        except ValueError as e:
            raise UsageError(str(e)) from e
        raise UsageError(f"{self.request.command} requires --lambda or --beta")

    def vertex(self, name: str) -> str:
        value = getattr(self.request, name)
        if value is None:
            raise UsageError(f"{self.request.command} requires --{name}")
        return self.graph.require_vertex(value)

    def path(self, name: str) -> Path:
        value = getattr(self.request, name)
        if value is None:
            raise UsageError(f"{self.request.command} requires --{name.replace('_', '-')}")
        return Path(value)

    def vector(self, name: str) -> Dict[str, Number]:
        return load_vector(self.path(name), self.graph.mode)

    def diagnostics(self, **extra) -> Dict[str, Any]:
        out = {
            "depth": self.cfg.depth,
            "row_limit": self.cfg.row_limit,
            "tol": self.cfg.tol,
            "closed_forms": self.cfg.use_closed_forms,
            "arithmetic": self.graph.mode,
        }
        out.update(extra)
        return out


def _lambda_text(ctx: Context) -> str:
    return format_number(ctx.lam)


def _value_records(values: Mapping[str, Number], certified: bool, **columns) -> List[dict]:
    """One TSV row per vertex value, prefixed with ``columns`` and followed by its certainty."""
    return [
        {**columns, "vertex": v, "value": format_number(x), "certainty": certainty_of(x, certified)}
        for v, x in sorted(values.items())
    ]


def _vector_payload(vector: HarmonicVector, certified: bool) -> Dict[str, Any]:
    certified = certified and vector.kind != "candidate"
    return {
        "lambda": format_number(vector.lam),
        "kind": vector.kind,
        "label": vector.label,
        "values": numeric_map(vector.values, certified),
        "diagnostics": vector.diagnostics,
        "records": _value_records(vector.values, certified),
    }


def _nw_size(g: GraphSource, report, radius: int):
    if report.nw is not None:
        return len(report.nw)
    if g.nw_kind == "finite":
        return sum(1 for v in g.probe_window(radius) if g.in_nw(v))
    return g.nw_kind


def cmd_analyze(ctx: Context) -> Outcome:
    g = ctx.graph
    report = classify_vertices(g)
    result: Dict[str, Any] = report.to_dict()
    result["graph"] = g.description
    result["nw_size"] = _nw_size(g, report, ctx.cfg.window_radius)
    if report.nw_kind != "empty":
        beta0 = beta0_estimate(g, ctx.cfg)
        certainty = "exact" if beta0.mode == "exact" else "bounds"
        result["lambda0"] = NumericValue.of(beta0.lambda0, certainty).model_dump()
        result["beta0"] = beta0.to_dict()
        recurrence = classify_recurrence(g, ctx.cfg)
        result["recurrence"] = {
            "verdict": recurrence.verdict,
            "rule": recurrence.rule,
            "evidence": recurrence.evidence,
            "partial_sum": recurrence.partial_sum,
        }
    if ctx.has_lambda:
        result["existence"] = existence_verdict(g, ctx.lam, ctx.cfg).to_dict()
    flat = {k: v for k, v in result.items() if not isinstance(v, (dict, list))}
    flat.update({k: ",".join(map(str, v)) for k, v in result.items() if isinstance(v, list)})
    result["records"] = [{"key": k, "value": "" if v is None else str(v)} for k, v in flat.items()]
    return Outcome(result, ctx.diagnostics())


def cmd_beta0(ctx: Context) -> Outcome:
    report = beta0_estimate(ctx.graph, ctx.cfg)
    payload = report.to_dict()
    certainty = "exact" if report.mode == "exact" else "bounds"
    payload["lambda0_value"] = NumericValue.of(report.lambda0, certainty).model_dump()
    payload["records"] = [report.to_dict()]
    return Outcome(payload, ctx.diagnostics())


def cmd_classify(ctx: Context) -> Outcome:
    verdict = classify_recurrence(ctx.graph, ctx.cfg)
    payload = {
        "verdict": verdict.verdict,
        "rule": verdict.rule,
        "evidence": verdict.evidence,
        "partial_sum": verdict.partial_sum,
        "lambda0": None if verdict.lambda0 is None else format_number(verdict.lambda0),
    }
    payload["records"] = [dict(payload)]
    if verdict.lambda0 is not None:
        payload["lambda0_value"] = NumericValue.of(verdict.lambda0, certainty_of(verdict.lambda0)).model_dump()
    return Outcome(payload, ctx.diagnostics())


def cmd_green(ctx: Context) -> Outcome:
    v, w = ctx.vertex("v"), ctx.vertex("w")
    est = green_series(ctx.graph, v, w, ctx.lam, ctx.cfg)
    payload = est.to_dict()
    payload["value"] = NumericValue.of(est.lower, est.certainty).model_dump()
    payload["partial_terms"] = [NumericValue.of(t, certainty_of(t)).model_dump() for t in est.partial_terms]
    payload["records"] = [{"v": v, "w": w, "lambda": _lambda_text(ctx), **est.to_dict()}]
    return Outcome(payload, ctx.diagnostics())


def cmd_solve(ctx: Context) -> Outcome:
    g = ctx.graph
    if not g.is_finite:
        raise PreconditionError("solve enumerates cones of finite graphs only")
    cone = solve_finite(g, ctx.lam, ctx.vertex("v0"), ctx.harmonic)
    payload = {
        "base_vertex": cone.base_vertex,
        "lambda": format_number(cone.lam),
        "points": [{"label": p.label, "values": numeric_map(p.values)} for p in cone.extreme_points],
        "unbounded_rays": cone.unbounded_rays,
        "records": [
            row
            for i, p in enumerate(cone.extreme_points)
            for row in _value_records(p.values, True, point=i, label=p.label)
        ],
    }
    if cone.is_empty:
        error = ErrorRecord(type="Infeasible", message="No non-zero almost harmonic vector at this lambda")
        return Outcome(payload, ctx.diagnostics(), exit_code=1, error=error)
    return Outcome(payload, ctx.diagnostics())


def cmd_certify(ctx: Context) -> Outcome:
    cert = certify_no_solution(ctx.graph, ctx.lam, ctx.cfg)
    payload = {
        "verdict": "no-solution" if cert else "unknown",
        "certificate": cert.to_dict() if cert else None,
    }
    payload["records"] = [cert.to_dict()] if cert else []
    return Outcome(payload, ctx.diagnostics())


def cmd_extend(ctx: Context) -> Outcome:
    eta = ctx.vector("subset")
    vector = extend_from_hereditary(
        ctx.graph, ctx.lam, list(eta), eta, ctx.cfg, ctx.harmonic, ctx.request.schedule
    )
    return Outcome(_vector_payload(vector, ctx.graph.is_finite), ctx.diagnostics(schedule=ctx.request.schedule))


def cmd_riesz(ctx: Context) -> Outcome:
    psi = ctx.vector("vector")
    pair = riesz_decompose(ctx.graph, ctx.lam, psi, ctx.cfg, ctx.harmonic)
    payload = {
        "lambda": format_number(pair.lam),
        "phi": numeric_map(pair.phi.values, pair.exact),
        "k": numeric_map(pair.k, ctx.graph.is_finite),
        "reconstruction_residual": pair.reconstruction_residual,
        "converged": pair.converged,
        "records": (
            _value_records(pair.phi.values, pair.exact, part="phi")
            + _value_records(pair.k, ctx.graph.is_finite, part="k")
        ),
    }
    return Outcome(payload, ctx.diagnostics(steps=pair.steps, **pair.diagnostics))


def cmd_kernel(ctx: Context) -> Outcome:
    g = ctx.graph
    v0, target = ctx.vertex("v0"), ctx.vertex("target")
    if ctx.request.v is not None:
        vertices = [ctx.vertex("v")]
    else:
        vertices = list(g.vertices) if g.is_finite else g.probe_window(ctx.cfg.window_radius)
    records, kernels = [], []
    for v in vertices:
        value = martin_kernel(g, ctx.lam, v0, v, target, ctx.cfg)
        row = value.to_dict()
        entry = {"v": v, "kernel": NumericValue.of(value.value, value.certainty).model_dump(), "bound": None}
        try:
            bound = kernel_bound(g, ctx.lam, v0, v, ctx.cfg)
            row["bound"] = format_number(bound)
            entry["bound"] = NumericValue.of(bound, certainty_of(bound)).model_dump()
        except PreconditionError:
            row["bound"] = None
        records.append(row)
        kernels.append(entry)
    return Outcome({"v0": v0, "target": target, "kernels": kernels, "records": records}, ctx.diagnostics())


def _read_targets(path: Path) -> List[str]:
    lines = path.read_text(encoding="utf-8").splitlines()
    return [line.split("#", 1)[0].strip() for line in lines if line.split("#", 1)[0].strip()]


def cmd_kernel_limit(ctx: Context) -> Outcome:
    g = ctx.graph
    if ctx.request.targets_file is not None:
        targets = _read_targets(Path(ctx.request.targets_file))
    elif ctx.request.direction is not None:
        targets = default_targets(g, ctx.request.direction, ctx.request.count)
    else:
        raise UsageError("kernel-limit requires --targets-file or --direction")
    report = kernel_limit(g, ctx.lam, ctx.vertex("v0"), targets, cfg=ctx.cfg, config=ctx.harmonic)
    payload = {
        "verdict": report.verdict,
        "cauchy_gap": report.cauchy_gap,
        "sequence": report.sequence,
        "limit": _vector_payload(report.limit_estimate, certified=False),
        "records": report.to_records(),
    }
    return Outcome(payload, ctx.diagnostics(**report.diagnostics))


def cmd_sample(ctx: Context) -> Outcome:
    g = ctx.graph
    lam = ctx.lam
    psi = HarmonicVector(lam, ctx.vector("psi"), kind="harmonic")
    kernel = h_transform(g, lam, psi, ctx.cfg.row_limit, MartinConfig())
    report = sample_boundary_paths(
        kernel, ctx.vertex("v0"), ctx.request.paths, ctx.request.horizon, ctx.request.seed, ctx.cfg
    )
    payload = {
        "fraction": report.fraction,
        "n_paths": report.n_paths,
        "horizon": report.horizon,
        "seed": report.seed,
        "tolerance": report.tol,
        "paths": [
            {
                "index": p.index,
                "final_vertex": p.path[-1],
                "final_error": p.errors[-1] if p.errors else None,
                "converged": p.converged,
                "loop_erased_length": len(p.loop_erased),
            }
            for p in report.paths
        ],
        "records": report.to_records(),
    }
    return Outcome(payload, ctx.diagnostics(kernel_depth=report.depth))


def cmd_check(ctx: Context) -> Outcome:
    request = ctx.request
    if request.suite is not None:
        if request.suite not in SUITES:
            raise UsageError(f"unknown suite {request.suite!r}; available: {sorted(SUITES)}")
        counts = run_suite(request.suite, request.seed, request.trials)
        failed = sum(c["failed"] for c in counts.values())
        payload = {
            "suite": request.suite,
            "invariants": counts,
            "records": [{"invariant": k, **c} for k, c in counts.items()],
        }
        diagnostics = {"seed": request.seed, "trials": request.trials}
        if failed:
            error = ErrorRecord(type="InvariantFailure", message=f"{failed} invariant checks failed")
            return Outcome(payload, diagnostics, exit_code=1, error=error)
        return Outcome(payload, diagnostics)

    report = check_vector(ctx.graph, ctx.lam, ctx.vector("vector"), row_limit=ctx.cfg.row_limit,
                          config=ctx.harmonic)
    payload = {
        "is_almost_harmonic": report.is_almost_harmonic,
        "is_harmonic": report.is_harmonic,
        "positivity_ok": report.positivity_ok,
        "violations": report.violations,
        "slack": report.slack,
        "records": report.to_records(),
    }
    return Outcome(payload, ctx.diagnostics())


HANDLERS: Dict[str, Callable[[Context], Outcome]] = {
    "analyze": cmd_analyze,
    "beta0": cmd_beta0,
    "classify": cmd_classify,
    "green": cmd_green,
    "solve": cmd_solve,
    "certify": cmd_certify,
    "extend": cmd_extend,
    "riesz": cmd_riesz,
    "kernel": cmd_kernel,
    "kernel-limit": cmd_kernel_limit,
    "sample": cmd_sample,
    "check": cmd_check,
}

# Command specific flags on top of the shared ones
COMMAND_FLAGS: Dict[str, Tuple[str, ...]] = {
    "analyze": (),
    "beta0": (),
    "classify": (),
    "green": ("v", "w"),
    "solve": ("v0",),
    "certify": (),
    "extend": ("subset", "schedule"),
    "riesz": ("vector",),
    "kernel": ("v0", "target", "v"),
    "kernel-limit": ("v0", "targets_file", "direction", "count"),
    "sample": ("v0", "psi", "paths", "horizon"),
    "check": ("suite", "vector", "trials"),
}

FLAG_SPECS: Dict[str, Dict[str, Any]] = {
    "v": dict(help="Row vertex"),
    "w": dict(help="Column vertex"),
    "v0": dict(help="Normalization vertex"),
    "target": dict(help="Kernel target vertex"),
    "subset": dict(help="VERTEX VALUE file with eta on a hereditary set"),
    "schedule": dict(choices=["queue", "stack"], default="queue", help="Saturation sweep order"),
    "vector": dict(help="VERTEX VALUE vector file"),
    "psi": dict(help="VERTEX VALUE file with a harmonic vector"),
    "targets_file": dict(help="File with one target vertex per line"),
    "direction": dict(choices=["+", "-"], help="Family default target direction"),
    "count": dict(type=int, default=32, help="Number of default targets"),
    "paths": dict(type=int, default=100, help="Number of sampled paths"),
    "horizon": dict(type=int, default=100, help="Steps per sampled path"),
    "suite": dict(help="Invariant suite name (e.g. core)"),
    "trials": dict(type=int, default=None, help="Random graphs per invariant"),
}


def build_parser(config: Optional[CLIConfig] = None) -> argparse.ArgumentParser:
    """Argument parser with one sub-command per operation."""
    config = config or CLIConfig()
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_argument_group("graph source")
    source.add_argument("--graph", help="Path of a kmsgraph v1 document")
    source.add_argument("--gen", help='Generator spec, e.g. "zwalk p=1/2 q=1/2"')
    common.add_argument("--lambda", dest="lam", help="lambda = e^beta (decimal or p/q)")
    common.add_argument("--beta", type=float, help="beta, converted to lambda = e^beta")
    common.add_argument("--depth", type=int, default=config.depth, help="Series truncation depth")
    common.add_argument("--tol", type=float, default=config.tol, help="Convergence tolerance")
    common.add_argument("--row-limit", type=int, default=config.row_limit, help="Edges per emitter row")
    common.add_argument("--window", type=int, help="Probe window radius")
    common.add_argument("--seed", type=int, default=config.seed, help="Random seed")
    common.add_argument("--no-closed-forms", dest="closed_forms", action="store_false",
                        help="Ignore family closed forms")
    common.add_argument("--format", choices=["json", "tsv"], default=config.format, help="Output format")
    common.add_argument("--log-level", default=config.log_level, help="Logging level (stderr)")

    parser = argparse.ArgumentParser(
        prog="kmsgraph",
        description="Almost harmonic vectors of non-negative matrices over countable graphs",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        sub = subparsers.add_parser(command, parents=[common])
        for name in COMMAND_FLAGS[command]:
            sub.add_argument("--" + name.replace("_", "-"), dest=name, **FLAG_SPECS[name])
    return parser


def request_from_args(args: argparse.Namespace, config: Optional[CLIConfig] = None) -> CommandRequest:
    config = config or CLIConfig()
    fields = {k: v for k, v in vars(args).items() if k != "log_level" and v is not None}
    fields.setdefault("trials", config.suite_trials)
    return CommandRequest(**fields)


def plain(value: Any) -> Any:
    """Replace Fractions and numpy scalars so the payload is JSON serializable."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, Fraction):
        return format_number(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def run(request: CommandRequest) -> Tuple[int, OutputDocument]:
    """
    Dispatch a validated request.

    Returns:
        (exit status, OutputDocument); domain errors become error records

    Raises:
        UsageError: Missing or inconsistent arguments
    """
    document = OutputDocument(
        command=request.command,
        request=request.model_dump(by_alias=True, exclude_none=True),
    )
    ctx = Context(request)
    try:
        outcome = HANDLERS[request.command](ctx)
    except UsageError:
        raise
    except KMSError as e:
        logger.error(f"{request.command} failed: {e.message}")
        document.error = ErrorRecord(type=type(e).__name__, message=e.message, exit_code=e.exit_code)
        return e.exit_code, document
    except (ValueError, OSError) as e:
        logger.error(f"{request.command} failed: {e}")
        document.error = ErrorRecord(type=type(e).__name__, message=str(e))
        return 1, document
    document.result = plain(outcome.result)
    document.diagnostics = plain(outcome.diagnostics)
    document.error = outcome.error
    return outcome.exit_code, document


def render(document: OutputDocument, fmt: str = "json") -> str:
    """Serialize an OutputDocument as JSON or as a TSV table of its records."""
    if fmt == "json":
        return document.model_dump_json(indent=2) + "\n"
    if document.error is not None and not document.records:
        frame = pd.DataFrame([document.error.model_dump()])
    else:
        frame = pd.DataFrame(document.records)
    return frame.to_csv(sep="\t", index=False)


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run the command and print its OutputDocument."""
    config = CLIConfig()
    parser = build_parser(config)
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    try:
        request = request_from_args(args, config)
    except ValidationError as e:
        parser.error("; ".join(err["msg"] for err in e.errors()))
    try:
        code, document = run(request)
    except UsageError as e:
        parser.error(str(e))
    sys.stdout.write(render(document, request.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
