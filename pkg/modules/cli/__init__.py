"""
CLI Module for KMSGraph

Command-line surface over the graph, series, harmonic and martin modules:
request validation, command dispatch, JSON/TSV output documents and the
randomized invariant suites.
"""

from .config import CLIConfig, SCHEMA_VERSION
from .main import HANDLERS, Context, Outcome, UsageError, build_parser, main, plain, render, run
from .schemas import COMMANDS, CommandRequest, ErrorRecord, NumericValue, OutputDocument
from .suites import SUITES, random_dag, random_graph, run_suite

__version__ = "1.0.0"
__all__ = [
    "CLIConfig", "SCHEMA_VERSION",
    "HANDLERS", "Context", "Outcome", "UsageError", "build_parser", "main", "plain", "render", "run",
    "COMMANDS", "CommandRequest", "ErrorRecord", "NumericValue", "OutputDocument",
    "SUITES", "random_dag", "random_graph", "run_suite",
]
