"""
Series Module for KMSGraph

Matrix powers, Green series, first-passage series, the critical value
lambda0 = e^{beta0}, recurrence classification and the Vere-Jones check.
"""

from .config import TruncationConfig
from .critical import (
    beta0_estimate, classify_recurrence, diagonal_growth, is_exactly_singular, vere_jones_residual,
)
from .estimates import (
    Beta0Report, RecurrenceVerdict, SeriesEstimate, as_lambda, lambda_from_beta, summarize_terms,
    term_period,
)
from .powers import (
    GreenColumns, first_passage, first_passage_column, first_passage_series, green_column,
    green_series, is_zero_vector, power_entry, power_sequence,
)

__version__ = "1.0.0"
__all__ = [
    "TruncationConfig",
    "beta0_estimate", "classify_recurrence", "diagonal_growth", "is_exactly_singular",
    "vere_jones_residual",
    "Beta0Report", "RecurrenceVerdict", "SeriesEstimate", "as_lambda", "lambda_from_beta",
    "summarize_terms", "term_period",
    "GreenColumns", "first_passage", "first_passage_column", "first_passage_series",
    "green_column", "green_series", "is_zero_vector", "power_entry", "power_sequence",
]
