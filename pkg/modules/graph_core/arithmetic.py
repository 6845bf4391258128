"""Number handling for the exact (rational) and float arithmetic modes."""

import math
from fractions import Fraction
from typing import Iterable, Union

import numpy as np

Number = Union[Fraction, float]

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)


def parse_number(token: str, mode: str = EXACT) -> Number:
    """
    Parse a decimal or ``p/q`` token.

    Args:
        token: Text such as ``"1/2"``, ``"0.25"`` or ``"3"``
        mode: Arithmetic mode of the result

    Returns:
        Fraction in exact mode, float otherwise

    Raises:
        ValueError: If the token is not a finite number
    """
    token = token.strip()
    try:
        value = Fraction(token)
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Not a number: {token!r}") from e
    return convert(value, mode)


def convert(value, mode: str) -> Number:
    """Convert a number to the representation used by ``mode``."""
    if mode == EXACT:
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError(f"Cannot represent {value} exactly")
            return Fraction(value)
        return Fraction(value)
    return float(value)


def mode_of(value) -> str:
    """Arithmetic mode implied by a single number."""
    return EXACT if isinstance(value, (Fraction, int)) else FLOAT


def joint_mode(graph_mode: str, *values) -> str:
    """Exact only when the graph and every parameter are rational."""
    if graph_mode != EXACT:
        return FLOAT
    return EXACT if all(mode_of(v) == EXACT for v in values) else FLOAT


def zero(mode: str) -> Number:
    return Fraction(0) if mode == EXACT else 0.0


def one(mode: str) -> Number:
    return Fraction(1) if mode == EXACT else 1.0


def zeros(n: int, mode: str) -> np.ndarray:
    """Zero vector; an object array of Fractions in exact mode."""
    if mode == EXACT:
        out = np.empty(n, dtype=object)
        out[:] = [Fraction(0)] * n
        return out
    return np.zeros(n, dtype=float)


def as_vector(values: Iterable, mode: str) -> np.ndarray:
    values = [convert(v, mode) for v in values]
    if mode == EXACT:
        out = np.empty(len(values), dtype=object)
        out[:] = values
        return out
    return np.asarray(values, dtype=float)


def within(residual: Number, tol: float, scale: Number = 1) -> bool:
    """
    Tolerance test used throughout.

    Exact zero tolerance compares exactly; otherwise the tolerance is relative
    to ``max(1, scale)``.
    """
    if tol == 0:
        return residual == 0
    return abs(float(residual)) <= tol * max(1.0, abs(float(scale)))


def format_number(value: Number) -> str:
    """Render ``p/q`` for Fractions and ``repr`` for floats."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))
