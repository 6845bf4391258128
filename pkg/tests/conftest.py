"""Pytest configuration and fixtures."""

import pytest
import sys
from fractions import Fraction
from pathlib import Path

# Add modules to path
sys.path.insert(0, str(Path(__file__).parent.parent / "modules"))

FIXTURES = Path(__file__).parent.parent / "data" / "fixtures"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running numerical checks")


@pytest.fixture
def fixtures_dir():
    """Directory of graph and vector fixtures."""
    return FIXTURES


@pytest.fixture
def two_cycle_tail():
    """u -> v <-> w with unit weights (NW = {v, w}, lambda0 = 1)."""
    from graph_core import load_graph
    return load_graph(FIXTURES / "two_cycle_tail.kg")


@pytest.fixture
def sink_graph():
    """Single edge v -> s into a sink."""
    from graph_core import load_graph
    return load_graph(FIXTURES / "sink.kg")


@pytest.fixture
def chain_loop():
    """a -> b -> c with a loop at c."""
    from graph_core import load_graph
    return load_graph(FIXTURES / "chain_loop.kg")


@pytest.fixture
def loop2():
    """Generator: one vertex with a self-loop of weight 2."""
    from graph_core import parse_generator_spec
    return parse_generator_spec("loop a=2")


@pytest.fixture
def loop2_exact():
    """Same loop with rational weights."""
    from graph_core import parse_generator_spec
    return parse_generator_spec("loop a=2 mode=exact")


@pytest.fixture
def halfline():
    from graph_core import parse_generator_spec
    return parse_generator_spec("halfline")


@pytest.fixture
def zwalk():
    """Symmetric nearest-neighbour walk on the integers (float weights)."""
    from graph_core import parse_generator_spec
    return parse_generator_spec("zwalk p=1/2 q=1/2")


@pytest.fixture
def zwalk_exact():
    from graph_core import parse_generator_spec
    return parse_generator_spec("zwalk p=1/2 q=1/2 mode=exact")


@pytest.fixture
def star():
    """Infinite emitter u with u -> w_i of weight 2^-i and w_i -> u of weight 1."""
    from graph_core import parse_generator_spec
    return parse_generator_spec("star_emitter r=1/2")


@pytest.fixture
def half():
    return Fraction(1, 2)
