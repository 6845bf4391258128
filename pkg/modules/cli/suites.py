"""
Randomized invariant suites run by ``check --suite``.

Every invariant draws its own random finite graphs from a seeded numpy
generator, so a suite run is reproducible from (seed, trials).
"""

import logging
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from graph_core import (
    FiniteGraph, KMSError, hereditary_saturated_closure, is_cofinal, is_hereditary, is_saturated,
)
from harmonic import (
    HarmonicVector, check_vector, extend_from_hereditary, lattice_join, lattice_meet, potential_hat,
    recurrent_harmonic, solve_finite,
)
from series import (
    TruncationConfig, beta0_estimate, first_passage_series, green_series, power_entry,
)

logger = logging.getLogger(__name__)

# Outcome of one trial: True (passed), False (failed) or None (not applicable)
Check = Callable[[np.random.Generator], Optional[bool]]

PERRON_CFG = TruncationConfig(tol=1e-12)


def _name(i: int) -> str:
    return f"v{i:02d}"


def _weight(rng: np.random.Generator) -> Fraction:
    return Fraction(int(rng.integers(1, 6)), int(rng.integers(1, 4)))


def _rational(rng: np.random.Generator) -> Fraction:
    return Fraction(int(rng.integers(1, 5)), int(rng.integers(1, 3)))


def random_graph(
    rng: np.random.Generator,
    max_vertices: int = 8,
    density: float = 0.3,
    strongly_connected: bool = False,
    sink: bool = False
) -> FiniteGraph:
    """
    Random exact graph on v00, v01, ...

    Args:
        rng: Random generator
        max_vertices: Upper bound on the number of vertices (at least 2 are drawn)
        density: Probability of each off-cycle edge
        strongly_connected: Add the cycle v00 -> v01 -> ... -> v00
        sink: Add a sink ``s`` with one incoming edge per drawn vertex
    """
    n = int(rng.integers(2, max_vertices + 1))
    edges = {}
    if strongly_connected:
        for i in range(n):
            edges[(_name(i), _name((i + 1) % n))] = _weight(rng)
    for i in range(n):
        for j in range(n):
            if (_name(i), _name(j)) not in edges and rng.random() < density:
                edges[(_name(i), _name(j))] = _weight(rng)
    if sink:
        for i in range(n):
            if rng.random() < 0.5 or i == n - 1:
                edges[(_name(i), "s")] = _weight(rng)
    vertices = [_name(i) for i in range(n)]
    return FiniteGraph([(v, w, a) for (v, w), a in edges.items()], vertices)


def random_dag(rng: np.random.Generator, max_vertices: int = 8) -> FiniteGraph:
    """Random acyclic exact graph whose last vertex is a sink reachable from every vertex."""
    n = int(rng.integers(2, max_vertices + 1))
    edges = {}
    for i in range(n - 1):
        edges[(_name(i), _name(i + 1))] = _weight(rng)
        for j in range(i + 2, n):
            if rng.random() < 0.4:
                edges[(_name(i), _name(j))] = _weight(rng)
    return FiniteGraph([(v, w, a) for (v, w), a in edges.items()])


def constant_row_graph(
    rng: np.random.Generator,
    max_vertices: int = 6,
    c: Optional[Fraction] = None
) -> FiniteGraph:
    """Strongly connected exact graph whose rows all sum to the same rational c (drawn if omitted)."""
    base = random_graph(rng, max_vertices, strongly_connected=True)
    if c is None:
        c = _rational(rng)
    edges = []
    for v in base.vertices:
        row = base.adjacency[v]
        total = sum(a for _, a in row)
        edges.extend((v, w, c * a / total) for w, a in row)
    return FiniteGraph(edges)


def two_block_graph(rng: np.random.Generator) -> Tuple[FiniteGraph, Fraction, Dict[str, HarmonicVector]]:
    """
    Root ``r`` above two disjoint constant-row blocks and a sink ``s``.

    At lambda = c, the common row sum, the cone has three extremals: one
    harmonic vector per block and the potential of the sink.

    Returns:
        (graph, c, {"a": block a extremal, "b": block b extremal, "s": sink extremal})
    """
    c = _rational(rng)
    edges, entries = [], {}
    for prefix in ("a", "b"):
        block = constant_row_graph(rng, 4, c)
        edges.extend((prefix + v, prefix + w, a) for v, w, a in block.edges())
        entries[prefix] = (_weight(rng), block.vertices)
        edges.append(("r", prefix + block.vertices[0], entries[prefix][0]))
    into_sink = _weight(rng)
    edges.append(("r", "s", into_sink))
    g = FiniteGraph(edges)

    extremals = {}
    for prefix, (weight, block_vertices) in entries.items():
        values = {v: Fraction(0) for v in g.vertices}
        values.update({prefix + v: Fraction(1) for v in block_vertices})
        values["r"] = weight / c
        extremals[prefix] = HarmonicVector(c, values, kind="harmonic")
    values = {v: Fraction(0) for v in g.vertices}
    values.update({"s": Fraction(1), "r": into_sink / c})
    extremals["s"] = HarmonicVector(c, values)
    return g, c, extremals


def _dense(g: FiniteGraph) -> List[List[Fraction]]:
    index = {v: i for i, v in enumerate(g.vertices)}
    matrix = [[Fraction(0)] * len(g.vertices) for _ in g.vertices]
    for v, w, a in g.edges():
        matrix[index[v]][index[w]] = Fraction(a)
    return matrix


def perron_pair(g: FiniteGraph) -> Tuple[float, np.ndarray]:
    """Dense eigensolver reference: spectral radius and Perron vector scaled to 1 at the first vertex."""
    values, vectors = np.linalg.eig(np.array(_dense(g), dtype=float))
    k = int(np.argmax(values.real))
    vector = np.abs(vectors[:, k].real)
    return float(values[k].real), vector / vector[0]


def _combine(g: FiniteGraph, lam: Fraction, extremals: Dict[str, HarmonicVector],
             weights: Dict[str, Fraction]) -> HarmonicVector:
    values = {v: sum((weights[key] * extremals[key].get(v) for key in weights), Fraction(0)) for v in g.vertices}
    return HarmonicVector(lam, values)


def _subset(rng: np.random.Generator, g: FiniteGraph) -> List[str]:
    return [v for v in g.vertices if rng.random() < 0.3]


def closure_laws(rng: np.random.Generator) -> Optional[bool]:
    g = random_graph(rng, 10, sink=bool(rng.random() < 0.5))
    s, t = _subset(rng, g), _subset(rng, g)
    cs = hereditary_saturated_closure(g, s)
    cst = hereditary_saturated_closure(g, set(s) | set(t))
    return (
        set(s) <= cs
        and hereditary_saturated_closure(g, cs) == cs
        and cs <= cst
        and is_hereditary(g, cs)
        and is_saturated(g, cs)
    )


def cofinality_bruteforce(rng: np.random.Generator) -> Optional[bool]:
    g = random_graph(rng, 10, density=0.2, sink=bool(rng.random() < 0.3))
    vertices = g.vertices
    proper = False
    for size in range(1, len(vertices)):
        for subset in combinations(vertices, size):
            if is_hereditary(g, subset) and is_saturated(g, subset):
                proper = True
                break
        if proper:
            break
    return is_cofinal(g).holds == (not proper)


def nw_heredity(rng: np.random.Generator) -> Optional[bool]:
    g = random_graph(rng, 10, density=0.25)
    if not is_cofinal(g).holds or not g.nw:
        return None
    return all(w in g.nw for v in g.nw for w, _ in g.adjacency[v])


def chapman_kolmogorov(rng: np.random.Generator) -> Optional[bool]:
    g = random_graph(rng, 6)
    m, n = int(rng.integers(0, 4)), int(rng.integers(0, 4))
    v, w = g.vertices[0], g.vertices[-1]
    total = sum(
        power_entry(g, v, u, m).lower * power_entry(g, u, w, n).lower for u in g.vertices
    )
    return power_entry(g, v, w, m + n).lower == total


def supermultiplicativity(rng: np.random.Generator) -> Optional[bool]:
    g = random_graph(rng, 6, strongly_connected=True)
    v = g.vertices[int(rng.integers(0, len(g.vertices)))]
    m, n = int(rng.integers(1, 6)), int(rng.integers(1, 6))
    left = power_entry(g, v, v, m + n).lower
    return left >= power_entry(g, v, v, m).lower * power_entry(g, v, v, n).lower


def collatz_wielandt(rng: np.random.Generator) -> Optional[bool]:
    g = random_graph(rng, 8, strongly_connected=True)
    rho, _ = perron_pair(g)
    report = beta0_estimate(g, PERRON_CFG)
    below = report.lambda0_lower <= rho * (1 + 1e-9)
    above = report.lambda0_upper is None or report.lambda0_upper >= rho * (1 - 1e-9)
    return below and above and abs(float(report.lambda0) - rho) <= 1e-9 * max(1.0, rho)


def perron_vector(rng: np.random.Generator) -> Optional[bool]:
    g = random_graph(rng, 8, strongly_connected=True)
    _, reference = perron_pair(g)
    cone = solve_finite(g, beta0_estimate(g, PERRON_CFG).lambda0, g.vertices[0])
    if len(cone.extreme_points) != 1 or cone.unbounded_rays:
        return False
    point = cone.extreme_points[0]
    return all(abs(float(point.get(v)) - x) <= 1e-8 * x for v, x in zip(g.vertices, reference))


def green_propagation(rng: np.random.Generator) -> Optional[bool]:
    """G_N = I + lambda^{-1} A G_{N-1} entrywise, on graphs with cycles."""
    g = random_graph(rng, 6, strongly_connected=True, sink=bool(rng.random() < 0.5))
    lam = _rational(rng)
    depth = int(rng.integers(1, 9))
    green = {}
    for n in (depth - 1, depth):
        cfg = TruncationConfig(depth=n, tol=0)
        green[n] = {(v, w): green_series(g, v, w, lam, cfg).lower for v in g.vertices for w in g.vertices}
    for v in g.vertices:
        for w in g.vertices:
            rhs = (1 if v == w else 0) + sum(a * green[depth - 1][(u, w)] for u, a in g.adjacency[v]) / lam
            if green[depth][(v, w)] != rhs:
                return False
    return True


def _sink_extension(g: FiniteGraph, lam: Fraction, value: Fraction, schedule: str):
    sinks = list(g.sinks)
    return extend_from_hereditary(g, lam, sinks, {s: value for s in sinks}, schedule=schedule)


def extension_uniqueness(rng: np.random.Generator) -> Optional[bool]:
    g = random_dag(rng)
    lam = _rational(rng)
    value = Fraction(int(rng.integers(1, 9)))
    by_queue = _sink_extension(g, lam, value, "queue")
    by_stack = _sink_extension(g, lam, value, "stack")
    return (
        by_queue.values == by_stack.values
        and len(by_queue.values) == len(g.vertices)
        and check_vector(g, lam, by_queue, tol=0).is_almost_harmonic
    )


def positivity(rng: np.random.Generator) -> Optional[bool]:
    """Every non-zero solution produced on a cofinal graph is strictly positive."""
    if rng.random() < 0.5:
        g = constant_row_graph(rng)
        c = sum(a for _, a in g.adjacency[g.vertices[0]])
        cone = solve_finite(g, c, g.vertices[0])
        if len(cone.extreme_points) != 1 or any(cone.extreme_points[0].get(v) != 1 for v in g.vertices):
            return False
        w = g.vertices[int(rng.integers(0, len(g.vertices)))]
        vectors = [cone.extreme_points[0], recurrent_harmonic(g, w, TruncationConfig(depth=24))]
    else:
        g = random_dag(rng)
        lam = _rational(rng)
        vectors = list(solve_finite(g, lam, g.vertices[0]).extreme_points)
        vectors.append(_sink_extension(g, lam, Fraction(1), "queue"))
        vectors.append(potential_hat(g, lam, {s: Fraction(1) for s in g.sinks}))
    if not is_cofinal(g).holds:
        return None
    if len(vectors) < 2:
        return False
    return all(
        all(xi.get(v) > 0 for v in g.vertices) for xi in vectors
    )


def sub_invariance(rng: np.random.Generator) -> Optional[bool]:
    """Truncated first-passage sums F_N(v, v0) never exceed xi_v / xi_v0."""
    if rng.random() < 0.5:
        g = constant_row_graph(rng)
        lam = sum(a for _, a in g.adjacency[g.vertices[0]])
    else:
        g = random_graph(rng, 6, strongly_connected=True, sink=True)
        lam = max(sum(a for _, a in g.adjacency[v]) for v in g.vertices) + 1
    v0 = g.vertices[0]
    points = solve_finite(g, lam, v0).extreme_points
    if not points:
        return False
    for depth in (1, 2, 4, 8, 16):
        cfg = TruncationConfig(depth=depth, tol=0)
        passage = {v: first_passage_series(g, v, v0, lam, cfg).lower for v in g.vertices}
        for xi in points:
            if any(passage[v] * xi.get(v0) > xi.get(v) for v in g.vertices):
                return False
    return True


def meet_join(rng: np.random.Generator) -> Optional[bool]:
    """Meets and joins of harmonic combinations match the coefficientwise min and max."""
    g, c, extremals = two_block_graph(rng)
    a = {key: Fraction(int(rng.integers(1, 5))) for key in ("a", "b")}
    b = {key: Fraction(int(rng.integers(1, 5))) for key in ("a", "b")}
    xi, mu = _combine(g, c, extremals, a), _combine(g, c, extremals, b)
    cfg = TruncationConfig(tol=0)
    meet = lattice_meet(g, c, xi, mu, cfg)
    join = lattice_join(g, c, xi, mu, cfg)
    lowest = _combine(g, c, extremals, {key: min(a[key], b[key]) for key in a})
    highest = _combine(g, c, extremals, {key: max(a[key], b[key]) for key in a})
    for v in g.vertices:
        if not meet.get(v) <= min(xi.get(v), mu.get(v)) or join.get(v) < max(xi.get(v), mu.get(v)):
            return False
    return (
        meet.values == lowest.values
        and join.values == highest.values
        and check_vector(g, c, meet, tol=0).is_almost_harmonic
        and check_vector(g, c, join, tol=0).is_almost_harmonic
    )


SUITES: Dict[str, Dict[str, Check]] = {
    "core": {
        "closure_laws": closure_laws,
        "cofinality_bruteforce": cofinality_bruteforce,
        "nw_heredity": nw_heredity,
        "chapman_kolmogorov": chapman_kolmogorov,
        "supermultiplicativity": supermultiplicativity,
        "collatz_wielandt": collatz_wielandt,
        "perron_vector": perron_vector,
        "green_propagation": green_propagation,
        "extension_uniqueness": extension_uniqueness,
        "positivity": positivity,
        "sub_invariance": sub_invariance,
        "meet_join": meet_join,
    },
}


def run_suite(name: str, seed: int = 0, trials: int = 20, show_progress: bool = False) -> Dict[str, Dict[str, int]]:
    """
    Run every invariant of a suite on ``trials`` random graphs.

    Returns:
        {invariant: {"passed": n, "failed": n, "skipped": n}}
    """
    if name not in SUITES:
        raise ValueError(f"Unknown suite: {name}")
    counts: Dict[str, Dict[str, int]] = {}
    for position, (invariant, check) in enumerate(SUITES[name].items()):
        rng = np.random.default_rng([seed, position])
        tally = {"passed": 0, "failed": 0, "skipped": 0}
        for trial in tqdm(range(trials), desc=invariant, disable=not show_progress):
            try:
                outcome = check(rng)
            except KMSError as e:
                logger.error(f"{invariant} trial {trial} raised {type(e).__name__}: {e.message}")
                outcome = False
            key = "skipped" if outcome is None else ("passed" if outcome else "failed")
            tally[key] += 1
        if tally["failed"]:
            logger.warning(f"{invariant}: {tally['failed']} of {trials} trials failed")
        counts[invariant] = tally
    logger.info(f"✓ Suite {name} finished")
    return counts
