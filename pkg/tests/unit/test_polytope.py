"""Tests for the finite-graph solution polytope."""

import numpy as np
import pytest
from fractions import Fraction
from scipy.optimize import linprog

from cli.suites import perron_pair, random_graph
from graph_core import load_graph, parse_generator_spec
from harmonic import DoubleDescription, check_vector, constraint_rows, solve_finite
from series import TruncationConfig, beta0_estimate, first_passage_series


def _lp(g, lam, v0, objective=None):
    vertices, equalities = constraint_rows(g, lam, "float")
    normalization = [1.0 if v == v0 else 0.0 for v in vertices]
    a_eq = np.array([[float(x) for x in row] for row in equalities] + [normalization])
    b_eq = np.zeros(len(a_eq))
    b_eq[-1] = 1.0
    if objective is None:
        objective = np.zeros(len(vertices))
    return linprog(objective, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")


def _lp_feasible(g, lam, v0):
    return _lp(g, lam, v0).status == 0


class TestDoubleDescription:
    """Test the ray enumeration on small cones."""

    def test_orthant(self):
        dd = DoubleDescription(3, "exact")
        assert len(dd.rays) == 3

    def test_inequality(self):
        dd = DoubleDescription(2, "exact")
        dd.add([1, -1], equality=False)
        rays = sorted(tuple(r) for r in dd.rays)
        assert rays == [(Fraction(1), Fraction(0)), (Fraction(1), Fraction(1))]

    def test_equality(self):
        dd = DoubleDescription(2, "exact")
        dd.add([1, -1], equality=True)
        assert [tuple(r) for r in dd.rays] == [(Fraction(1), Fraction(1))]

    def test_float_mode(self):
        dd = DoubleDescription(2, "float")
        dd.add([0.5, -1.0], equality=True)
        assert len(dd.rays) == 1
        assert dd.rays[0] == pytest.approx([1.0, 0.5])


class TestSolveFinite:
    """Test extreme points of the normalized solution set."""

    def test_two_cycle_tail(self, two_cycle_tail):
        cone = solve_finite(two_cycle_tail, 1, "u")
        assert len(cone.extreme_points) == 1
        point = cone.extreme_points[0]
        assert point.values == {"u": 1, "v": 1, "w": 1}
        assert point.label == "harmonic"
        assert point.kind == "harmonic"

    def test_empty_cone(self, two_cycle_tail):
        cone = solve_finite(two_cycle_tail, 2, "u")
        assert cone.is_empty
        assert cone.labels == []

    def test_sink(self, sink_graph):
        cone = solve_finite(sink_graph, 2, "s")
        assert cone.labels == ["sink(s)"]
        point = cone.extreme_points[0]
        assert point.values == {"s": Fraction(1), "v": Fraction(1, 2)}
        assert point.kind == "almost_harmonic"
        assert check_vector(sink_graph, 2, point).is_almost_harmonic

    def test_chain(self, chain_loop):
        cone = solve_finite(chain_loop, 1, "a")
        assert [p.values for p in cone.extreme_points] == [{"a": 1, "b": 1, "c": 1}]

    def test_unbounded_rays(self, fixtures_dir):
        g = load_graph(fixtures_dir / "two_loops.kg")
        cone = solve_finite(g, 1, "v")
        assert cone.unbounded_rays == 1
        assert cone.extreme_points[0].values == {"v": 1, "w": 0}

    def test_float_graph(self, two_cycle_tail):
        cone = solve_finite(two_cycle_tail.to_mode("float"), 1.0, "u")
        assert cone.extreme_points[0].get("w") == pytest.approx(1.0)

    def test_records(self, sink_graph):
        records = solve_finite(sink_graph, 2, "s").to_records()
        assert records == [
            {"point": 0, "label": "sink(s)", "vertex": "s", "value": "1"},
            {"point": 0, "label": "sink(s)", "vertex": "v", "value": "1/2"},
        ]

    def test_rejects_generators(self):
        with pytest.raises(TypeError):
            solve_finite(parse_generator_spec("loop a=2"), 2, "v")

    @pytest.mark.parametrize("lam", [Fraction(1, 2), Fraction(1), Fraction(2), Fraction(5)])
    def test_agrees_with_linear_program(self, two_cycle_tail, lam):
        cone = solve_finite(two_cycle_tail, lam, "u")
        assert cone.is_empty != _lp_feasible(two_cycle_tail, lam, "u")

    @pytest.mark.parametrize("depth", [1, 2, 4, 6])
    def test_first_passage_below_ratio(self, two_cycle_tail, depth):
        """Truncated first-passage sums into v never exceed xi_x / xi_v."""
        point = solve_finite(two_cycle_tail, 1, "v").extreme_points[0]
        cfg = TruncationConfig(depth=depth, tol=0)
        for x in two_cycle_tail.vertices:
            passage = first_passage_series(two_cycle_tail, x, "v", 1, cfg).lower
            assert passage * point["v"] <= point[x]
        if depth >= 2:
            assert first_passage_series(two_cycle_tail, "v", "v", 1, cfg).lower == 1


class TestRandomPolytopes:
    """Cross-check extreme points on random graphs against a linear program."""

    @pytest.mark.parametrize("seed", range(12))
    def test_extreme_points(self, seed):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, 8, sink=seed % 2 == 0)
        lam = Fraction(int(rng.choice([1, 2, 3])))
        cone = solve_finite(g, lam, "v00")
        assert cone.is_empty != _lp_feasible(g, lam, "v00")

        vertices, equalities = constraint_rows(g, lam, "float")
        n = len(vertices)
        normalization = [1.0 if v == "v00" else 0.0 for v in vertices]
        for point in cone.extreme_points:
            tight = [[float(x) for x in row] for row in equalities] + [normalization]
            tight += [[1.0 if j == i else 0.0 for j in range(n)] for i, v in enumerate(vertices) if point[v] == 0]
            assert np.linalg.matrix_rank(np.array(tight)) == n

        objective = rng.uniform(-1.0, 1.0, n)
        result = _lp(g, lam, "v00", -objective)
        if result.status == 0:
            best = max(float(np.dot(objective, [float(p[v]) for v in vertices])) for p in cone.extreme_points)
            assert -result.fun == pytest.approx(best, rel=1e-6, abs=1e-9)
        elif result.status == 3:
            assert cone.unbounded_rays > 0
        else:
            assert cone.is_empty


class TestPerronVector:
    """Compare the critical value and Perron vector with a dense eigensolver."""

    @pytest.mark.parametrize("seed", range(50))
    def test_strongly_connected(self, seed):
        g = random_graph(np.random.default_rng(seed), 8, strongly_connected=True)
        rho, reference = perron_pair(g)
        lam0 = beta0_estimate(g, TruncationConfig(tol=1e-12)).lambda0
        assert float(lam0) == pytest.approx(rho, abs=1e-9)

        cone = solve_finite(g, lam0, g.vertices[0])
        assert len(cone.extreme_points) == 1
        assert cone.unbounded_rays == 0
        point = cone.extreme_points[0]
        assert [float(point[v]) for v in g.vertices] == pytest.approx(list(reference), rel=1e-8)
