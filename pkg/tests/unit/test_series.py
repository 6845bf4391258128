"""Tests for matrix powers, Green series and critical values."""

import math

import pytest
from fractions import Fraction

from graph_core import FiniteGraph, PreconditionError, parse_generator_spec
from series import (
    Beta0Report, GreenColumns, SeriesEstimate, TruncationConfig, as_lambda, beta0_estimate,
    classify_recurrence, diagonal_growth, first_passage, first_passage_column,
    first_passage_series, green_series, is_exactly_singular, lambda_from_beta, power_entry,
    power_sequence, summarize_terms, term_period, vere_jones_residual,
)


class TestTruncationConfig:
    """Test configuration validation."""

    def test_defaults(self):
        cfg = TruncationConfig()
        assert cfg.depth >= 0
        assert cfg.row_limit >= 1

    @pytest.mark.parametrize("kwargs", [
        {"depth": -1},
        {"row_limit": 0},
        {"tol": -1e-3},
        {"tail_ratio_bound": 1.0},
        {"divergence_threshold": 0},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            TruncationConfig(**kwargs)

    def test_with_depth(self):
        cfg = TruncationConfig(depth=10, tol=1e-6)
        deeper = cfg.with_depth(20)
        assert deeper.depth == 20
        assert deeper.tol == 1e-6
        assert cfg.depth == 10


class TestLambda:
    """Test lambda validation."""

    def test_rational_strings(self):
        assert as_lambda("5/4") == Fraction(5, 4)
        assert as_lambda("0.5") == Fraction(1, 2)
        assert as_lambda(2) == Fraction(2)

    def test_float_passes_through(self):
        assert as_lambda(1.25) == 1.25

    @pytest.mark.parametrize("value", [0, -1, "0", "-3/2", "abc", "1/0", float("inf"), float("nan")])
    def test_invalid(self, value):
        with pytest.raises(ValueError):
            as_lambda(value)

    def test_from_beta(self):
        assert lambda_from_beta(0.0) == 1.0
        assert lambda_from_beta(math.log(2)) == pytest.approx(2.0)


class TestEstimates:
    """Test SeriesEstimate and the term summaries."""

    def test_invariants(self):
        with pytest.raises(ValueError):
            SeriesEstimate(lower=2.0, upper=1.0)
        with pytest.raises(ValueError):
            SeriesEstimate(lower=1.0, converged=True, diverged=True)

    def test_term_period(self):
        assert term_period([1, 0, 1, 0, 1]) == 2
        assert term_period([0, 0, 0]) == 1
        assert term_period([0, 0, 0, 1, 0, 0, 1]) == 3

    def test_exhausted_series_is_exact(self):
        est = summarize_terms([Fraction(1), Fraction(1, 2), Fraction(1, 4)], TruncationConfig(), exhausted=True)
        assert est.lower == Fraction(7, 4)
        assert est.upper == Fraction(7, 4)
        assert est.certainty == "exact"
        assert est.is_exact

    def test_tail_ratio_bound(self):
        cfg = TruncationConfig(tail_ratio_bound=0.5)
        est = summarize_terms([1.0, 0.5, 0.25], cfg)
        assert est.lower == pytest.approx(1.75)
        assert est.upper == pytest.approx(2.0)
        assert est.certainty == "bounds"
        assert est.converged

    def test_blow_up_is_divergent(self):
        cfg = TruncationConfig(divergence_threshold=1e3)
        est = summarize_terms([2.0 ** n for n in range(21)], cfg)
        assert est.diverged
        assert not est.converged
        assert est.certainty == "heuristic"

    def test_stagnating_terms_are_divergent(self):
        est = summarize_terms([1.0] * 10, TruncationConfig())
        assert est.diverged

    def test_decaying_terms_converge(self):
        est = summarize_terms([0.5 ** n for n in range(200)], TruncationConfig())
        assert est.converged
        assert not est.diverged
        assert est.certainty == "lower-bound"
        assert est.lower == pytest.approx(2.0)

    def test_terms_dying_out_are_not_divergent(self):
        est = summarize_terms([0.0, 0.0, 0.0, 0.125] + [0.0] * 20, TruncationConfig())
        assert not est.diverged
        assert est.converged

    def test_kept_terms(self):
        est = summarize_terms([0.5 ** n for n in range(100)], TruncationConfig())
        assert len(est.partial_terms) == 16


class TestPowers:
    """Test matrix powers and first passages."""

    def test_zwalk_two_step_return(self, zwalk, zwalk_exact):
        assert power_entry(zwalk, "0", "0", 2).lower == pytest.approx(0.5)
        est = power_entry(zwalk_exact, "0", "0", 2)
        assert est.lower == Fraction(1, 2)
        assert est.certainty == "exact"

    def test_identity_power(self, two_cycle_tail):
        assert power_entry(two_cycle_tail, "u", "u", 0).lower == 1
        assert power_entry(two_cycle_tail, "u", "v", 0).lower == 0

    def test_power_sequence(self, two_cycle_tail):
        assert power_sequence(two_cycle_tail, "v", "v", 5) == [1, 0, 1, 0, 1, 0]

    def test_negative_exponent(self, two_cycle_tail):
        with pytest.raises(ValueError):
            power_entry(two_cycle_tail, "u", "v", -1)

    def test_first_passage(self, two_cycle_tail):
        assert first_passage(two_cycle_tail, "u", "w", 1) == 0
        assert first_passage(two_cycle_tail, "u", "w", 2) == 1
        assert first_passage(two_cycle_tail, "v", "v", 2) == 1
        assert first_passage(two_cycle_tail, "v", "v", 4) == 0
        assert first_passage(two_cycle_tail, "v", "v", 0) == 0

    def test_truncated_emitter_row_is_lower_bound(self, star):
        cfg = TruncationConfig(row_limit=4)
        est = power_entry(star, "u", "u", 2, cfg)
        assert est.certainty == "lower-bound"
        assert est.upper is None
        assert est.lower == pytest.approx(0.5 + 0.25 + 0.125 + 0.0625)


class TestGreenSeries:
    """Test Green and first-passage series."""

    def test_loop_geometric(self, loop2):
        est = green_series(loop2, "v", "v", 4, TruncationConfig(depth=128))
        assert est.lower == pytest.approx(2.0, rel=1e-12)
        assert est.converged

    def test_halfline_single_term(self, halfline):
        est = green_series(halfline, "0", "3", 2, TruncationConfig(depth=16))
        assert est.lower == pytest.approx(0.125)
        assert est.converged
        assert not est.diverged

    def test_sink_is_exact(self, sink_graph):
        est = green_series(sink_graph, "v", "s", "2")
        assert est.lower == Fraction(1, 2)
        assert est.upper == Fraction(1, 2)
        assert est.certainty == "exact"

    def test_zwalk_closed_form(self, zwalk):
        cfg = TruncationConfig(depth=256)
        assert green_series(zwalk, "0", "0", 1.25, cfg).lower == pytest.approx(5 / 3, rel=1e-9)
        assert green_series(zwalk, "0", "3", 1.25, cfg).lower == pytest.approx(5 / 24, rel=1e-9)

    def test_first_passage_series(self, zwalk):
        # F(1, 0) at z = 4/5 is (1 - sqrt(1 - z^2)) / z = 1/2
        est = first_passage_series(zwalk, "1", "0", 1.25, TruncationConfig(depth=256))
        assert est.lower == pytest.approx(0.5, rel=1e-9)

    def test_green_columns(self, sink_graph):
        columns = GreenColumns(sink_graph, ["s"], "2", ["v"], track=["v"])
        assert columns.exhausted
        assert columns.get("v", "s") == Fraction(1, 2)
        assert columns.column_map("s") == {"s": Fraction(1), "v": Fraction(1, 2)}
        assert columns.estimate("v", "s").certainty == "exact"
        with pytest.raises(KeyError):
            columns.estimate("s", "s")

    def test_green_columns_match_series(self, zwalk):
        cfg = TruncationConfig(depth=128)
        columns = GreenColumns(zwalk, ["0", "2"], 1.25, ["0"], cfg, track=["0"])
        assert columns.get("0", "2") == pytest.approx(green_series(zwalk, "0", "2", 1.25, cfg).lower)

    @pytest.mark.parametrize("depth", range(1, 11))
    def test_truncated_propagation(self, two_cycle_tail, depth):
        """G_N = I + lambda^{-1} A G_{N-1} holds exactly on a graph with a cycle."""
        g, lam = two_cycle_tail, Fraction(3, 2)
        vertices = g.vertices
        shallow = {(v, w): green_series(g, v, w, lam, TruncationConfig(depth=depth - 1, tol=0)).lower
                   for v in vertices for w in vertices}
        for v in vertices:
            for w in vertices:
                deep = green_series(g, v, w, lam, TruncationConfig(depth=depth, tol=0)).lower
                step = sum((a * shallow[(u, w)] for u, a in g.adjacency[v]), Fraction(0)) / lam
                assert deep == (1 if v == w else 0) + step

    def test_first_passage_column(self, two_cycle_tail):
        op, acc, returns = first_passage_column(two_cycle_tail, "v", 1, ["u"], TruncationConfig(depth=8))
        assert returns[:3] == [0, 0, 1]
        assert acc[op.index["u"]] == 1
        assert acc[op.index["w"]] == 1


class TestCriticalValue:
    """Test beta0 estimation."""

    def test_finite_exact_root(self, two_cycle_tail):
        report = beta0_estimate(two_cycle_tail)
        assert report.mode == "exact"
        assert report.lambda0 == Fraction(1)
        assert report.beta0 == 0.0
        assert report.witness_vertex == "v"

    def test_irrational_root(self):
        g = FiniteGraph([("a", "a", 1), ("a", "b", 1), ("b", "a", 1)])
        report = beta0_estimate(g)
        assert report.lambda0_exact is None
        assert float(report.lambda0) == pytest.approx((1 + math.sqrt(5)) / 2, rel=1e-9)

    def test_loop_generator(self, loop2):
        report = beta0_estimate(loop2)
        assert report.mode == "exact"
        assert float(report.lambda0) == pytest.approx(2.0)
        assert report.beta0 == pytest.approx(math.log(2))

    def test_zwalk_bounds(self, zwalk):
        report = beta0_estimate(zwalk, TruncationConfig(depth=256))
        assert report.lambda0_upper == pytest.approx(1.0)
        assert 0.9 < report.lambda0_lower <= 1.0

    def test_zwalk_without_closed_form(self, zwalk):
        report = beta0_estimate(zwalk, TruncationConfig(depth=256, use_closed_forms=False))
        assert report.mode == "bounds"
        assert report.lambda0_upper is None
        assert report.lambda0 == report.lambda0_lower

    def test_empty_nw(self, halfline, sink_graph):
        with pytest.raises(PreconditionError):
            beta0_estimate(halfline)
        with pytest.raises(PreconditionError):
            beta0_estimate(sink_graph)

    def test_diagonal_growth(self, loop2):
        assert diagonal_growth(loop2, "v", TruncationConfig(depth=20)) == pytest.approx(2.0)

    def test_report_lambda0_choice(self):
        bracket = Beta0Report("bounds", 1.0, 3.0, "v", "test")
        assert bracket.lambda0 == 2.0
        closed = Beta0Report("bounds", 1.0, 3.0, "v", "test", closed_form=True)
        assert closed.lambda0 == 3.0
        with pytest.raises(ValueError):
            Beta0Report("bounds", 3.0, 1.0, "v", "test")

    def test_exact_singularity(self):
        assert is_exactly_singular([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]])
        assert not is_exactly_singular([[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]])


class TestRecurrence:
    """Test recurrence classification."""

    def test_finite_nw(self, two_cycle_tail, loop2):
        for g in (two_cycle_tail, loop2):
            verdict = classify_recurrence(g)
            assert verdict.verdict == "recurrent"
            assert verdict.rule == "finite-nonwandering"

    def test_cycle_with_tail(self):
        verdict = classify_recurrence(parse_generator_spec("cycle_with_tail n=3"))
        assert verdict.verdict == "recurrent"

    def test_zwalk_closed_form(self, zwalk):
        verdict = classify_recurrence(zwalk, TruncationConfig(depth=256))
        assert verdict.verdict == "recurrent"
        assert verdict.rule == "closed-form"

    def test_zwalk_without_closed_form(self, zwalk):
        verdict = classify_recurrence(zwalk, TruncationConfig(depth=256, use_closed_forms=False))
        assert verdict.verdict == "unknown"

    def test_drifting_walk_at_its_critical_value(self):
        # lambda0 = 2 sqrt(pq); the diagonal series still diverges there
        g = parse_generator_spec("zwalk p=3/4 q=1/4")
        verdict = classify_recurrence(g, TruncationConfig(depth=256))
        assert verdict.verdict == "recurrent"
        assert float(verdict.lambda0) == pytest.approx(math.sqrt(3) / 2)


class TestVereJones:
    """Test the renewal identity G = I + F G."""

    def test_loop(self, loop2, loop2_exact):
        assert vere_jones_residual(loop2, "v", "v", 4, TruncationConfig(depth=40)) < 1e-9
        assert vere_jones_residual(loop2_exact, "v", "v", 4, TruncationConfig(depth=40)) == 0.0

    def test_zwalk(self, zwalk_exact):
        assert vere_jones_residual(zwalk_exact, "0", "0", "5/4", TruncationConfig(depth=64)) < 1e-9

    def test_off_diagonal(self, zwalk):
        assert vere_jones_residual(zwalk, "2", "0", 1.25, TruncationConfig(depth=64)) < 1e-9

    def test_large_lambda(self, loop2):
        assert vere_jones_residual(loop2, "v", "v", 10 ** 6, TruncationConfig(depth=10)) < 1e-12

    def test_preconditions(self, loop2, two_cycle_tail):
        with pytest.raises(PreconditionError):
            vere_jones_residual(loop2, "v", "v", 1)
        with pytest.raises(PreconditionError):
            vere_jones_residual(two_cycle_tail, "u", "v", 2)

    def test_full_product_on_loop(self, loop2_exact):
        """The product of truncated sums misses exactly the tail of G at depth 40."""
        cfg = TruncationConfig(depth=40)
        assert vere_jones_residual(loop2_exact, "v", "v", 4, cfg, product="cauchy") == 0.0
        assert vere_jones_residual(loop2_exact, "v", "v", 4, cfg, product="full") == float(Fraction(1, 2 ** 41))

    def test_full_product_shrinks_with_depth(self, zwalk):
        shallow = vere_jones_residual(zwalk, "0", "0", 1.25, TruncationConfig(depth=64), product="full")
        deep = vere_jones_residual(zwalk, "0", "0", 1.25, TruncationConfig(depth=256), product="full")
        assert deep < shallow
        assert deep < 1e-12

    def test_unknown_product(self, loop2):
        with pytest.raises(ValueError):
            vere_jones_residual(loop2, "v", "v", 4, product="dirichlet")
