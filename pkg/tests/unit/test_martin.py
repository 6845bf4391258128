"""Tests for Martin kernels, h-transforms and path sampling."""

import pytest
from fractions import Fraction

from graph_core import InvalidVectorError, PreconditionError, SubStochasticRowError
from harmonic import HarmonicVector, check_vector
from martin import (
    MartinConfig, checkpoint_steps, cylinder_measure, default_targets, emitter_extremal, h_transform,
    kernel_bound, kernel_limit, loop_erase, martin_kernel, path_rng, sample_boundary_paths,
)
from series import TruncationConfig

WINDOW = [str(i) for i in range(-3, 4)]


def _exponential(lam=1.25, radius=60):
    """The lambda-harmonic vector 2^i of the symmetric walk at lambda = 5/4."""
    return HarmonicVector(lam, {str(i): 2.0 ** i for i in range(-radius, radius + 1)}, kind="harmonic")


class TestMartinConfig:
    """Test configuration validation."""

    def test_defaults(self):
        config = MartinConfig()
        assert config.kernel_depth_factor >= 1
        assert 0 < config.sample_tol < 1

    def test_invalid_sample_tol(self):
        with pytest.raises(ValueError):
            MartinConfig(sample_tol=1.5)

    def test_invalid_checkpoints(self):
        with pytest.raises(ValueError):
            MartinConfig(checkpoints=0)


class TestKernel:
    """Test single kernels and their bounds."""

    def test_sink_kernel(self, sink_graph):
        assert martin_kernel(sink_graph, 2, "v", "s", "s").value == 2
        assert martin_kernel(sink_graph, 2, "v", "v", "s").value == 1

    def test_kernel_to_dict(self, sink_graph):
        payload = martin_kernel(sink_graph, 2, "v", "s", "s").to_dict()
        assert payload["value"] == "2"
        assert payload["v"] == "s"
        assert payload["certainty"] == "exact"

    def test_unreachable_target(self, sink_graph):
        with pytest.raises(PreconditionError):
            martin_kernel(sink_graph, 2, "s", "v", "v")

    def test_kernel_bound(self, sink_graph):
        assert kernel_bound(sink_graph, 2, "v", "s") == 2
        assert kernel_bound(sink_graph, 2, "v", "v") == 1
        with pytest.raises(PreconditionError):
            kernel_bound(sink_graph, 2, "s", "v")

    def test_walk_kernel(self, zwalk):
        kernel = martin_kernel(zwalk, 1.25, "0", "2", "10")
        assert kernel.value == pytest.approx(4.0)
        assert kernel.value <= kernel_bound(zwalk, 1.25, "0", "2") * (1 + 1e-12)
        assert kernel.certainty == "heuristic"

    def test_bracketed_kernel(self, zwalk):
        cfg = TruncationConfig(tail_ratio_bound=0.9)
        kernel = martin_kernel(zwalk, 1.25, "0", "1", "3", cfg)
        assert kernel.certainty == "bounds"
        assert kernel.lower <= kernel.value <= kernel.upper


class TestEmitterExtremal:
    """Test the extremal vectors attached to V_infinity."""

    def test_sink(self, sink_graph):
        xi = emitter_extremal(sink_graph, 2, "v", "s")
        assert xi.values == {"v": 1, "s": 2}
        assert xi.label == "emitter(s)"
        report = check_vector(sink_graph, 2, xi)
        assert report.is_almost_harmonic
        assert report.slack == ["s"]

    def test_requires_v_infinity(self, two_cycle_tail):
        with pytest.raises(PreconditionError):
            emitter_extremal(two_cycle_tail, 1, "u", "v")

    def test_requires_emitter_vertex(self, sink_graph):
        with pytest.raises(PreconditionError):
            emitter_extremal(sink_graph, 2, "v", "v")


class TestKernelLimit:
    """Test kernels along target sequences."""

    def test_default_targets(self, zwalk, two_cycle_tail):
        assert default_targets(zwalk, "+", 3) == ["1", "2", "3"]
        assert default_targets(zwalk, "-", 2) == ["-1", "-2"]
        with pytest.raises(PreconditionError):
            default_targets(two_cycle_tail)

    def test_walk_limit(self, zwalk):
        report = kernel_limit(zwalk, 1.25, "0", default_targets(zwalk, "+", 32), WINDOW)
        assert report.verdict == "converged"
        assert report.limit_estimate.kind == "harmonic"
        for i in range(-3, 4):
            assert report.limit_estimate.get(str(i)) == pytest.approx(2.0 ** i, rel=1e-9)

    def test_negative_end(self, zwalk):
        report = kernel_limit(zwalk, 1.25, "0", default_targets(zwalk, "-", 32), WINDOW)
        assert report.limit_estimate.get("-2") == pytest.approx(4.0, rel=1e-9)

    @pytest.mark.parametrize("direction,sign", [("+", 1), ("-", -1)])
    def test_wide_window(self, zwalk, direction, sign):
        cfg = TruncationConfig(depth=512)
        window = [str(i) for i in range(-20, 21)]
        report = kernel_limit(zwalk, 1.25, "0", default_targets(zwalk, direction, 60), window, cfg)
        assert report.verdict == "converged"
        for i in range(-20, 21):
            assert report.limit_estimate.get(str(i)) == pytest.approx(2.0 ** (sign * i), rel=1e-6)

    def test_short_sequence_is_inconclusive(self, zwalk):
        report = kernel_limit(zwalk, 1.25, "0", ["1", "2"], WINDOW)
        assert report.verdict == "inconclusive"
        assert report.cauchy_gap > 0.5

    def test_repeated_targets(self, zwalk):
        with pytest.raises(PreconditionError):
            kernel_limit(zwalk, 1.25, "0", ["3", "3"], WINDOW)

    def test_no_targets(self, zwalk):
        with pytest.raises(PreconditionError):
            kernel_limit(zwalk, 1.25, "0", [], WINDOW)


class TestHTransform:
    """Test the h-transformed kernel and cylinder measures."""

    def test_harmonic_rows(self, two_cycle_tail):
        psi = HarmonicVector(Fraction(1), {"u": Fraction(1), "v": Fraction(1), "w": Fraction(1)})
        kernel = h_transform(two_cycle_tail, 1, psi)
        assert kernel.probability("u", "v") == 1
        assert kernel.probability("u", "w") == 0
        assert kernel.row("w") == [("v", 1)]

    def test_walk_drift(self, zwalk):
        kernel = h_transform(zwalk, 1.25, _exponential())
        assert kernel.probability("0", "1") == pytest.approx(0.8)
        assert kernel.probability("0", "-1") == pytest.approx(0.2)

    def test_missing_row(self, zwalk):
        kernel = h_transform(zwalk, 1.25, _exponential(radius=3))
        with pytest.raises(SubStochasticRowError):
            kernel.row("3")

    def test_sink_row_is_substochastic(self, sink_graph):
        psi = HarmonicVector(Fraction(2), {"s": Fraction(1), "v": Fraction(1, 2)})
        with pytest.raises(SubStochasticRowError):
            h_transform(sink_graph, 2, psi)

    def test_rejects_zero_entries(self, two_cycle_tail):
        with pytest.raises(InvalidVectorError):
            h_transform(two_cycle_tail, 1, HarmonicVector(1, {"u": 0, "v": 1, "w": 1}))

    def test_cylinder_measure(self, zwalk):
        measure, normalized = cylinder_measure(zwalk, 1.25, _exponential(), ["0", "1", "2"])
        assert measure == pytest.approx(0.64)
        assert normalized == pytest.approx(0.64)

    def test_cylinder_of_single_vertex(self, two_cycle_tail):
        psi = HarmonicVector(1, {"u": 1, "v": 1, "w": 1})
        assert cylinder_measure(two_cycle_tail, 1, psi, ["v"]) == (1, 1)

    def test_empty_cylinder(self, two_cycle_tail):
        with pytest.raises(ValueError):
            cylinder_measure(two_cycle_tail, 1, HarmonicVector(1, {"u": 1}), [])


class TestSampling:
    """Test path utilities and the boundary sampler."""

    def test_loop_erase(self):
        assert loop_erase(["a", "b", "c", "b", "d"]) == ["a", "b", "d"]
        assert loop_erase(["a", "b", "a", "c"]) == ["a", "c"]
        assert loop_erase([]) == []

    def test_checkpoint_steps(self):
        assert checkpoint_steps(400, 4) == [100, 200, 300, 400]
        assert checkpoint_steps(3, 4) == [1, 2, 3]
        assert checkpoint_steps(0, 4) == [0]

    def test_path_streams(self):
        assert path_rng(7, 3).random() == path_rng(7, 3).random()
        assert path_rng(7, 3).random() != path_rng(7, 4).random()

    def test_reproducible(self, zwalk):
        kernel = h_transform(zwalk, 1.25, _exponential())
        first = sample_boundary_paths(kernel, "0", 5, 20, seed=1)
        second = sample_boundary_paths(kernel, "0", 5, 20, seed=1)
        assert [p.path for p in first.paths] == [p.path for p in second.paths]
        assert [p.errors for p in first.paths] == [p.errors for p in second.paths]
        assert all(len(p.path) == 21 and p.path[0] == "0" for p in first.paths)
        assert first.paths[0].checkpoints == [5, 10, 15, 20]

    def test_no_paths(self, zwalk):
        kernel = h_transform(zwalk, 1.25, _exponential())
        report = sample_boundary_paths(kernel, "0", 0, 10, seed=0)
        assert report.paths == []
        assert report.fraction == 0.0

    def test_start_outside_psi(self, zwalk):
        kernel = h_transform(zwalk, 1.25, _exponential(radius=3))
        with pytest.raises(PreconditionError):
            sample_boundary_paths(kernel, "10", 1, 1, seed=0)

    @pytest.mark.slow
    def test_paths_converge_to_psi(self, zwalk):
        kernel = h_transform(zwalk, 1.25, _exponential(radius=410))
        report = sample_boundary_paths(kernel, "0", 200, 400, seed=0, cfg=TruncationConfig())
        assert report.fraction >= 0.95
