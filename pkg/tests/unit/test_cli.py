"""Tests for the command-line interface."""

import json
from fractions import Fraction

import numpy as np
import pytest

from cli import CommandRequest, OutputDocument, build_parser, main, plain, render, run
from cli.suites import SUITES, run_suite


def _invoke(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def _json(capsys, *argv):
    code, out = _invoke(capsys, *argv)
    return code, json.loads(out)


class TestParser:
    """Test argument parsing and request validation."""

    def test_lambda_flag(self):
        args = build_parser().parse_args(["green", "--gen", "loop a=2", "--lambda", "3", "--v", "v", "--w", "v"])
        assert args.lam == "3"
        assert args.command == "green"

    def test_two_sources_rejected(self, capsys, fixtures_dir):
        with pytest.raises(SystemExit) as info:
            main(["analyze", "--graph", str(fixtures_dir / "sink.kg"), "--gen", "loop a=2"])
        assert info.value.code == 2

    def test_missing_source(self):
        with pytest.raises(ValueError):
            CommandRequest(command="analyze")

    def test_lambda_and_beta(self):
        with pytest.raises(ValueError):
            CommandRequest(command="analyze", gen="loop a=2", lam="2", beta=0.5)

    def test_missing_lambda(self, capsys, fixtures_dir):
        with pytest.raises(SystemExit) as info:
            main(["solve", "--graph", str(fixtures_dir / "two_cycle_tail.kg"), "--v0", "u"])
        assert info.value.code == 2

    def test_unknown_suite(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["check", "--suite", "nonexistent"])
        assert info.value.code == 2


class TestCommands:
    """Test the sub-commands on fixtures."""

    def test_solve(self, capsys, fixtures_dir):
        code, doc = _json(capsys, "solve", "--graph", str(fixtures_dir / "two_cycle_tail.kg"),
                          "--lambda", "1", "--v0", "u")
        assert code == 0
        assert doc["schema_version"] == "1"
        assert doc["request"]["lambda"] == "1"
        point = doc["result"]["points"][0]
        assert point["label"] == "harmonic"
        assert {v: x["value"] for v, x in point["values"].items()} == {"u": "1", "v": "1", "w": "1"}
        assert {x["certainty"] for x in point["values"].values()} == {"exact"}
        assert doc["error"] is None

    def test_solve_infeasible(self, capsys, fixtures_dir):
        code, doc = _json(capsys, "solve", "--graph", str(fixtures_dir / "two_cycle_tail.kg"),
                          "--lambda", "2", "--v0", "u")
        assert code == 1
        assert doc["error"]["type"] == "Infeasible"
        assert doc["result"]["points"] == []

    def test_solve_on_generator(self, capsys):
        code, doc = _json(capsys, "solve", "--gen", "loop a=2", "--lambda", "2", "--v0", "v")
        assert code == 1
        assert doc["error"]["type"] == "PreconditionError"

    def test_unknown_vertex(self, capsys, fixtures_dir):
        code, doc = _json(capsys, "solve", "--graph", str(fixtures_dir / "sink.kg"),
                          "--lambda", "2", "--v0", "x")
        assert code == 1
        assert doc["error"]["type"] == "UnknownVertexError"

    def test_tsv(self, capsys, fixtures_dir):
        code, out = _invoke(capsys, "solve", "--graph", str(fixtures_dir / "sink.kg"),
                            "--lambda", "2", "--v0", "s", "--format", "tsv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "point\tlabel\tvertex\tvalue\tcertainty"
        assert lines[1:] == ["0\tsink(s)\ts\t1\texact", "0\tsink(s)\tv\t1/2\texact"]

    def test_check_vector(self, capsys, fixtures_dir):
        code, doc = _json(capsys, "check", "--graph", str(fixtures_dir / "two_cycle_tail.kg"),
                          "--lambda", "1", "--vector", str(fixtures_dir / "ones.vec"))
        assert code == 0
        assert doc["result"]["is_harmonic"] is True
        assert doc["diagnostics"]["arithmetic"] == "exact"

    def test_check_with_beta(self, capsys, fixtures_dir):
        code, doc = _json(capsys, "check", "--graph", str(fixtures_dir / "two_cycle_tail.kg"),
                          "--beta", "0", "--vector", str(fixtures_dir / "ones.vec"))
        assert code == 0
        assert doc["result"]["is_almost_harmonic"] is True

    def test_extend(self, capsys, fixtures_dir):
        code, doc = _json(capsys, "extend", "--graph", str(fixtures_dir / "sink.kg"),
                          "--lambda", "2", "--subset", str(fixtures_dir / "sink_eta.vec"))
        assert code == 0
        values = doc["result"]["values"]
        assert {v: x["value"] for v, x in values.items()} == {"s": "1", "v": "1/2"}
        assert values["v"] == {"value": "1/2", "approx": 0.5, "certainty": "exact"}
        assert doc["diagnostics"]["schedule"] == "queue"

    def test_riesz(self, capsys, fixtures_dir):
        code, doc = _json(capsys, "riesz", "--graph", str(fixtures_dir / "sink.kg"),
                          "--lambda", "2", "--vector", str(fixtures_dir / "sink_point.vec"))
        assert code == 0
        assert doc["result"]["k"] == {"s": {"value": "1", "approx": 1.0, "certainty": "exact"}}
        assert {v: x["value"] for v, x in doc["result"]["phi"].items()} == {"s": "0", "v": "0"}
        assert {x["certainty"] for x in doc["result"]["phi"].values()} == {"exact"}

    def test_kernel(self, capsys, fixtures_dir):
        code, doc = _json(capsys, "kernel", "--graph", str(fixtures_dir / "sink.kg"),
                          "--lambda", "2", "--v0", "v", "--target", "s", "--v", "s")
        assert code == 0
        record = doc["result"]["records"][0]
        assert record["value"] == "2"
        assert record["bound"] == "2"
        assert record["certainty"] == "exact"
        kernel = doc["result"]["kernels"][0]
        assert kernel["kernel"] == {"value": "2", "approx": 2.0, "certainty": "exact"}
        assert kernel["bound"]["certainty"] == "exact"

    def test_truncated_kernel_is_heuristic(self, capsys):
        code, doc = _json(capsys, "kernel", "--gen", "zwalk p=1/2 q=1/2", "--lambda", "5/4",
                          "--v0", "0", "--target", "2", "--v", "1")
        assert code == 0
        kernel = doc["result"]["kernels"][0]
        assert kernel["kernel"]["approx"] == pytest.approx(2.0, rel=1e-9)
        assert kernel["kernel"]["certainty"] == "heuristic"
        assert doc["result"]["records"][0]["certainty"] == "heuristic"

    def test_kernel_limit_values_are_heuristic(self, capsys):
        code, doc = _json(capsys, "kernel-limit", "--gen", "zwalk p=1/2 q=1/2", "--lambda", "5/4",
                          "--v0", "0", "--direction", "+", "--count", "8", "--window", "2")
        assert code == 0
        values = doc["result"]["limit"]["values"]
        assert values
        assert {x["certainty"] for x in values.values()} == {"heuristic"}

    def test_certify(self, capsys):
        code, doc = _json(capsys, "certify", "--gen", "loop a=2", "--lambda", "1")
        assert code == 0
        assert doc["result"]["verdict"] == "no-solution"
        assert doc["result"]["certificate"]["exponent"] == 1

    def test_analyze(self, capsys):
        code, doc = _json(capsys, "analyze", "--gen", "loop a=2", "--lambda", "2")
        assert code == 0
        assert doc["result"]["lambda0"]["approx"] == pytest.approx(2.0)
        assert doc["result"]["existence"]["exists"] == "yes"

    def test_green(self):
        request = CommandRequest(command="green", gen="zwalk p=1/2 q=1/2", lam="5/4", v="0", w="0")
        code, document = run(request)
        assert code == 0
        assert document.result["value"]["approx"] == pytest.approx(5 / 3, rel=1e-6)

    def test_kernel_limit_needs_targets(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["kernel-limit", "--gen", "zwalk p=1/2 q=1/2", "--lambda", "5/4", "--v0", "0"])
        assert info.value.code == 2

    def test_sample(self, tmp_path):
        psi = tmp_path / "psi.vec"
        psi.write_text("".join(f"{i} {2.0 ** i!r}\n" for i in range(-40, 41)))
        request = CommandRequest(
            command="sample", gen="zwalk p=1/2 q=1/2", lam="5/4", v0="0", psi=str(psi),
            paths=3, horizon=5, seed=2,
        )
        code, document = run(request)
        assert code == 0
        assert document.result["n_paths"] == 3
        assert len(document.result["paths"]) == 3

    def test_suite(self, capsys):
        code, doc = _json(capsys, "check", "--suite", "core", "--trials", "2", "--seed", "3")
        assert code == 0
        counts = doc["result"]["invariants"]
        assert "positivity" in counts
        assert all(c["failed"] == 0 for c in counts.values())


class TestRendering:
    """Test payload conversion and output documents."""

    def test_plain(self):
        assert plain({"a": Fraction(1, 3), "b": [np.float64(0.5), np.bool_(True)]}) == {
            "a": "1/3", "b": [0.5, True],
        }

    def test_error_tsv(self):
        document = OutputDocument(command="solve", error={"type": "Infeasible", "message": "empty"})
        out = render(document, "tsv")
        assert out.splitlines()[0] == "type\tmessage\texit_code"


class TestSuites:
    """Run each core invariant on seeds of its own."""

    @pytest.mark.parametrize("invariant", sorted(SUITES["core"]))
    def test_core_invariant(self, invariant):
        check = SUITES["core"][invariant]
        outcomes = [check(np.random.default_rng([seed, 11])) for seed in range(6)]
        assert False not in outcomes

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            run_suite("nonexistent")

    def test_counts(self):
        counts = run_suite("core", seed=5, trials=2)
        assert set(counts) == set(SUITES["core"])
        assert all(sum(tally.values()) == 2 for tally in counts.values())
        assert all(tally["failed"] == 0 for tally in counts.values())
