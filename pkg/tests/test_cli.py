import json
import math

import pytest

from topoforge.cli import _components_from_args, build_parser, main
from topoforge.instance import FIBONACCI_IF_BIMODAL, instance_to_json

from conftest import two_blob_instance


def run(argv):
    return main([str(a) for a in argv])


@pytest.fixture
def instance_file(tmp_path):
    p = tmp_path / "inst.json"
    assert run(["gen", "--n", 8, "--seed", 7, "--out", p]) == 0
    return p


class TestGen:
    def test_byte_identical_outputs(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run(["gen", "--n", 10, "--seed", 1, "--out", a]) == 0
        assert run(["gen", "--n", 10, "--seed", 1, "--out", b]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_different_seeds_differ(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(["gen", "--n", 10, "--seed", 1, "--out", a])
        run(["gen", "--n", 10, "--seed", 2, "--out", b])
        assert a.read_bytes() != b.read_bytes()

    def test_bad_region_is_input_error(self, tmp_path):
        code = run(["gen", "--n", 5, "--seed", 0, "--xmin", 5, "--xmax", 5,
                    "--out", tmp_path / "x.json"])
        assert code == 1


class TestSolve:
    def test_single_user_instance(self, tmp_path, capsys):
        inst = tmp_path / "one.json"
        inst.write_text(json.dumps({"users": [{"id": 1, "x": 0, "y": 0, "w": 4.0}]}))
        out = tmp_path / "sol.json"
        assert run(["solve", "--instance", inst, "--out", out]) == 0
        doc = json.loads(out.read_text())
        assert doc["frontier"] == [1]
        assert doc["total_cost"] == pytest.approx(5 + 2 * math.sqrt(4))
        assert "frontier size 1" in capsys.readouterr().out

    def test_two_blob_fixture(self, tmp_path):
        inst = tmp_path / "blobs.json"
        inst.write_text(instance_to_json(two_blob_instance(per_blob=6, separation=80.0)))
        out = tmp_path / "sol.json"
        assert run(["solve", "--instance", inst, "--out", out]) == 0
        doc = json.loads(out.read_text())
        assert len(doc["frontier"]) == 2

    def test_malformed_instance_no_partial_output(self, tmp_path):
        inst = tmp_path / "bad.json"
        inst.write_text('{"users": [{"id": 1, "x": 0, "y": 0, "w": -1}]}')
        out = tmp_path / "sol.json"
        assert run(["solve", "--instance", inst, "--out", out]) == 1
        assert not out.exists()

    def test_missing_file_is_input_error(self, tmp_path):
        assert run(["solve", "--instance", tmp_path / "nope.json"]) == 1

    def test_verbose_prints_location_trace(self, instance_file, tmp_path, capsys):
        out = tmp_path / "sol.json"
        assert run(["solve", "--instance", instance_file, "--out", out, "--verbose"]) == 0
        text = capsys.readouterr().out
        assert "root station location" in text and "phase 1" in text

    def test_byte_identical_reruns(self, instance_file, tmp_path):
        a, b = tmp_path / "s1.json", tmp_path / "s2.json"
        assert run(["solve", "--instance", instance_file, "--out", a, "--seed", 3]) == 0
        assert run(["solve", "--instance", instance_file, "--out", b, "--seed", 3]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestSweep:
    def test_profile_csv(self, instance_file, tmp_path, capsys):
        out = tmp_path / "prof.csv"
        assert run(["sweep", "--instance", instance_file, "--out", out]) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "angle,h"
        assert 1 <= len(lines) - 1 <= 8
        summary = capsys.readouterr().out
        assert "r=" in summary and "bimodal=" in summary

    def test_two_user_instance(self, tmp_path):
        inst = tmp_path / "two.json"
        inst.write_text(json.dumps({"users": [
            {"id": 1, "x": 0, "y": 0, "w": 1}, {"id": 2, "x": 9, "y": 2, "w": 1},
        ]}))
        out = tmp_path / "prof.csv"
        assert run(["sweep", "--instance", inst, "--out", out]) == 0
        assert len(out.read_text().strip().splitlines()) - 1 <= 2

    def test_single_user_rejected(self, tmp_path):
        inst = tmp_path / "one.json"
        inst.write_text(json.dumps({"users": [{"id": 1, "x": 0, "y": 0, "w": 1}]}))
        assert run(["sweep", "--instance", inst, "--out", tmp_path / "p.csv"]) == 1


class TestBench:
    def test_scaling_writes_two_files(self, tmp_path):
        csv_p, json_p = tmp_path / "s.csv", tmp_path / "s.json"
        code = run(["bench", "--mode", "scaling", "--sizes", "10,20", "--repeats", 3,
                    "--out-csv", csv_p, "--out-json", json_p])
        assert code == 0
        assert csv_p.exists() and json_p.exists()
        summary = json.loads(json_p.read_text())
        assert summary["sizes"] == [10, 20]

    def test_bimodality_report(self, tmp_path):
        csv_p, json_p = tmp_path / "b.csv", tmp_path / "b.json"
        code = run(["bench", "--mode", "bimodality", "--trials", 5, "--n", 8,
                    "--out-csv", csv_p, "--out-json", json_p, "--seed", 2])
        assert code == 0
        rows = csv_p.read_text().strip().splitlines()
        assert rows[0] == "seed,n,range_ratio,bimodal"
        assert len(rows) == 6
        assert 0.0 <= json.loads(json_p.read_text())["fraction_bimodal_given_range"] <= 1.0


class TestReferenceExamples:
    @pytest.mark.parametrize("which", ["table1", "table3a", "table3b", "table4"])
    def test_examples_verify(self, which, capsys):
        assert run(["paper-example", which]) == 0
        out = capsys.readouterr().out
        if which == "table4":
            assert "F1 = 248" in out
            assert "5 6 14 16 17 18 19 30 62 63" in out
        if which == "table3a":
            assert "46 > 45" in out


class TestOracleCheck:
    def test_suites_pass(self, capsys):
        assert run(["oracle-check", "--max-n", 7]) == 0
        out = capsys.readouterr().out
        assert out.count("PASS") == 4 and "FAIL" not in out


class TestConfigPlumbing:
    def test_flags_override_config_file(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"epsilon": 1e-5, "min_users": 4, "es_rate": 7.0}))
        parser = build_parser()
        args = parser.parse_args([
            "solve", "--instance", "x", "--config", str(cfg), "--epsilon", "1e-6",
            "--sweep-strategy", FIBONACCI_IF_BIMODAL,
        ])
        model, thresholds, config = _components_from_args(args)
        assert config.epsilon == 1e-6  # flag wins
        assert config.sweep_strategy == FIBONACCI_IF_BIMODAL
        assert thresholds.min_users == 4  # file value survives
        assert model.es_rate == 7.0

    def test_single_pass_refine_shorthand(self):
        parser = build_parser()
        args = parser.parse_args(["solve", "--instance", "x", "--single-pass-refine"])
        _, _, config = _components_from_args(args)
        assert config.refine_max_passes == 1
