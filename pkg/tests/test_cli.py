"""Tests for the command-line interface: result records, digests, exit
codes, config-file precedence, and artifact files."""

import hashlib
import json
import math

import pytest

from cantorlab.cli import EXIT_BUDGET, EXIT_INVALID, EXIT_OK

from conftest import run_cli


def canonical_digest(inputs: dict) -> str:
    blob = json.dumps(inputs, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class TestResultRecord:
    def test_record_shape_and_digest(self, capsys):
        code, rec, _, _ = run_cli(["dim"], capsys)
        assert code == EXIT_OK
        assert rec["schema"] == 1
        assert rec["command"] == "dim"
        assert rec["runtime_seconds"] >= 0.0
        assert rec["inputs"]["set"] == "ternary"
        assert rec["inputs"]["method"] == "moran"
        # the digest is the sha256 of the canonical JSON of the inputs
        assert rec["inputs_digest"] == canonical_digest(rec["inputs"])
        assert rec["outputs"]["value"] == pytest.approx(
            math.log(2.0) / math.log(3.0), abs=1e-9
        )

    def test_inputs_omit_unset_and_output_keys(self, capsys):
        code, rec, _, _ = run_cli(["thickness", "--depth", "4"], capsys)
        assert code == EXIT_OK
        assert "set_file" not in rec["inputs"]  # None values are dropped
        assert "out" not in rec["inputs"]
        assert "csv" not in rec["inputs"]
        assert "jobs" not in rec["inputs"]

    def test_digest_deterministic_and_ignores_output_locations(self, capsys, tmp_path):
        code, rec1, _, _ = run_cli(["thickness", "--depth", "4"], capsys)
        out = tmp_path / "rec.json"
        code2, _, stdout, _ = run_cli(
            ["thickness", "--depth", "4", "--out", str(out), "--jobs", "2"], capsys
        )
        assert code == code2 == EXIT_OK
        assert stdout == ""  # record went to the file instead
        rec2 = json.loads(out.read_text())
        assert rec2["inputs_digest"] == rec1["inputs_digest"]
        assert rec2["outputs"] == rec1["outputs"]

    def test_digest_changes_with_inputs(self, capsys):
        _, rec1, _, _ = run_cli(["thickness", "--depth", "4"], capsys)
        _, rec2, _, _ = run_cli(["thickness", "--depth", "5"], capsys)
        assert rec1["inputs_digest"] != rec2["inputs_digest"]

    def test_csv_artifacts(self, capsys, tmp_path):
        dim_csv = tmp_path / "dim.csv"
        code, _, _, _ = run_cli(
            ["dim", "--method", "box", "--depth-min", "2", "--depth-max", "6",
             "--csv", str(dim_csv)],
            capsys,
        )
        assert code == EXIT_OK
        lines = dim_csv.read_text().strip().splitlines()
        assert lines[0] == "depth,N,r"
        assert len(lines) == 6  # depths 2..6

        sum_csv = tmp_path / "sum.csv"
        code, rec, _, _ = run_cli(
            ["sum", "--depth", "3", "--csv", str(sum_csv)], capsys
        )
        assert code == EXIT_OK
        lines = sum_csv.read_text().strip().splitlines()
        assert lines[0] == "lo,hi"
        assert len(lines) == rec["outputs"]["n_components"] + 1


class TestConfigFile:
    def test_precedence_flags_over_config_over_defaults(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"depth": 4, "lambda": 2.5}))
        code, rec, _, _ = run_cli(
            ["diff", "--config", str(cfg), "--depth", "6"], capsys
        )
        assert code == EXIT_OK
        assert rec["inputs"]["depth"] == 6  # flag wins over config
        assert rec["inputs"]["lam"] == 2.5  # config wins over default 1.0
        assert rec["inputs"]["set1"] == "ternary"  # untouched default
        assert "config" not in rec["inputs"]

    def test_unknown_config_key_rejected(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"depht": 4}))
        code, _, _, err = run_cli(["diff", "--config", str(cfg)], capsys)
        assert code == EXIT_INVALID
        assert "depht" in err

    def test_config_must_be_json_object(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("[1, 2, 3]")
        code, _, _, err = run_cli(["dim", "--config", str(cfg)], capsys)
        assert code == EXIT_INVALID
        assert "object" in err

    def test_config_invalid_json(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{not json")
        code, _, _, _ = run_cli(["dim", "--config", str(cfg)], capsys)
        assert code == EXIT_INVALID

    def test_missing_config_file_names_path(self, capsys, tmp_path):
        missing = tmp_path / "nope.json"
        code, _, _, err = run_cli(["dim", "--config", str(missing)], capsys)
        assert code == EXIT_INVALID
        assert "nope.json" in err


class TestExitCodes:
    def test_budget_exhaustion_is_exit_two(self, capsys):
        # n=5 needs 121 periodic points, over the budget of 100
        code, _, _, err = run_cli(["catmap", "--n", "5", "--budget", "100"], capsys)
        assert code == EXIT_BUDGET
        assert "budget" in err.lower()

    def test_unknown_set_name(self, capsys):
        code, _, _, err = run_cli(["dim", "--set", "no-such-set"], capsys)
        assert code == EXIT_INVALID
        assert "no-such-set" in err

    def test_missing_set_file_names_path(self, capsys, tmp_path):
        missing = tmp_path / "ghost.json"
        code, _, _, err = run_cli(["dim", "--set-file", str(missing)], capsys)
        assert code == EXIT_INVALID
        assert "ghost.json" in err

    def test_bad_method_rejected(self, capsys):
        code, _, _, _ = run_cli(["dim", "--method", "box", "--depth-min", "9",
                                 "--depth-max", "3"], capsys)
        assert code == EXIT_INVALID

    def test_nonpositive_budget_rejected(self, capsys):
        code, _, _, err = run_cli(["dim", "--budget", "-5"], capsys)
        assert code == EXIT_INVALID
        assert "budget" in err


class TestCommands:
    def test_list_sets(self, capsys):
        code, rec, _, _ = run_cli(["list-sets"], capsys)
        assert code == EXIT_OK
        names = [e["name"] for e in rec["outputs"]["sets"]]
        for expected in ("ternary", "middle-fifth", "thin", "thick", "gauss2",
                         "gauss4", "horseshoe-stable"):
            assert expected in names
        assert all(e["description"] for e in rec["outputs"]["sets"])

    def test_spectrum_single_periodic_word(self, capsys):
        code, rec, _, _ = run_cli(
            ["spectrum", "--period", "2,1", "--window", "8"], capsys
        )
        assert code == EXIT_OK
        out = rec["outputs"]
        assert out["mode"] == "single"
        assert out["value"] == pytest.approx(math.sqrt(12.0), abs=1e-12)
        assert out["exact"] == {
            "p": 0, "q": 2, "r": 1, "d": 3, "float": out["value"],
        }
        assert out["witness"] == [2, 1]
        assert out["estimator_gap"] <= 1e-9

    def test_spectrum_sample_minimum(self, capsys):
        code, rec, _, _ = run_cli(
            ["spectrum", "--sample", "--max-period", "3", "--digit-bound", "2"],
            capsys,
        )
        assert code == EXIT_OK
        out = rec["outputs"]
        assert out["mode"] == "sample"
        assert out["count"] > 0
        assert out["min_value"] == pytest.approx(math.sqrt(5.0), abs=1e-12)
        assert out["min_witness"] == [1]

    def test_spectrum_needs_period_or_sample(self, capsys):
        code, _, _, err = run_cli(["spectrum"], capsys)
        assert code == EXIT_INVALID
        assert "period" in err

    def test_spectrum_sample_csv(self, capsys, tmp_path):
        path = tmp_path / "sample.csv"
        code, _, _, _ = run_cli(
            ["spectrum", "--sample", "--max-period", "2", "--digit-bound", "2",
             "--csv", str(path)],
            capsys,
        )
        assert code == EXIT_OK
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "value,witness_digits,window"
        assert len(lines) > 1

    def test_intersect_disjoint_translation(self, capsys):
        code, rec, _, _ = run_cli(["intersect", "--t", "5.0"], capsys)
        assert code == EXIT_OK
        assert rec["outputs"]["disjoint"] is True
        assert rec["outputs"]["state"].startswith("DisjointAtDepth")

    def test_hall_shallow_cover(self, capsys):
        code, rec, _, _ = run_cli(["hall", "--depth", "4"], capsys)
        assert code == EXIT_OK
        out = rec["outputs"]
        assert out["contains"] is True
        assert out["max_error"] < 1e-12
        assert out["target"][0] == pytest.approx(math.sqrt(2.0) - 1.0)

    def test_horseshoe_solve_unit(self, capsys):
        code, rec, _, _ = run_cli(
            ["horseshoe", "--solve-unit", "--expansion", "4"], capsys
        )
        assert code == EXIT_OK
        out = rec["outputs"]
        assert out["at_unit_dimension"] is True
        assert out["contraction_solved"] == pytest.approx(0.25, abs=1e-9)

    def test_catmap_record(self, capsys):
        code, rec, _, _ = run_cli(["catmap", "--n", "3"], capsys)
        assert code == EXIT_OK
        assert rec["outputs"]["counts"] == [[1, 1, 1], [2, 5, 5], [3, 16, 16]]
        assert rec["outputs"]["all_counts_match"] is True

    def test_stdmap_record_and_csv(self, capsys, tmp_path):
        path = tmp_path / "exp.csv"
        code, rec, _, _ = run_cli(
            ["stdmap", "--lambda", "0", "--orbits", "5", "--iterates", "200",
             "--csv", str(path)],
            capsys,
        )
        assert code == EXIT_OK
        out = rec["outputs"]
        assert out["lambda"] == 0.0
        assert out["orbits"] == 5
        assert out["mean_exponent"] < 0.05
        assert out["max_abs_pair_sum"] < 1e-6
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "orbit_id,exponent"
        assert len(lines) == 6
