"""Command-line front end tests, run in-process against the shipped fixtures."""

import json
from pathlib import Path

import pytest

from capid.cli import main

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
NESTED = str(FIXTURES / "nested_menus_six_orders.json")
NESTED_NO_SINGLETON = str(FIXTURES / "nested_menus_six_orders_no_singleton.json")
TWO_ORDERS = str(FIXTURES / "two_orders_four_menus.json")
UPDATING = str(FIXTURES / "underreaction_point_experiment.json")
AUDIT = str(FIXTURES / "point_spec_audit.json")
SIMULATE = str(FIXTURES / "simulate_two_rules.json")

QUARTER_Q = json.dumps(
    {"pref:a>b>c": "1/4", "pref:b>a>c": "1/4", "pref:b>c>a": "1/4", "pref:c>b>a": "1/4"}
)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


class TestCheck:
    def test_rationalizes_with_singleton_menu(self, capsys):
        code, report = run(capsys, "check", "--input", NESTED, "--q", QUARTER_Q)
        assert code == 0
        assert report["result"]["verdict"]["rationalizes"] is True
        assert report["mode"] == "exact"
        assert report["input_digest"].startswith("sha256:")

    def test_fails_without_singleton_menu(self, capsys):
        code, report = run(
            capsys, "check", "--input", NESTED_NO_SINGLETON, "--q", QUARTER_Q
        )
        assert code == 0  # a negative verdict is an answer, not an error
        verdict = report["result"]["verdict"]
        assert verdict["rationalizes"] is False
        assert {"subset": ["b"], "shortfall": "1/4"} in verdict["violations"]

    def test_missing_q_is_schema_error(self, capsys):
        code, report = run(capsys, "check", "--input", NESTED)
        assert code == 2
        assert report["error"]["type"] == "ValidationError"


class TestExistsBoundsVertices:
    def test_exists(self, capsys):
        code, report = run(capsys, "exists", "--input", TWO_ORDERS)
        assert code == 0 and report["result"]["feasible"] is True

    def test_bounds(self, capsys):
        code, report = run(capsys, "bounds", "--input", NESTED)
        assert code == 0
        assert report["result"]["bounds"]["pref:a>b>c"]["max"] == "1/2"

    def test_vertices(self, capsys):
        code, report = run(capsys, "vertices", "--input", TWO_ORDERS)
        assert code == 0
        got = {
            (v["pref:a>b>c"], v["pref:a>c>b"]) for v in report["result"]["vertices"]
        }
        assert got == {("1/3", "2/3"), ("2/3", "1/3")}


class TestWitness:
    def test_witness_includes_menu_measures(self, capsys):
        q = json.dumps({"pref:a>b>c": "2/3", "pref:a>c>b": "1/3"})
        code, report = run(capsys, "witness", "--input", TWO_ORDERS, "--q", q)
        assert code == 0
        witness = report["result"]["witness"]
        assert witness["pref:a>b>c"] == {"a": "1/2", "b": "1/2"}
        assert witness["pref:a>c>b"] == {"c": "1"}
        menu_measures = report["result"]["menu_measures"]
        assert menu_measures["pref:a>c>b"] == {"b,c": "1"}

    def test_witness_null_when_not_rationalizable(self, capsys):
        code, report = run(
            capsys, "witness", "--input", NESTED_NO_SINGLETON, "--q", QUARTER_Q
        )
        assert code == 0
        assert report["result"]["witness"] is None


class TestMenuHomog:
    def test_two_thirds_infeasible(self, capsys):
        q = json.dumps({"pref:a>b>c": "2/3", "pref:a>c>b": "1/3"})
        code, report = run(capsys, "menu-homog", "--input", TWO_ORDERS, "--q", q)
        assert code == 0
        assert report["result"]["feasible"] is False

    def test_equal_split_feasible_with_pi(self, capsys):
        q = json.dumps({"pref:a>b>c": "1/2", "pref:a>c>b": "1/2"})
        code, report = run(capsys, "menu-homog", "--input", TWO_ORDERS, "--q", q)
        assert code == 0
        assert report["result"]["feasible"] is True
        assert report["result"]["pi"]["b,c"] == "2/3"


class TestIdentifyKappa:
    def test_interval_and_diagnosis(self, capsys):
        code, report = run(capsys, "identify-kappa", "--input", UPDATING)
        assert code == 0
        result = report["result"]
        assert result["interval"] == {"lo": "1/2", "hi": "1/2"}
        assert result["diagnosis"] == "underreaction"
        assert ["1"] in result["bayes_violations"]["without_prior"]

    def test_at_kappa_verdict(self, capsys):
        code, report = run(
            capsys, "identify-kappa", "--input", UPDATING, "--kappa", "1/2"
        )
        assert code == 0
        assert report["result"]["at_kappa"]["verdict"]["rationalizes"] is True


class TestCapacityAudit:
    def test_point_spec(self, capsys):
        code, report = run(capsys, "capacity-audit", "--input", AUDIT)
        assert code == 0
        result = report["result"]
        assert result["convex"] is True
        assert result["belief_function"] is True
        assert result["core_vertex_count"] == 1


class TestSimulate:
    def test_output_is_a_problem_document(self, capsys, tmp_path):
        out = tmp_path / "synth.json"
        code = main(["simulate", "--input", SIMULATE, "--output", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["schema"] == "capid/1"
        assert "lambda" in doc and "rules" in doc
        # consumable by the identification commands
        code = main(
            ["check", "--input", str(out), "--q", json.dumps(doc["q"])]
        )
        report = json.loads(capsys.readouterr().out)
        assert code == 0
        assert report["result"]["verdict"]["rationalizes"] is True

    def test_seed_override_changes_synthesis(self, capsys, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["simulate", "--input", SIMULATE, "--output", str(a), "--seed", "1"]) == 0
        assert main(["simulate", "--input", SIMULATE, "--output", str(b), "--seed", "2"]) == 0
        da, db = json.loads(a.read_text()), json.loads(b.read_text())
        assert da["synthesis"]["seed"] == 1 and db["synthesis"]["seed"] == 2


class TestDeterminismAndErrors:
    def test_identical_runs_are_byte_identical(self, tmp_path):
        one, two = tmp_path / "one.json", tmp_path / "two.json"
        for path in (one, two):
            assert main(["bounds", "--input", NESTED, "--output", str(path)]) == 0
        assert one.read_bytes() == two.read_bytes()

    def test_seeded_simulation_is_byte_identical(self, tmp_path):
        one, two = tmp_path / "one.json", tmp_path / "two.json"
        for path in (one, two):
            assert main(
                ["simulate", "--input", SIMULATE, "--output", str(path), "--seed", "5"]
            ) == 0
        assert one.read_bytes() == two.read_bytes()

    def test_unreadable_file_exits_1(self, capsys):
        code, report = run(capsys, "check", "--input", "/nonexistent.json")
        assert code == 1
        assert report["error"]["type"] in ("FileNotFoundError", "OSError")

    def test_invalid_json_exits_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, report = run(capsys, "check", "--input", str(bad))
        assert code == 2

    def test_wrong_schema_exits_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"schema": "other/9", "labels": ["a"]}))
        code, report = run(capsys, "exists", "--input", str(bad))
        assert code == 2
        assert "schema" in report["error"]["message"]

    def test_size_cap_exits_3(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("CAPID_MAX_N", "2")
        code, report = run(capsys, "exists", "--input", TWO_ORDERS)
        assert code == 3
        assert report["error"]["type"] == "SizeLimitError"

    def test_float_mode_runs(self, capsys):
        code, report = run(
            capsys, "check", "--input", NESTED, "--q", QUARTER_Q, "--mode", "float"
        )
        assert code == 0
        assert report["mode"] == "float"
        assert report["result"]["verdict"]["rationalizes"] is True

    def test_float_mode_updating_keeps_grid_keys(self, capsys):
        code, report = run(
            capsys, "identify-kappa", "--input", UPDATING, "--mode", "float"
        )
        assert code == 0
        assert report["result"]["interval"] == {"lo": 0.5, "hi": 0.5}
        assert report["result"]["diagnosis"] == "underreaction"
