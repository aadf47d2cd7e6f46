"""Scenario parsing, execution, table emission, and the command-line
entry point with its exit-code contract."""

import json
import math

import numpy as np
import pytest

from zenolab.cli import EXIT_IO, EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION, main
from zenolab.scenario import (
    Column,
    ResultTable,
    ScenarioError,
    execute,
    load_table,
    parse_scenario,
    render_csv,
    render_json,
)

MINIMAL_ZENO_QUBIT = {
    "schema_version": 1,
    "kind": "zeno-qubit",
    "n_qubits": 1,
    "omega": 1.0,
    "family": "product-plus",
    "t": 1.0,
    "m": 10,
}


def write_scenario(tmp_path, data, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def col_index(table, name):
    return [c.name for c in table.columns].index(name)


class TestParsing:
    def test_minimal_zeno_qubit(self, tmp_path):
        sc = parse_scenario(write_scenario(tmp_path, MINIMAL_ZENO_QUBIT))
        assert sc.kind == "zeno-qubit"
        assert sc.params["t_values"] == [1.0]
        assert sc.params["m_values"] == [10]

    def test_unknown_key_named(self, tmp_path):
        data = dict(MINIMAL_ZENO_QUBIT, gamma=0.1)
        with pytest.raises(ScenarioError, match="gamma"):
            parse_scenario(write_scenario(tmp_path, data))

    def test_zero_measurements_rejected(self, tmp_path):
        data = dict(MINIMAL_ZENO_QUBIT, m=0)
        with pytest.raises(ScenarioError, match="m must be >= 1"):
            parse_scenario(write_scenario(tmp_path, data))

    def test_all_errors_collected(self, tmp_path):
        data = dict(MINIMAL_ZENO_QUBIT, m=0, omega=-1.0, gamma=2)
        with pytest.raises(ScenarioError) as err:
            parse_scenario(write_scenario(tmp_path, data))
        text = str(err.value)
        assert "m must be >= 1" in text
        assert "omega" in text
        assert "gamma" in text

    def test_unsupported_schema_version(self, tmp_path):
        data = dict(MINIMAL_ZENO_QUBIT, schema_version=2)
        with pytest.raises(ScenarioError, match="schema_version"):
            parse_scenario(write_scenario(tmp_path, data))

    def test_scalar_and_grid_mutually_exclusive(self, tmp_path):
        data = dict(MINIMAL_ZENO_QUBIT)
        data["m_grid"] = [1, 2]
        with pytest.raises(ScenarioError, match="exactly one"):
            parse_scenario(write_scenario(tmp_path, data))

    def test_invalid_json_reported(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ScenarioError, match="JSON"):
            parse_scenario(str(path))

    def test_mode_spec_validation(self, tmp_path):
        data = {
            "schema_version": 1,
            "kind": "mz-single",
            "mode_a": {"kind": "squeezed"},
            "mode_b": {"kind": "fock"},
            "theta": 0.5,
        }
        with pytest.raises(ScenarioError) as err:
            parse_scenario(write_scenario(tmp_path, data))
        text = str(err.value)
        assert "mode_a.kind" in text
        assert "mode_b.n" in text


class TestExecution:
    def test_zeno_qubit_reference_row(self, tmp_path):
        sc = parse_scenario(write_scenario(tmp_path, MINIMAL_ZENO_QUBIT))
        table = execute(sc, reproducible=True)
        assert len(table.rows) == 1
        row = table.rows[0]
        assert row[col_index(table, "p_exact")] == pytest.approx(0.975300, abs=1e-6)
        assert row[col_index(table, "p_quadratic")] == pytest.approx(0.975)

    def test_fisher_scan_bound_saturation(self, tmp_path):
        data = {
            "schema_version": 1,
            "kind": "fisher-scan",
            "n_values": list(range(1, 9)),
            "families": ["ghz", "product-plus"],
            "omega": 1.0,
        }
        table = execute(parse_scenario(write_scenario(tmp_path, data)), reproducible=True)
        assert len(table.rows) == 16
        i_n = col_index(table, "n_qubits")
        i_fam = col_index(table, "family")
        i_f = col_index(table, "fisher_quadratic")
        for row in table.rows:
            expected = row[i_n] ** 2 if row[i_fam] == "ghz" else row[i_n]
            assert row[i_f] == pytest.approx(expected, rel=1e-10)

    def test_cascade_scan_row_shape(self, tmp_path):
        data = {
            "schema_version": 1,
            "kind": "mz-cascade",
            "topology": "zeno-cut",
            "theta": math.pi / 2.0,
            "mode_a": {"kind": "vacuum"},
            "mode_b": {"kind": "coherent", "alpha": 2.0},
            "fresh_a": {"kind": "vacuum"},
            "n_max": 36,
            "m_values": [1, 2, 4, 8, 16, 32],
        }
        table = execute(parse_scenario(write_scenario(tmp_path, data)), reproducible=True)
        assert [row[col_index(table, "m")] for row in table.rows] == [1, 2, 4, 8, 16, 32]
        assert "m_star" in table.metadata

    def test_separable_mixture_seeded(self, tmp_path):
        data = dict(
            MINIMAL_ZENO_QUBIT, family="separable-mixture", n_qubits=3, seed=5, branches=2
        )
        sc = parse_scenario(write_scenario(tmp_path, data))
        a = execute(sc, reproducible=True)
        b = execute(sc, reproducible=True)
        assert a.rows == b.rows

    def test_threads_do_not_change_results(self, tmp_path):
        data = dict(MINIMAL_ZENO_QUBIT)
        del data["m"]
        data["m_grid"] = [1, 2, 4, 8, 16]
        sc = parse_scenario(write_scenario(tmp_path, data))
        assert execute(sc, threads=1, reproducible=True).rows == execute(
            sc, threads=4, reproducible=True
        ).rows


class TestEmission:
    def make_table(self):
        return ResultTable(
            columns=[Column("x", "real"), Column("k", "int"), Column("ok", "bool"), Column("tag", "string")],
            rows=[[1.0 / 3.0, 7, True, "a,b"], [math.nan, -1, False, "plain"]],
            metadata={"tool_version": "0.1.0", "kind": "demo"},
        )

    def test_csv_layout(self):
        text = render_csv(self.make_table())
        lines = text.split("\n")
        assert lines[0] == "# tool_version=0.1.0"
        assert lines[2] == "x,k,ok,tag"
        assert len([ln for ln in lines if ln]) == 2 + 1 + 2  # metadata + header + rows
        assert '"a,b"' in lines[3]  # RFC-4180 quoting of an embedded comma
        assert "\r" not in text

    def test_empty_table_is_header_and_metadata_only(self):
        table = ResultTable(columns=[Column("x", "real")], rows=[], metadata={"kind": "demo"})
        text = render_csv(table)
        assert text == "# kind=demo\nx\n"

    def test_json_round_trip_bit_exact(self, tmp_path):
        table = self.make_table()
        path = tmp_path / "out.json"
        path.write_text(render_json(table))
        back = load_table(str(path))
        assert back.rows[0][0] == table.rows[0][0]  # bit-exact real
        assert math.isnan(back.rows[1][0])  # non-finite real emitted as null
        assert back.rows[0][1:] == table.rows[0][1:]
        assert back.metadata["kind"] == "demo"

    def test_seventeen_digit_reals(self):
        text = render_json(
            ResultTable(columns=[Column("x", "real")], rows=[[0.1 + 0.2]], metadata={})
        )
        assert "0.30000000000000004" in text


class TestCommandLine:
    def test_run_and_validate_ok(self, tmp_path, capsys):
        path = write_scenario(tmp_path, MINIMAL_ZENO_QUBIT)
        assert main(["validate", path]) == EXIT_OK
        out = str(tmp_path / "out.csv")
        assert main(["run", path, "--output", out, "--reproducible"]) == EXIT_OK
        header = open(out).read().splitlines()
        assert any(line.startswith("# scenario_hash=") for line in header)
        assert not any(line.startswith("# timestamp=") for line in header)

    def test_reproducible_json_is_byte_identical(self, tmp_path):
        path = write_scenario(tmp_path, MINIMAL_ZENO_QUBIT)
        out_a, out_b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
        assert main(["run", path, "-f", "json", "-o", out_a, "--reproducible"]) == EXIT_OK
        assert main(["run", path, "-f", "json", "-o", out_b, "--reproducible"]) == EXIT_OK
        assert open(out_a, "rb").read() == open(out_b, "rb").read()

    def test_validation_exit_code(self, tmp_path, capsys):
        path = write_scenario(tmp_path, dict(MINIMAL_ZENO_QUBIT, m=0))
        assert main(["validate", path]) == EXIT_VALIDATION
        assert "m must be >= 1" in capsys.readouterr().err

    def test_io_exit_code(self, tmp_path):
        assert main(["run", str(tmp_path / "missing.json")]) == EXIT_IO

    def test_numerical_exit_code(self, tmp_path, capsys):
        # A Fock state parked on the truncation shell trips the leak guard.
        data = {
            "schema_version": 1,
            "kind": "mz-single",
            "mode_a": {"kind": "fock", "n": 39},
            "mode_b": {"kind": "vacuum"},
            "theta": 0.1,
            "n_max": 40,
        }
        path = write_scenario(tmp_path, data)
        assert main(["run", path]) == EXIT_NUMERICAL
        assert "truncation" in capsys.readouterr().err

    def test_version_command(self, capsys):
        assert main(["version"]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "0.1.0"

    def test_thread_env_override(self, tmp_path, monkeypatch):
        monkeypatch.setenv("ZENOLAB_THREADS", "not-a-number")
        path = write_scenario(tmp_path, MINIMAL_ZENO_QUBIT)
        assert main(["run", path, "--reproducible", "-o", str(tmp_path / "o.csv")]) == EXIT_VALIDATION
