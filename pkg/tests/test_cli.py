import json
import math
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from smclab import cli, oracle
from test_smc_codec import otp_code

CHAIN = {
    "p_u": [1.0],
    "p_v_given_u": [[0.5, 0.5]],
    "xi": [[1.0, 0.0], [0.0, 1.0]],
    "w_y": [[0.9, 0.1], [0.1, 0.9]],
    "w_z": [[0.8, 0.2], [0.2, 0.8]],
}

THM1 = {"p_a": [0.75, 0.25], "w": [[0.9, 0.1], [0.1, 0.9]], "p": [0.5, 0.5]}


@pytest.fixture
def runner():
    return CliRunner()


def write(path, data):
    Path(path).write_text(json.dumps(data))


class TestExponentCommand:
    def test_csv_format_contract(self, runner):
        with runner.isolated_filesystem():
            write("chain.json", CHAIN)
            result = runner.invoke(cli.main, [
                "exponent", "--chain", "chain.json", "--rp", "0.3", "--rc", "0.2",
                "--rates", "0.2,0.3",
            ])
            assert result.exit_code == 0, result.output
            lines = result.output.strip().splitlines()
            assert lines[0].split(",")[:4] == ["index_set", "e_b_nats", "e_e_nats", "e_plus_nats"]
            assert "e_minus_nats" in lines[0]
            assert len(lines) == 2

    def test_replayability(self, runner):
        with runner.isolated_filesystem():
            write("chain.json", CHAIN)
            argv = ["exponent", "--chain", "chain.json", "--rp", "0.4", "--rc", "0.0",
                    "--rates", "0.0,0.4"]
            first = runner.invoke(cli.main, argv).output
            second = runner.invoke(cli.main, argv).output
            assert first == second


class TestResolveCheckCommand:
    def test_thm1_worked_row(self, runner):
        with runner.isolated_filesystem():
            write("tiny.json", THM1)
            result = runner.invoke(cli.main, [
                "resolve-check", "--mode", "thm1", "--spec", "tiny.json", "--rho", "1.0",
            ])
            assert result.exit_code == 0, result.output
            header, row = result.output.strip().splitlines()
            cells = dict(zip(header.split(","), row.split(",")))
            assert float(cells["lhs_psi"]) == pytest.approx(1.4, abs=1e-12)
            assert float(cells["rhs"]) == pytest.approx(2.025, abs=1e-12)
            assert cells["holds"] == "true"

    def test_violation_exits_one(self, runner, monkeypatch):
        fake = oracle.BoundCheckResult("thm1", 1.0, 9.0, 9.0, 1.0, False)
        monkeypatch.setattr(oracle, "ensemble_bound_check", lambda *a, **k: fake)
        with runner.isolated_filesystem():
            write("tiny.json", THM1)
            result = runner.invoke(cli.main, [
                "resolve-check", "--mode", "thm1", "--spec", "tiny.json", "--rho", "1.0",
            ])
            assert result.exit_code == 1
            assert "holds" in result.output
            assert "false" in result.output

    def test_rho_grid(self, runner):
        with runner.isolated_filesystem():
            write("tiny.json", THM1)
            result = runner.invoke(cli.main, [
                "resolve-check", "--mode", "thm1", "--spec", "tiny.json",
                "--rho-grid", "0.2:1.0:5",
            ])
            assert result.exit_code == 0
            assert len(result.output.strip().splitlines()) == 6


class TestErrorExits:
    def test_malformed_json_exits_two(self, runner):
        with runner.isolated_filesystem():
            Path("bad.json").write_text("{not json")
            result = runner.invoke(cli.main, [
                "resolve-check", "--mode", "thm1", "--spec", "bad.json",
            ])
            assert result.exit_code == 2
            assert "bad.json" in result.output

    def test_missing_key_named(self, runner):
        with runner.isolated_filesystem():
            write("tiny.json", {"p_a": [1.0]})
            result = runner.invoke(cli.main, [
                "resolve-check", "--mode", "thm1", "--spec", "tiny.json",
            ])
            assert result.exit_code == 2
            assert "'w'" in result.output

    def test_cap_exceeded_exits_three(self, runner):
        with runner.isolated_filesystem():
            write("code.json", otp_code().to_dict())
            write("source.json", {"shape": [1, 2, 2], "probs": [0.25] * 4})
            result = runner.invoke(cli.main, [
                "leakage", "--code", "code.json", "--source", "source.json", "--cap", "1",
            ])
            assert result.exit_code == 3

    def test_infeasible_exits_four(self, runner):
        with runner.isolated_filesystem():
            write("spec.json", {
                "chain": CHAIN, "t": 1, "targets": {"1": 1e-12}, "eps2": 0.5,
                "generator": [[1]], "q": 2, "rho_grid": [0.25, 0.5, 0.75],
            })
            result = runner.invoke(cli.main, ["construct", "--spec", "spec.json"])
            assert result.exit_code == 4


class TestManifest:
    def test_cells_round_trip_full_precision(self, runner):
        with runner.isolated_filesystem():
            write("chain.json", CHAIN)
            result = runner.invoke(cli.main, [
                "bound", "--chain", "chain.json", "--rates", "0.3,0.4",
                "--rho-grid", "0.3:0.9:4", "--manifest", "m.json",
            ])
            assert result.exit_code == 0, result.output
            manifest = json.loads(Path("m.json").read_text())
            lines = result.output.strip().splitlines()
            header = lines[0].split(",")
            assert manifest["csv_header"] == header
            for printed, recorded in zip(lines[1:], manifest["csv_rows"]):
                for cell, value in zip(printed.split(","), recorded):
                    if isinstance(value, float):
                        assert float(cell) == value
            assert "smclab" in manifest["versions"]
            assert manifest["inputs"]

    def test_inf_serializes_as_string(self):
        assert cli._fmt(math.inf) == "inf"
        assert cli._json_safe({"x": math.inf}) == {"x": "inf"}


class TestDisplayAndFigures:
    def test_bits_conversion(self, runner):
        with runner.isolated_filesystem():
            write("channels.json", {"w_y": CHAIN["w_y"], "w_z": CHAIN["w_z"]})
            nats = runner.invoke(cli.main, [
                "capacity", "--channels", "channels.json", "--degraded", "--grid", "2001",
            ]).output
            bits = runner.invoke(cli.main, [
                "capacity", "--channels", "channels.json", "--degraded", "--grid", "2001",
                "--bits",
            ]).output
            nats_value = float(nats.strip().splitlines()[1])
            bits_value = float(bits.strip().splitlines()[1])
            assert "secrecy_capacity_bits" in bits
            assert bits_value == pytest.approx(nats_value / math.log(2), rel=1e-12)

    def test_figures_rendered(self, runner):
        with runner.isolated_filesystem():
            write("tiny.json", THM1)
            result = runner.invoke(cli.main, [
                "resolve-check", "--mode", "thm1", "--spec", "tiny.json",
                "--rho-grid", "0.5:1.0:3", "--figures", "figs",
            ])
            assert result.exit_code == 0
            assert Path("figs/resolve_check.png").exists()


class TestSimulateCommand:
    def test_runs_and_replays(self, runner):
        with runner.isolated_filesystem():
            code = otp_code().to_dict()
            write("code.json", code)
            write("source.json", {"shape": [1, 2, 2], "probs": [0.25] * 4})
            argv = ["simulate", "--code", "code.json", "--source", "source.json",
                    "--trials", "2000", "--seed", "11"]
            a = runner.invoke(cli.main, argv)
            b = runner.invoke(cli.main, argv)
            assert a.exit_code == 0, a.output
            assert a.output == b.output
            header = a.output.splitlines()[0].split(",")
            assert header == ["trials", "p_b_hat", "p_b_radius", "p_e_hat", "p_e_radius"]


class TestConstructCommand:
    def test_emits_slack_rows(self, runner):
        with runner.isolated_filesystem():
            chain = dict(CHAIN)
            chain["w_z"] = [[0.55, 0.45], [0.45, 0.55]]
            write("spec.json", {
                "chain": chain, "t": 1, "targets": {"1": 0.5}, "eps2": 0.5,
                "generator": np.eye(6, dtype=int).tolist(), "q": 2,
                "rho_grid": [i / 20 for i in range(1, 20)],
            })
            result = runner.invoke(cli.main, ["construct", "--spec", "spec.json", "--seed", "7"])
            assert result.exit_code == 0, result.output
            header, row = result.output.strip().splitlines()
            cells = dict(zip(header.split(","), row.split(",")))
            assert float(cells["bound_nats"]) <= float(cells["target_nats"])
            assert cells["dims"].startswith("0;")

    def test_plain_text_generator_file(self, runner):
        with runner.isolated_filesystem():
            chain = dict(CHAIN)
            chain["w_z"] = [[0.55, 0.45], [0.45, 0.55]]
            Path("gen.txt").write_text("\n".join("".join("1" if i == j else "0" for j in range(6))
                                                 for i in range(6)) + "\n")
            write("spec.json", {
                "chain": chain, "t": 1, "targets": {"1": 0.5}, "eps2": 0.5,
                "generator_file": "gen.txt", "q": 2,
                "rho_grid": [i / 20 for i in range(1, 20)],
            })
            result = runner.invoke(cli.main, ["construct", "--spec", "spec.json", "--seed", "7"])
            assert result.exit_code == 0, result.output


class TestDryRunFlags:
    def test_resolve_check_dry_run(self, runner):
        with runner.isolated_filesystem():
            write("tiny.json", THM1)
            result = runner.invoke(cli.main, [
                "resolve-check", "--mode", "thm1", "--spec", "tiny.json", "--dry-run",
            ])
            assert result.exit_code == 0, result.output
            assert result.output.splitlines()[1] == "thm1,4"

    def test_leakage_dry_run(self, runner):
        with runner.isolated_filesystem():
            write("code.json", otp_code().to_dict())
            write("source.json", {"shape": [1, 2, 2], "probs": [0.25] * 4})
            result = runner.invoke(cli.main, [
                "leakage", "--code", "code.json", "--source", "source.json", "--dry-run",
            ])
            assert result.exit_code == 0, result.output
            assert result.output.splitlines()[1] == "8"
