"""CLI parsing, outputs, determinism, and exit-code contracts."""

import json
import math
import subprocess
import sys

import pytest

from fracplate.cli import RunConfig, main, parse_config
from fracplate.report import canonical_json


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


class TestParseConfig:
    def test_valid_solve(self):
        cfg = parse_config(
            ["solve", "--alpha", "1.5", "--domain", "interval:pi", "--modes", "8"]
        )
        assert cfg.subcommand == "solve"
        assert cfg.options["alpha"] == 1.5
        assert cfg.options["modes"] == 8

    def test_alpha_outside_range_rejected(self):
        with pytest.raises(SystemExit):
            parse_config(["solve", "--alpha", "2.5", "--domain", "interval:pi"])

    def test_flag_overrides_config_file(self, tmp_path):
        cfg_file = tmp_path / "c.json"
        cfg_file.write_text(json.dumps({"alpha": 1.3, "modes": 4}))
        cfg = parse_config(
            ["--config", str(cfg_file), "solve", "--alpha", "1.7"]
        )
        assert cfg.options["alpha"] == 1.7  # flag wins
        assert cfg.options["modes"] == 4  # file fills the rest

    def test_unknown_config_keys_rejected(self, tmp_path):
        cfg_file = tmp_path / "c.json"
        cfg_file.write_text(json.dumps({"bogus_key": 1}))
        with pytest.raises(SystemExit, match="bogus_key"):
            parse_config(["--config", str(cfg_file), "solve"])

    def test_canonical_round_trip(self):
        cfg = parse_config(["probe", "--modes", "8,16", "--seed", "7"])
        text = cfg.to_canonical_json()
        decoded = json.loads(text)
        again = RunConfig(decoded["subcommand"], decoded["options"])
        assert again.to_canonical_json() == text


class TestMLCommand:
    def test_value_at_zero(self, capsys):
        code, out = _run(["ml", "--alpha", "1.5", "--beta", "1", "--z", "0"], capsys)
        assert code == 0
        value, err, method = out.strip().split(",")
        assert abs(float(value) - 1.0) < 1e-12
        assert float(err) < 1e-12
        assert method == "TaylorSeries"

    def test_explicit_eval_action(self, capsys):
        code, out = _run(
            ["ml", "eval", "--alpha", "1", "--beta", "1", "--z", "1"], capsys
        )
        assert code == 0
        assert abs(float(out.split(",")[0]) - math.e) < 1e-12


class TestModesCommand:
    def test_interval_csv(self, capsys):
        code, out = _run(["modes", "--domain", "interval:pi", "--count", "3"], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "index,mu,lambda"
        assert lines[1] == "1,1,1"
        assert lines[2].startswith("2,4,16")

    def test_rectangle_indices(self, capsys):
        code, out = _run(
            ["modes", "--domain", "rectangle:pixpi", "--count", "4"], capsys
        )
        assert code == 0
        assert out.splitlines()[1].startswith("1-1,")


class TestFracopsCommand:
    def test_error_column_decreases(self, capsys):
        code, out = _run(
            ["fracops", "power-rule", "--beta", "0.5", "--gamma", "2",
             "--nodes", "128,256,512"],
            capsys,
        )
        assert code == 0
        rows = [line.split(",") for line in out.strip().splitlines()[1:]]
        errs = [float(r[1]) for r in rows]
        assert errs[0] > errs[1] > errs[2]


class TestSolveCommand:
    def test_json_report_with_data_file(self, tmp_path, capsys):
        data = tmp_path / "data.json"
        data.write_text(json.dumps({"u0": [1, 0, 0, 0], "u1": [0, 0.5, 0, 0]}))
        out_file = tmp_path / "report.json"
        code, _ = _run(
            ["solve", "--domain", "interval:pi", "--alpha", "1.5", "--modes", "4",
             "--data", str(data), "--horizon", "1.0", "--out", str(out_file)],
            capsys,
        )
        assert code == 0
        doc = json.loads(out_file.read_text())
        assert doc["declared_class"] == "H2"
        assert doc["residuals"]["mode_1_scaled"] < 5e-3
        assert doc["norm_tables"]["u0"]["theta=0.25"] == pytest.approx(1.0)

    def test_csv_norm_sweep(self, tmp_path, capsys):
        data = tmp_path / "data.json"
        data.write_text(json.dumps({"u0": [1, 0], "u1": [0, 0]}))
        csv_file = tmp_path / "norms.csv"
        code, _ = _run(
            ["solve", "--domain", "interval:pi", "--alpha", "1.5", "--modes", "2",
             "--data", str(data), "--csv-out", str(csv_file)],
            capsys,
        )
        assert code == 0
        lines = csv_file.read_text().strip().splitlines()
        assert lines[0] == "t,norm_l2,norm_h10,norm_lap,norm_gradlap"
        first = [float(x) for x in lines[1].split(",")]
        assert first[0] == 0.0 and first[1] == pytest.approx(1.0)

    def test_insufficient_data_rejected(self, tmp_path, capsys):
        data = tmp_path / "data.json"
        data.write_text(json.dumps({"u0": [1.0], "u1": [0.0]}))
        with pytest.raises(SystemExit):
            _run(
                ["solve", "--domain", "interval:pi", "--alpha", "1.5",
                 "--modes", "4", "--data", str(data)],
                capsys,
            )


class TestIdentitiesCommand:
    def test_residuals_decrease(self, capsys):
        code, out = _run(
            ["identities", "--beta", "0.25", "--modes", "4",
             "--nodes", "512,1024,2048"],
            capsys,
        )
        assert code == 0
        rows = [line.split(",") for line in out.strip().splitlines()[1:]]
        col1 = [float(r[1]) for r in rows]
        col2 = [float(r[2]) for r in rows]
        assert col1[0] > col1[1] > col1[2]
        assert col2[0] > col2[1] > col2[2]


class TestProbeCommand:
    def test_deterministic_json(self, tmp_path, capsys):
        argv = ["probe", "--domain", "interval:pi", "--alpha", "1.5",
                "--horizon", "1", "--family", "decay:1.5", "--modes", "8,16",
                "--seed", "42", "--members", "3", "--time-nodes", "128"]
        code1, out1 = _run(argv, capsys)
        code2, out2 = _run(argv, capsys)
        assert code1 == code2 == 0
        assert out1 == out2  # byte-identical
        doc = json.loads(out1)
        assert set(doc["per_N"]) == {"8", "16"}


class TestReportCommand:
    def test_quick_report_passes_and_repeats_identically(self, tmp_path):
        # run through a subprocess so the entry point is exercised end to end
        out1 = tmp_path / "r1.json"
        out2 = tmp_path / "r2.json"
        for out in (out1, out2):
            proc = subprocess.run(
                [sys.executable, "-m", "fracplate.cli", "report",
                 "--profile", "quick", "--out", str(out)],
                capture_output=True,
                text=True,
                timeout=900,
            )
            assert proc.returncode == 0, proc.stderr
        assert out1.read_bytes() == out2.read_bytes()
        doc = json.loads(out1.read_text())
        assert doc["all_passed"] is True
        assert len(doc["criteria"]) == 6


def test_canonical_json_formatting():
    text = canonical_json({"b": 0.1, "a": [1, 2.5, None, True]})
    assert text == '{"a":[1,2.5,null,true],"b":0.10000000000000001}'


class TestExitCodeContract:
    def test_tolerance_failure_is_nonzero(self, monkeypatch, capsys):
        from fracplate import cli
        from fracplate.report import VerificationReport

        failing = VerificationReport(
            name="stub", metrics={"m": 2.0}, tolerances={"m": 1.0}
        )
        failing.evaluate()
        monkeypatch.setattr(cli, "run_all", lambda quick: [failing])
        code, out = _run(["report", "--profile", "quick"], capsys)
        assert code == 1
        assert json.loads(out)["all_passed"] is False


class TestWorkerCap:
    def test_thread_map_order_independent_of_cap(self, monkeypatch):
        from fracplate._parallel import thread_map, worker_count

        monkeypatch.setenv("FRACPLATE_THREADS", "4")
        assert worker_count() == 4
        items = list(range(20))
        assert thread_map(lambda x: x * x, items) == [x * x for x in items]
        monkeypatch.setenv("FRACPLATE_THREADS", "not-a-number")
        assert worker_count() == 1
