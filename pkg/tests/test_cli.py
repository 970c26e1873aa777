import csv
import json
from pathlib import Path

import jsonschema
import pytest

from spikedcov.cli import main

SCHEMA_DIR = Path(__file__).resolve().parents[1] / "src" / "spikedcov" / "schemas"
CHALF = ["--p", "1000", "--n", "2000", "--spike", "4", "--spike", "3", "--spike", "0.1"]


def load_schema(name):
    with open(SCHEMA_DIR / name) as fh:
        return json.load(fh)


def test_predict_table(capsys):
    assert main(["predict", *CHALF]) == 0
    out = capsys.readouterr().out
    assert "4.66667" in out and "3.75000" in out and "0.04444" in out
    assert "2.91421" in out and "0.08579" in out


def test_predict_json_schema(capsys):
    assert main(["predict", *CHALF, "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    jsonschema.validate(payload, load_schema("prediction_report.schema.json"))
    assert payload["regime"] == "c<1"
    assert len(payload["entries"]) == 5


def test_predict_csv(capsys):
    assert main(["predict", *CHALF, "--format", "csv"]) == 0
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert rows[0] == ["lo", "hi", "limit", "kind", "alpha"]
    assert len(rows) == 6


def test_predict_pure_limit_query(capsys):
    assert main(["predict", "--c", "0.5", "--spike", "4", "--spike", "3",
                 "--spike", "0.1"]) == 0
    out = capsys.readouterr().out
    assert "4.66667" in out and "0.04444" in out and "supercritical" in out


def test_predict_missing_dimensions():
    assert main(["predict", "--spike", "4"]) == 1


def test_support_json_schema(capsys):
    assert main(["support", *CHALF, "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    jsonschema.validate(payload, load_schema("support_report.schema.json"))
    assert len(payload["complement_intervals"]) == 6
    assert payload["complement_intervals"][0]["x_lo"] is None  # -inf


def test_support_csv(capsys):
    assert main(["support", *CHALF, "--format", "csv"]) == 0
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert rows[0] == ["interval", "x_lo", "x_hi", "m_lo", "m_hi"]
    assert rows[1][1] == "-inf"
    assert len(rows) == 7


def test_mplaw_csv_file(tmp_path, capsys):
    out = tmp_path / "law.csv"
    assert main(["mplaw", "--c", "0.5", "--points", "101", "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "density"]
    assert len(rows) == 102
    assert float(rows[1][0]) == pytest.approx(0.0857864376269049)
    assert float(rows[-1][0]) == pytest.approx(2.914213562373095)
    assert float(rows[1][1]) == 0.0 and float(rows[-1][1]) == 0.0


def test_simulate_csv(tmp_path):
    out = tmp_path / "runs.csv"
    assert main(["simulate", "--p", "100", "--n", "200", "--spike", "4",
                 "--trials", "3", "--seed", "5", "--format", "csv",
                 "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["trial", "seed", "s_1", "s_2", "s_100"]
    assert len(rows) == 4
    assert [r[1] for r in rows[1:]] == ["5", "6", "7"]


def test_simulate_seed_determinism(tmp_path):
    out1, out2, out3 = (tmp_path / f"r{i}.csv" for i in range(3))
    args = ["simulate", "--p", "50", "--n", "100", "--spike", "4", "--trials", "2",
            "--format", "csv"]
    assert main([*args, "--seed", "1", "--out", str(out1)]) == 0
    assert main([*args, "--seed", "1", "--out", str(out2)]) == 0
    assert main([*args, "--seed", "2", "--out", str(out3)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_bytes() != out3.read_bytes()


def test_simulate_threads_do_not_change_output(tmp_path, monkeypatch):
    args = ["simulate", "--p", "50", "--n", "100", "--spike", "4", "--trials", "4",
            "--seed", "3", "--format", "csv"]
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main([*args, "--threads", "1", "--out", str(out1)]) == 0
    monkeypatch.setenv("SPIKEDCOV_THREADS", "4")
    assert main([*args, "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_simulate_json(capsys):
    assert main(["simulate", "--p", "60", "--n", "30", "--spike", "4",
                 "--trials", "2", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["indices"] == [1, 2, 30, 31, 60]
    zero_stats = [s for s in payload["stats"] if s["index"] in (31, 60)]
    assert all(s["max"] == 0.0 for s in zero_stats)


def test_reproduce_writes_files(tmp_path, capsys):
    out = tmp_path / "bench"
    assert main(["reproduce", "c-two", "--trials", "1", "--seed", "0",
                 "--out", str(out)]) == 0
    for ext in (".txt", ".csv", ".json", ".png"):
        f = out / f"reproduce_c-two{ext}"
        assert f.stat().st_size > 0
    with open(out / "reproduce_c-two.json") as fh:
        payload = json.load(fh)
    jsonschema.validate(payload, load_schema("reproduce_report.schema.json"))


def test_density_overlay_cli(tmp_path, capsys):
    prefix = tmp_path / "ov"
    assert main(["density-overlay", "--p", "120", "--n", "240", "--spike", "4",
                 "--seed", "1", "--out", str(prefix)]) == 0
    printed = capsys.readouterr().out.splitlines()
    assert len(printed) == 4
    for path in printed:
        assert Path(path).stat().st_size > 0


def test_config_supplies_defaults(tmp_path, capsys):
    cfg = {
        "p": 80, "n": 160, "spikes": [[4.0, 1]], "distribution": "rademacher",
        "trials": 2, "seed": 11,
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert main(["simulate", "--config", str(path), "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["model"]["p"] == 80
    assert payload["distribution"] == "rademacher"
    assert payload["trials"] == 2
    assert payload["base_seed"] == 11


def test_cli_flag_overrides_config(tmp_path, capsys):
    cfg = {"p": 80, "n": 160, "spikes": [[4.0, 1]], "trials": 5}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert main(["simulate", "--config", str(path), "--trials", "1",
                 "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["trials"] == 1


def test_exit_code_invalid_model(capsys):
    assert main(["predict", "--p", "10", "--n", "20", "--spike", "1"]) == 1
    assert "error" in capsys.readouterr().err


def test_exit_code_degenerate_support(capsys):
    assert main(["support", "--p", "100", "--n", "100", "--spike", "4"]) == 1


def test_exit_code_numerical_failure(capsys):
    # Far too small n for a near-threshold spike: root pattern cannot match.
    assert main(["support", "--p", "5", "--n", "10", "--spike", "1.9"]) == 2
    assert "numerical failure" in capsys.readouterr().err


def test_exit_code_bad_arguments(capsys):
    assert main(["predict", "--bogus"]) == 1
    assert main(["simulate", "--p", "10"]) == 1
    assert main(["predict", "--p", "10", "--n", "20", "--spike", "nope"]) == 1


def test_missing_config_file():
    assert main(["predict", "--config", "/nonexistent/cfg.json", "--c", "0.5"]) == 1
