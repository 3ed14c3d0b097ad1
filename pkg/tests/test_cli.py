import json
from pathlib import Path

import pytest
from rich.console import Console

import app
from app import EXIT_FAILED, EXIT_INVALID, EXIT_OK, main
from tools.csv_export import CONVERGENCE_COLUMNS, SURVIVAL_COLUMNS, read_csv
from utils.config import reset_settings


def test_price_reference_put(capsys):
    assert main(["price"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "0.087791" in out
    assert "0.888889" in out
    assert "Live" in out


def test_price_call_is_never_exercised(capsys):
    assert main(["price", "--call", "--spot", "1.5"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "1.500000" in out
    assert "never" in out
    assert "Never" in out


def test_price_binary_csv(capsys):
    assert main(["price", "--binary", "--call", "--spot", "0.5", "--csv"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines == ["payoff,strike,spot,price,boundary,regime", "binary_call,1,0.5,0.25,1,live"]


def test_price_rejects_infeasible_rho(capsys):
    assert main(["price", "--rho", "0.5"]) == EXIT_INVALID
    assert "rho: must be > 1" in capsys.readouterr().err


def test_price_rejects_explicit_lambda(capsys):
    assert main(["price", "--lambda", "0.5"]) == EXIT_INVALID
    assert "lambda=auto" in capsys.readouterr().err


def test_price_accepts_auto_lambda(capsys):
    assert main(["price", "--lambda", "auto"]) == EXIT_OK


def test_config_file_with_flag_override(tmp_path, capsys):
    path = tmp_path / "binary.cfg"
    path.write_text("payoff = binary_call\nspot = 0.5\n")
    assert main(["price", "--config", str(path), "--csv"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[1].startswith("binary_call,1,0.5,0.25,")
    assert main(["price", "--config", str(path), "--spot", "0.25", "--csv"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[1].startswith("binary_call,1,0.25,0.125,")


def test_config_file_unknown_key(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("volatility = 0.2\n")
    assert main(["price", "--config", str(path)]) == EXIT_INVALID
    assert "volatility: unknown configuration key" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["price", "--config", str(tmp_path / "absent.cfg")]) == EXIT_INVALID


def test_fig2_round_trip(tmp_path):
    out = tmp_path / "fig2" / "table.csv"
    code = main(["fig2", "--rhos", "2,1000", "--moneyness", "0.9:1.1:0.1", "--out", str(out)])
    assert code == EXIT_OK
    table = read_csv(out)
    assert list(table.columns) == CONVERGENCE_COLUMNS
    assert len(table) == 6
    at_the_money = table[(table["rho"] == 1000.0) & (table["moneyness"] == 1.0)]
    assert float(at_the_money["v_bs"].iloc[0]) == pytest.approx(0.035049, abs=1e-6)
    assert float(at_the_money["v_ctrw"].iloc[0]) == pytest.approx(0.035049, abs=1e-4)


def test_fig2_rejects_bad_sigma(capsys):
    assert main(["fig2", "--sigma", "0"]) == EXIT_INVALID
    assert "sigma" in capsys.readouterr().err


def test_survival_csv_is_deterministic(tmp_path, monkeypatch):
    argv = ["survival", "--spot", "0.5", "--threshold", "1", "--n-paths", "2000", "--seed", "9"]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    monkeypatch.setenv("CTRW_THREADS", "1")
    reset_settings()
    assert main(argv + ["--out", str(first)]) == EXIT_OK
    monkeypatch.setenv("CTRW_THREADS", "3")
    reset_settings()
    assert main(argv + ["--out", str(second)]) == EXIT_OK
    assert first.read_text() == second.read_text()

    table = read_csv(first)
    assert list(table.columns) == SURVIVAL_COLUMNS
    assert list(table["t"]) == [1.0, 10.0, 100.0]
    assert ((table["phi"] >= 0) & (table["phi"] <= 1)).all()
    assert (table["mc"].diff().dropna() <= 0).all()


def test_shipped_survival_config(tmp_path):
    config = Path(__file__).resolve().parent.parent / "configs" / "survival_up.cfg"
    out = tmp_path / "phi.csv"
    assert main(["survival", "--config", str(config), "--n-paths", "2000", "--out", str(out)]) == EXIT_OK
    table = read_csv(out)
    assert float(table["phi"].iloc[-1]) == pytest.approx(0.2115253733, abs=1e-9)


def test_verify_survival_check(capsys):
    assert main(["verify", "--checks", "survival", "--n-paths", "20000", "--seed", "42", "--json"]) == EXIT_OK
    row = json.loads(capsys.readouterr().out.splitlines()[0])
    assert row["passed"] is True
    assert "talbot-stehfest gap" in row["detail"]


def test_survival_corridor(capsys):
    argv = ["survival", "--lower", "0.5", "--upper", "2", "--times", "1,5", "--n-paths", "2000", "--precision", "6"]
    assert main(argv) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ",".join(SURVIVAL_COLUMNS)
    assert len(lines) == 3


def test_survival_rejects_half_corridor(capsys):
    assert main(["survival", "--lower", "0.5"]) == EXIT_INVALID
    assert "corridor needs both levels" in capsys.readouterr().err


def test_verify_refuses_few_paths(capsys):
    assert main(["verify", "--n-paths", "10"]) == EXIT_INVALID
    assert "below the minimum" in capsys.readouterr().err


def test_verify_detects_wrong_rate(capsys):
    code = main(["verify", "--lambda", "0.5", "--checks", "martingale", "--n-paths", "20000", "--json"])
    assert code == EXIT_FAILED
    row = json.loads(capsys.readouterr().out.splitlines()[0])
    assert row["check"] == "martingale"
    assert row["passed"] is False


def test_verify_json_lines(capsys):
    code = main(["verify", "--json", "--checks", "martingale,binary_call", "--n-paths", "2e4", "--seed", "42"])
    assert code == EXIT_OK
    rows = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [row["check"] for row in rows] == ["martingale", "binary_call"]
    for row in rows:
        assert row["passed"] is True
        assert (row["seed"], row["n_paths"]) == (42, 20_000)
        assert set(row) >= {"estimate", "stderr", "target", "statistic", "detail"}


def test_verify_table(capsys, monkeypatch):
    monkeypatch.setattr(app, "console", Console(width=200))
    assert main(["verify", "--checks", "binary_put", "--n-paths", "20000"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "binary_put" in out
    assert "PASS" in out


def test_verify_unknown_check(capsys):
    assert main(["verify", "--checks", "asian", "--n-paths", "20000"]) == EXIT_INVALID
    assert "unknown verification check" in capsys.readouterr().err
