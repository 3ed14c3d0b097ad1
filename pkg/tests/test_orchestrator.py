import pytest

from engines.mc_oracle import MonteCarloOracle
from models.run_config import RunConfig
from orchestrator import VerificationOrchestrator
from tools.check_catalog import VERIFICATION_CHECKS, get_check, get_check_names
from utils.errors import ExcessiveCensoring, InsufficientPower


class CensoringOracle(MonteCarloOracle):
    """Oracle whose every estimate is censored away"""

    def run(self, plan):
        raise ExcessiveCensoring(plan.n_paths, plan.n_paths, 1.0, self.censor_bound)


@pytest.fixture
def orchestrator(oracle):
    return VerificationOrchestrator(oracle=oracle, min_paths=1000)


def _config(**values):
    return RunConfig.from_mapping({"n_paths": 20_000, "seed": 42, **values}, "verify")


def test_catalog():
    assert get_check_names() == list(VERIFICATION_CHECKS)
    params = get_check("binary_call")
    params["spot"] = 99.0
    assert get_check("binary_call")["spot"] == 0.5
    with pytest.raises(KeyError):
        get_check("asian")


def test_reference_market_passes(orchestrator):
    report = orchestrator.run_suite(_config())
    failed = [row for row in report["checks"] if not row["passed"]]
    assert failed == []
    assert report["status"] == "pass"
    assert [row["check"] for row in report["checks"]] == get_check_names()
    assert (report["seed"], report["n_paths"]) == (42, 20_000)


def test_rows_carry_targets(orchestrator):
    report = orchestrator.run_suite(_config(), ["binary_call", "binary_put", "vanilla_put"])
    targets = {row["check"]: row["target"] for row in report["checks"]}
    assert targets["binary_call"] == pytest.approx(0.25)
    assert targets["binary_put"] == pytest.approx(1.0 / 12.0)
    assert targets["vanilla_put"] == pytest.approx(64.0 / 729.0)


def test_overshoot_rows(orchestrator):
    report = orchestrator.run_suite(_config(), ["overshoot_up", "overshoot_down"])
    up, down = report["checks"]
    assert up["target"] == pytest.approx(0.5)
    assert down["target"] == pytest.approx(1.0 / 3.0)
    assert "KS p=" in up["detail"]


def test_wrong_transaction_rate_fails(orchestrator):
    report = orchestrator.run_suite(_config(**{"lambda": "0.5"}), ["martingale", "binary_call"])
    assert report["status"] == "fail"
    assert not any(row["passed"] for row in report["checks"])
    assert abs(report["checks"][0]["statistic"]) > 4.0


def test_too_few_paths(orchestrator):
    with pytest.raises(InsufficientPower) as info:
        orchestrator.run_suite(_config(n_paths=10))
    assert info.value.minimum == 1000
    assert "below the minimum" in str(info.value)


def test_unknown_check(orchestrator):
    with pytest.raises(KeyError):
        orchestrator.run_suite(_config(), ["asian"])


def test_numerical_error_becomes_failed_row():
    orchestrator = VerificationOrchestrator(oracle=CensoringOracle(workers=1), min_paths=1000)
    report = orchestrator.run_suite(_config(), ["binary_call"])
    row = report["checks"][0]
    assert report["status"] == "fail"
    assert not row["passed"]
    assert row["detail"].startswith("ExcessiveCensoring")
    assert any("Error" in step["message"] for step in report["workflow_log"])


def test_workflow_log(orchestrator):
    report = orchestrator.run_suite(_config(), ["binary_put"])
    assert report["workflow_log"] == [
        {"check": "binary_put", "message": "Starting..."},
        {"check": "binary_put", "message": "Completed - PASS"},
    ]


def test_min_paths_from_settings(monkeypatch, oracle):
    monkeypatch.setenv("CTRW_MIN_PATHS", "50000")
    from utils.config import reset_settings
    reset_settings()
    with pytest.raises(InsufficientPower):
        VerificationOrchestrator(oracle=oracle).run_suite(_config())
