import pytest

from engines.mc_oracle import MonteCarloOracle
from engines.process import risk_neutral_model
from models.market import JumpLaw
from utils.config import reset_settings


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Every test reads CTRW_* settings from a clean environment"""
    for name in ("CTRW_THREADS", "CTRW_LOG_LEVEL", "CTRW_CSV_PRECISION", "CTRW_MC_BLOCK",
                 "CTRW_CENSOR_BOUND", "CTRW_MIN_PATHS"):
        monkeypatch.delenv(name, raising=False)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def jumps():
    return JumpLaw(rho=2.0, gamma=3.0)


@pytest.fixture
def market(jumps):
    """Reference risk-neutral market: rho=2, gamma=3, r=5%, lambda=0.1"""
    return risk_neutral_model(jumps, 0.05, 1.0)


@pytest.fixture
def oracle():
    return MonteCarloOracle(workers=1, block_size=4096)


