"""Runtime settings read from the environment (optionally seeded by a .env file)"""
import os
from dataclasses import dataclass
from typing import Optional


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    return int(raw)


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    return float(raw)


@dataclass(frozen=True)
class Settings:
    """
    Process-wide knobs.

    Attributes:
        threads: Worker cap for Monte Carlo fan-out (speed only, never results)
        log_level: Logging level name
        csv_precision: Significant decimal digits written to CSV
        mc_block: Paths per RNG block; part of the reproducibility key
        censor_bound: Largest tolerated censoring bias for discounted estimators
        min_paths: Verification refuses to judge below this many paths
    """
    threads: int = 1
    log_level: str = "WARNING"
    csv_precision: int = 12
    mc_block: int = 8192
    censor_bound: float = 1e-3
    min_paths: int = 1000

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            threads=max(1, _env_int("CTRW_THREADS", os.cpu_count() or 1)),
            log_level=os.getenv("CTRW_LOG_LEVEL", "WARNING").upper(),
            csv_precision=_env_int("CTRW_CSV_PRECISION", 12),
            mc_block=max(1, _env_int("CTRW_MC_BLOCK", 8192)),
            censor_bound=_env_float("CTRW_CENSOR_BOUND", 1e-3),
            min_paths=_env_int("CTRW_MIN_PATHS", 1000),
        )


# Global instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get or create the global settings instance"""
    global _settings
    if _settings is None:
        _settings = Settings.from_env()
    return _settings


def reset_settings():
    """Forget the cached settings so the environment is read again"""
    global _settings
    _settings = None
