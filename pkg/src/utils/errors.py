"""Exception hierarchy for the CTRW pricing library"""
from typing import List, Optional


class CtrwError(Exception):
    """Base class for every error raised by the library"""


class DomainError(CtrwError, ValueError):
    """An argument lies outside the domain of the operation"""


class DegenerateDenominator(CtrwError, ArithmeticError):
    """A closed form hit a vanishing denominator"""


class InfeasibleRiskNeutral(CtrwError):
    """
    No risk-neutral measure exists for the requested parameters.

    Attributes:
        violated: The inequality (or requirement) that failed, e.g. "rho > 1"
    """

    def __init__(self, violated: str, detail: Optional[str] = None):
        self.violated = violated
        message = f"risk-neutral pricing requires {violated}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class InversionUnstable(CtrwError, ArithmeticError):
    """Successive Laplace inversion estimates disagree beyond tolerance"""

    def __init__(self, t: float, low: float, high: float, tolerance: float):
        self.t = t
        self.low = low
        self.high = high
        self.tolerance = tolerance
        super().__init__(
            f"inversion at t={t:g} unstable: {low!r} vs {high!r} (tolerance {tolerance:g})"
        )


class ExcessiveCensoring(CtrwError):
    """Monte Carlo censoring bias exceeds the configured bound"""

    def __init__(self, censored: int, n_paths: int, bias_bound: float, bound: float):
        self.censored = censored
        self.n_paths = n_paths
        self.bias_bound = bias_bound
        self.bound = bound
        super().__init__(
            f"{censored}/{n_paths} paths censored; bias bound {bias_bound:.3g} exceeds {bound:.3g}"
        )


class InsufficientPower(CtrwError):
    """Too few Monte Carlo paths for a verification check to be meaningful"""

    def __init__(self, n_paths: int, minimum: int):
        self.n_paths = n_paths
        self.minimum = minimum
        super().__init__(f"n_paths={n_paths} below the minimum of {minimum} for verification")


class ConfigError(DomainError):
    """A run configuration failed validation; `errors` holds one message per field"""

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
