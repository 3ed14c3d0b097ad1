"""Market model types: jump law, waiting-time law, the full CTRW model"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

import numpy as np

from utils.errors import DomainError


@dataclass(frozen=True)
class JumpLaw:
    """
    Asymmetric two-sided exponential law of log-return jumps.

    h(x) = γρ/(γ+ρ) [e^{-ρx} 1{x≥0} + e^{γx} 1{x<0}]

    Attributes:
        rho: Decay rate of positive jumps (ρ > 0)
        gamma: Decay rate of negative jumps (γ > 0)
    """
    rho: float
    gamma: float

    def __post_init__(self):
        for name in ("rho", "gamma"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name}: must be a finite number > 0, got {value!r}")

    @property
    def up_probability(self) -> float:
        """Mass of the positive half-line, γ/(γ+ρ)"""
        return self.gamma / (self.gamma + self.rho)

    @property
    def down_probability(self) -> float:
        return self.rho / (self.gamma + self.rho)


class WaitingKind(str, Enum):
    EXPONENTIAL = "exponential"
    TWO_POINT = "two_point"
    HYPEREXPONENTIAL = "hyperexponential"
    WEIBULL = "weibull"


@dataclass(frozen=True)
class WaitingLaw:
    """
    Law of the sojourn time between consecutive transactions.

    Only the exponential family admits closed forms (and a risk-neutral
    measure); the other families exist so the Monte Carlo oracle can simulate
    non-Markovian markets.

    Attributes:
        kind: Family tag
        params: Family parameters; see the factory class methods
    """
    kind: WaitingKind
    params: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        p = self.params
        if self.kind is WaitingKind.EXPONENTIAL:
            if len(p) != 1 or not p[0] > 0:
                raise DomainError(f"lambda: exponential rate must be > 0, got {p!r}")
        elif self.kind in (WaitingKind.TWO_POINT, WaitingKind.HYPEREXPONENTIAL):
            if len(p) != 3:
                raise DomainError(f"{self.kind.value}: expected (first, second, weight), got {p!r}")
            if not (p[0] > 0 and p[1] > 0 and 0.0 <= p[2] <= 1.0):
                raise DomainError(f"{self.kind.value}: parameters out of range {p!r}")
        elif self.kind is WaitingKind.WEIBULL:
            if len(p) != 2 or not (p[0] > 0 and p[1] > 0):
                raise DomainError(f"weibull: (shape, scale) must be > 0, got {p!r}")

    @classmethod
    def exponential(cls, rate: float) -> "WaitingLaw":
        return cls(WaitingKind.EXPONENTIAL, (float(rate),))

    @classmethod
    def two_point(cls, first: float, second: float, weight: float = 0.5) -> "WaitingLaw":
        """Waits equal `first` with probability `weight`, otherwise `second`"""
        return cls(WaitingKind.TWO_POINT, (float(first), float(second), float(weight)))

    @classmethod
    def hyperexponential(cls, rate1: float, rate2: float, weight: float = 0.5) -> "WaitingLaw":
        """Mixture of Exp(rate1) with probability `weight` and Exp(rate2) otherwise"""
        return cls(WaitingKind.HYPEREXPONENTIAL, (float(rate1), float(rate2), float(weight)))

    @classmethod
    def weibull(cls, shape: float, scale: float) -> "WaitingLaw":
        return cls(WaitingKind.WEIBULL, (float(shape), float(scale)))

    @property
    def is_exponential(self) -> bool:
        return self.kind is WaitingKind.EXPONENTIAL

    @property
    def rate(self) -> float:
        """Exponential rate λ; only defined for the exponential family"""
        if not self.is_exponential:
            raise DomainError(f"{self.kind.value} waiting times have no single rate")
        return self.params[0]

    @property
    def mean(self) -> float:
        """Mean sojourn time μ"""
        p = self.params
        if self.kind is WaitingKind.EXPONENTIAL:
            return 1.0 / p[0]
        if self.kind is WaitingKind.TWO_POINT:
            return p[2] * p[0] + (1.0 - p[2]) * p[1]
        if self.kind is WaitingKind.HYPEREXPONENTIAL:
            return p[2] / p[0] + (1.0 - p[2]) / p[1]
        return p[1] * math.gamma(1.0 + 1.0 / p[0])

    def quantile(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """
        Inverse-transform sampler.

        Args:
            u: Uniforms on [0, 1) driving the magnitude
            v: Uniforms on [0, 1) selecting a mixture component (unused by
               single-component families, but always consumed so every family
               draws the same number of variates)

        Returns:
            Waiting times, same shape as u
        """
        p = self.params
        if self.kind is WaitingKind.EXPONENTIAL:
            return -np.log1p(-u) / p[0]
        if self.kind is WaitingKind.TWO_POINT:
            return np.where(v < p[2], p[0], p[1])
        if self.kind is WaitingKind.HYPEREXPONENTIAL:
            rates = np.where(v < p[2], p[0], p[1])
            return -np.log1p(-u) / rates
        return p[1] * np.power(-np.log1p(-u), 1.0 / p[0])


@dataclass(frozen=True)
class MarketModel:
    """
    Complete CTRW market: jumps, waits, risk-free rate and spot.

    Attributes:
        jumps: Log-return jump law
        waits: Waiting-time law
        r: Risk-free rate per unit time (r ≥ 0)
        s0: Spot price S₀ (> 0)
        risk_neutral: When True the waits must be exponential with the
            martingale rate (checked to relative 1e-12)
    """
    jumps: JumpLaw
    waits: WaitingLaw
    r: float
    s0: float = 1.0
    risk_neutral: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r >= 0):
            raise DomainError(f"r: must be a finite rate >= 0, got {self.r!r}")
        if not (math.isfinite(self.s0) and self.s0 > 0):
            raise DomainError(f"spot: must be a finite price > 0, got {self.s0!r}")
        if self.risk_neutral:
            from engines.process import check_risk_neutral
            check_risk_neutral(self)

    @property
    def x0(self) -> float:
        """Starting log-price ln S₀"""
        return math.log(self.s0)

    def with_spot(self, s0: float) -> "MarketModel":
        return MarketModel(self.jumps, self.waits, self.r, s0, self.risk_neutral)


@dataclass(frozen=True)
class TransformPoint:
    """
    Fourier-Laplace evaluation point.

    Attributes:
        omega: Fourier variable; complex values are allowed (ω = -i gives E[e^X])
        s: Laplace variable with Re(s) > 0
    """
    omega: complex
    s: complex

    def __post_init__(self):
        if not complex(self.s).real > 0:
            raise DomainError(f"s: Laplace variable needs Re(s) > 0, got {self.s!r}")
