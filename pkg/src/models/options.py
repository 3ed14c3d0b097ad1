"""Option contract and pricing result types"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from utils.errors import DomainError


class PayoffKind(str, Enum):
    BINARY_CALL = "binary_call"
    BINARY_PUT = "binary_put"
    VANILLA_CALL = "vanilla_call"
    VANILLA_PUT = "vanilla_put"

    @property
    def is_binary(self) -> bool:
        return self in (PayoffKind.BINARY_CALL, PayoffKind.BINARY_PUT)

    @property
    def is_call(self) -> bool:
        return self in (PayoffKind.BINARY_CALL, PayoffKind.VANILLA_CALL)

    @property
    def side(self) -> str:
        """Direction of the exercise crossing: 'up' for calls, 'down' for puts"""
        return "up" if self.is_call else "down"


@dataclass(frozen=True)
class OptionSpec:
    """
    Perpetual American contract.

    Attributes:
        payoff: Binary or vanilla, call or put
        strike: K for vanilla contracts, the threshold K₀ for binaries
    """
    payoff: PayoffKind
    strike: float

    def __post_init__(self):
        if not (math.isfinite(self.strike) and self.strike > 0):
            raise DomainError(f"strike: must be a finite price > 0, got {self.strike!r}")

    @classmethod
    def binary_call(cls, k0: float) -> "OptionSpec":
        return cls(PayoffKind.BINARY_CALL, float(k0))

    @classmethod
    def binary_put(cls, k0: float) -> "OptionSpec":
        return cls(PayoffKind.BINARY_PUT, float(k0))

    @classmethod
    def vanilla_call(cls, k: float) -> "OptionSpec":
        return cls(PayoffKind.VANILLA_CALL, float(k))

    @classmethod
    def vanilla_put(cls, k: float) -> "OptionSpec":
        return cls(PayoffKind.VANILLA_PUT, float(k))

    def payoff_at(self, spot: float) -> float:
        """
        Exercise value at a given asset price.

        Binary payoffs use strict inequalities, so a binary exactly at its
        threshold is worth nothing if exercised there.
        """
        k = self.strike
        if self.payoff is PayoffKind.BINARY_CALL:
            return 1.0 if spot > k else 0.0
        if self.payoff is PayoffKind.BINARY_PUT:
            return 1.0 if spot < k else 0.0
        if self.payoff is PayoffKind.VANILLA_CALL:
            return max(spot - k, 0.0)
        return max(k - spot, 0.0)


class Regime(str, Enum):
    LIVE = "live"
    IMMEDIATE = "immediate"
    NEVER = "never"


@dataclass(frozen=True)
class PriceResult:
    """
    Outcome of a perpetual American valuation.

    Attributes:
        price: Fair value at S₀
        boundary: Optimal exercise level; None when the option is never exercised
        regime: Live (hold), Immediate (exercise now) or Never (hold forever)
        spec: The priced contract
        s0: Spot used
    """
    price: float
    boundary: Optional[float]
    regime: Regime
    spec: OptionSpec
    s0: float

    @property
    def never_exercised(self) -> bool:
        return self.boundary is None

    @property
    def intrinsic(self) -> float:
        return self.spec.payoff_at(self.s0)

    def as_row(self) -> dict:
        return {
            "payoff": self.spec.payoff.value,
            "strike": self.spec.strike,
            "spot": self.s0,
            "price": self.price,
            "boundary": self.boundary if self.boundary is not None else math.inf,
            "regime": self.regime.value,
        }
