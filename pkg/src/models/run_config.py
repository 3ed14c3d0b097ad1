"""Run configuration shared by the CLI subcommands"""
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional, Tuple

from models.market import JumpLaw, MarketModel, WaitingLaw
from models.options import OptionSpec, PayoffKind
from utils.config import get_settings
from utils.errors import ConfigError
from utils.parsers import parse_float_list
from utils.validators import is_auto, sanitize_int, validate_run_config

DEFAULT_RHOS = (2.0, 5.0, 20.0, 100.0, 1000.0)
DEFAULT_TIMES = (1.0, 10.0, 100.0)


def _default_moneyness() -> Tuple[float, ...]:
    return tuple(parse_float_list("0.85:1.5:0.01"))


def _floats(value: Any, default: Tuple[float, ...]) -> Tuple[float, ...]:
    if value is None:
        return default
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    return tuple(parse_float_list(value))


def _flag(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ('1', 'true', 'yes', 'on')


@dataclass(frozen=True)
class RunConfig:
    """
    Validated parameters of one CLI run.

    Attributes:
        rho: Up-jump decay rate ρ
        gamma: Down-jump decay rate γ
        r: Risk-free rate
        spot: Spot price S₀
        lam: Explicit transaction rate λ; None means the martingale rate
        payoff: Contract kind
        strike: K (vanilla) or K₀ (binary)
        out: CSV destination; None writes to stdout
        precision: Significant digits in CSV output
        seed: Monte Carlo seed
        n_paths: Monte Carlo path count
        sigma: Black-Scholes volatility for the convergence table
        rhos: ρ values of the convergence table
        moneyness: S₀/K grid of the convergence table
        times: Observation times of the survival curve
        side: Crossing direction of a one-sided survival query
        threshold: One-sided threshold price K₀ (defaults to strike)
        lower: Corridor lower price level
        upper: Corridor upper price level
        strike_normalized: Report convergence-table prices per unit strike
        csv: Emit a CSV row from `price`
    """
    rho: float = 2.0
    gamma: float = 3.0
    r: float = 0.05
    spot: float = 1.0
    lam: Optional[float] = None
    payoff: PayoffKind = PayoffKind.VANILLA_PUT
    strike: float = 1.0
    out: Optional[str] = None
    precision: int = 12
    seed: int = 42
    n_paths: int = 100_000
    sigma: float = 0.1
    rhos: Tuple[float, ...] = DEFAULT_RHOS
    moneyness: Tuple[float, ...] = field(default_factory=_default_moneyness)
    times: Tuple[float, ...] = DEFAULT_TIMES
    side: str = "up"
    threshold: Optional[float] = None
    lower: Optional[float] = None
    upper: Optional[float] = None
    strike_normalized: bool = True
    csv: bool = False

    @classmethod
    def from_mapping(cls, data: Dict[str, Any], command: str = "price") -> "RunConfig":
        """
        Build a config from merged file and flag values.

        Args:
            data: Raw values keyed by field name (None values are ignored)
            command: Subcommand the config is validated for

        Raises:
            ConfigError: With one field-precise message per problem
        """
        data = {k: v for k, v in data.items() if v is not None}
        is_valid, errors = validate_run_config(data, command)
        if not is_valid:
            raise ConfigError(errors)

        base = cls(precision=get_settings().csv_precision)
        values = {}
        for name in ('rho', 'gamma', 'r', 'spot', 'strike', 'sigma', 'threshold', 'lower', 'upper'):
            if name in data:
                values[name] = float(data[name])
        for name in ('precision', 'seed', 'n_paths'):
            if name in data:
                values[name] = sanitize_int(data[name])
        if not is_auto(data.get('lambda')):
            values['lam'] = float(data['lambda'])
        if 'payoff' in data:
            values['payoff'] = PayoffKind(str(data['payoff']))
        if 'out' in data:
            values['out'] = str(data['out'])
        if 'side' in data:
            values['side'] = str(data['side'])
        values['rhos'] = _floats(data.get('rhos'), base.rhos)
        values['moneyness'] = _floats(data.get('moneyness'), base.moneyness)
        values['times'] = _floats(data.get('times'), base.times)
        for name in ('strike_normalized', 'csv'):
            if name in data:
                values[name] = _flag(data[name])
        return replace(base, **values)

    @property
    def risk_neutral(self) -> bool:
        return self.lam is None

    @property
    def is_corridor(self) -> bool:
        return self.lower is not None and self.upper is not None

    @property
    def threshold_price(self) -> float:
        return self.strike if self.threshold is None else self.threshold

    def jumps(self) -> JumpLaw:
        return JumpLaw(self.rho, self.gamma)

    def to_model(self) -> MarketModel:
        """
        The configured market.

        lambda=auto gives the risk-neutral model; an explicit rate gives a
        model that closed-form pricing refuses.
        """
        if self.risk_neutral:
            from engines.process import risk_neutral_model
            return risk_neutral_model(self.jumps(), self.r, self.spot)
        return MarketModel(self.jumps(), WaitingLaw.exponential(self.lam), self.r, self.spot)

    def to_spec(self) -> OptionSpec:
        return OptionSpec(self.payoff, self.strike)

    def log_levels(self) -> Tuple[float, float]:
        """Absorbing log levels (a, b) of the survival query"""
        if self.is_corridor:
            return math.log(self.lower), math.log(self.upper)
        k0_log = math.log(self.threshold_price)
        if self.side == "up":
            return -math.inf, k0_log
        return k0_log, math.inf
