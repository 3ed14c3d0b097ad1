"""
Risk-neutral perpetual American option prices under the CTRW market,
together with their Black-Scholes diffusive limits.
"""
import logging
import math
from typing import Iterable, List, Tuple

import numpy as np
import pandas as pd
from scipy import optimize

from engines.process import require_risk_neutral, risk_neutral_model
from engines.survival import phi_minus_laplace, phi_plus_laplace
from models.market import JumpLaw, MarketModel
from models.options import OptionSpec, PayoffKind, PriceResult, Regime
from utils.errors import DomainError

logger = logging.getLogger(__name__)


def _jump_rates(model: MarketModel) -> Tuple[float, float]:
    require_risk_neutral(model)
    return model.jumps.rho, model.jumps.gamma


def binary_price(model: MarketModel, spec: OptionSpec) -> PriceResult:
    """
    Perpetual binary (digital) option paying 1 at the first crossing of K₀.

    Live prices: D⁺ = ((ρ-1)/ρ)(S₀/K₀) for S₀ ≤ K₀ and
    D⁻ = ((ρ-1)/γ)(K₀/S₀)^{γ-ρ+1} for S₀ ≥ K₀. A spot strictly beyond K₀
    is exercised at once for 1. S₀ = K₀ stays Live, so the price jumps there.

    Args:
        model: Risk-neutral market
        spec: BinaryCall or BinaryPut with threshold K₀

    Returns:
        PriceResult with boundary K₀
    """
    rho, gamma = _jump_rates(model)
    s0, k0 = model.s0, spec.strike
    if spec.payoff is PayoffKind.BINARY_CALL:
        if s0 > k0:
            return PriceResult(1.0, k0, Regime.IMMEDIATE, spec, s0)
        price = (rho - 1.0) / rho * (s0 / k0)
    elif spec.payoff is PayoffKind.BINARY_PUT:
        if s0 < k0:
            return PriceResult(1.0, k0, Regime.IMMEDIATE, spec, s0)
        price = (rho - 1.0) / gamma * (k0 / s0) ** (gamma - rho + 1.0)
    else:
        raise DomainError(f"binary_price cannot value {spec.payoff.value}")
    return PriceResult(price, k0, Regime.LIVE, spec, s0)


def binary_price_from_survival(model: MarketModel, spec: OptionSpec) -> float:
    """
    The same live binary price through the survival transform: 1 - r Φ̂±(s=r).
    """
    require_risk_neutral(model)
    k0_log = math.log(spec.strike)
    if spec.payoff is PayoffKind.BINARY_CALL:
        return 1.0 - model.r * phi_plus_laplace(model, k0_log, model.x0, model.r)
    if spec.payoff is PayoffKind.BINARY_PUT:
        return 1.0 - model.r * phi_minus_laplace(model, k0_log, model.x0, model.r)
    raise DomainError(f"binary_price_from_survival cannot value {spec.payoff.value}")


def put_boundary(jumps: JumpLaw, strike: float) -> float:
    """Optimal exercise level H₀⁻ = K(γ+1)(γ-ρ+1)/(γ(γ-ρ+2)) of the perpetual put"""
    rho, gamma = jumps.rho, jumps.gamma
    eps = gamma - rho + 1.0
    return strike * (gamma + 1.0) * eps / (gamma * (eps + 1.0))


def vanilla_put_live_value(jumps: JumpLaw, strike: float, boundary: float, s0: float) -> float:
    """
    Live put value for an arbitrary exercise level H (S₀ ≥ H).

    V⁻ = (K - γ/(γ+1) H) ((ρ-1)/γ) (H/S₀)^{γ-ρ+1}
    """
    rho, gamma = jumps.rho, jumps.gamma
    expected_exercise = gamma / (gamma + 1.0) * boundary
    return (strike - expected_exercise) * (rho - 1.0) / gamma * (boundary / s0) ** (gamma - rho + 1.0)


def vanilla_put_price(model: MarketModel, spec: OptionSpec) -> PriceResult:
    """
    Perpetual American put.

    Returns:
        Live closed form for S₀ ≥ H₀⁻, otherwise immediate exercise at K - S₀
    """
    if spec.payoff is not PayoffKind.VANILLA_PUT:
        raise DomainError(f"vanilla_put_price cannot value {spec.payoff.value}")
    require_risk_neutral(model)
    k, s0 = spec.strike, model.s0
    boundary = put_boundary(model.jumps, k)
    if s0 < boundary:
        return PriceResult(k - s0, boundary, Regime.IMMEDIATE, spec, s0)
    price = vanilla_put_live_value(model.jumps, k, boundary, s0)
    return PriceResult(price, boundary, Regime.LIVE, spec, s0)


def vanilla_call_candidate(jumps: JumpLaw, strike: float, boundary: float, s0: float) -> float:
    """Value of a call exercised at the first crossing of a finite level H₀⁺ (S₀ ≤ H₀⁺)"""
    return s0 - (jumps.rho - 1.0) / jumps.rho * (s0 / boundary) * strike


def smooth_fit_residual(model: MarketModel, spec: OptionSpec, boundary: float) -> float:
    """
    Continuity gap V(H) - P(H) of a vanilla contract exercised at level H.

    Zero at an admissible exercise boundary. For the put it vanishes at H₀⁻;
    for the call it equals K/ρ for every H, so no finite boundary exists.
    """
    require_risk_neutral(model)
    if not (math.isfinite(boundary) and boundary > 0):
        raise DomainError(f"boundary: must be a finite price > 0, got {boundary!r}")
    k = spec.strike
    if spec.payoff is PayoffKind.VANILLA_PUT:
        return vanilla_put_live_value(model.jumps, k, boundary, boundary) - (k - boundary)
    if spec.payoff is PayoffKind.VANILLA_CALL:
        return vanilla_call_candidate(model.jumps, k, boundary, boundary) - (boundary - k)
    raise DomainError(f"smooth_fit_residual needs a vanilla contract, got {spec.payoff.value}")


def vanilla_call_boundary_scan(model: MarketModel, strike: float,
                               boundaries: Iterable[float]) -> Tuple[pd.DataFrame, List[float]]:
    """
    Search finite call boundaries for one meeting V⁺(H) = H - K.

    Args:
        model: Risk-neutral market
        strike: K
        boundaries: Candidate levels H₀⁺ (> 0)

    Returns:
        (scan, roots): the residual V⁺(H) - (H - K) per level, and every root
        bracketed by a sign change (refined with brentq)
    """
    spec = OptionSpec.vanilla_call(strike)

    def residual(h: float) -> float:
        return smooth_fit_residual(model, spec, h)

    levels = np.asarray(sorted(float(h) for h in boundaries))
    values = np.array([residual(h) for h in levels])
    roots = [float(h) for h, v in zip(levels, values) if v == 0.0]
    for i in range(len(levels) - 1):
        if values[i] * values[i + 1] < 0:
            roots.append(optimize.brentq(residual, levels[i], levels[i + 1]))
    return pd.DataFrame({"boundary": levels, "residual": values}), sorted(roots)


def vanilla_call_price(model: MarketModel, spec: OptionSpec) -> PriceResult:
    """The perpetual call is never exercised: V⁺(S₀) = S₀"""
    if spec.payoff is not PayoffKind.VANILLA_CALL:
        raise DomainError(f"vanilla_call_price cannot value {spec.payoff.value}")
    require_risk_neutral(model)
    return PriceResult(model.s0, None, Regime.NEVER, spec, model.s0)


def expected_exercise_payoff(model: MarketModel, boundary: float, side: str) -> float:
    """
    Expected asset price at the crossing of a level H.

    The overshoot is exponential and memoryless, so the value does not depend
    on when the crossing happens: H ρ/(ρ-1) going up, H γ/(γ+1) going down.
    """
    require_risk_neutral(model)
    rho, gamma = model.jumps.rho, model.jumps.gamma
    if side == "up":
        return boundary * rho / (rho - 1.0)
    if side == "down":
        return boundary * gamma / (gamma + 1.0)
    raise DomainError(f"side: expected 'up' or 'down', got {side!r}")


def price(model: MarketModel, spec: OptionSpec) -> PriceResult:
    """Price any supported perpetual contract"""
    if spec.payoff.is_binary:
        return binary_price(model, spec)
    if spec.payoff is PayoffKind.VANILLA_PUT:
        return vanilla_put_price(model, spec)
    return vanilla_call_price(model, spec)


def bs_epsilon(r: float, sigma: float) -> float:
    """ε = 2r/σ²"""
    if not (math.isfinite(sigma) and sigma > 0):
        raise DomainError(f"sigma: volatility must be > 0, got {sigma!r}")
    if not (math.isfinite(r) and r > 0):
        raise DomainError(f"r: rate must be > 0, got {r!r}")
    return 2.0 * r / sigma ** 2


def bs_parameters_from_ctrw(jumps: JumpLaw, r: float) -> Tuple[float, float]:
    """
    Black-Scholes (ε, σ) matching a CTRW jump law in the diffusive limit.

    Returns:
        (ε, σ) with ε = γ-ρ+1 and σ = √(2r/ε)
    """
    eps = jumps.gamma - jumps.rho + 1.0
    if not eps > 0:
        raise DomainError(f"gamma - rho + 1 must be > 0, got {eps!r}")
    return eps, math.sqrt(2.0 * r / eps)


def bs_limit_price(r: float, sigma: float, spec: OptionSpec, s0: float) -> PriceResult:
    """
    Perpetual American prices of the Black-Scholes market.

    Args:
        r: Risk-free rate, > 0
        sigma: Volatility, > 0
        spec: Contract
        s0: Spot, > 0

    Returns:
        PriceResult in the same conventions as the CTRW pricers
    """
    eps = bs_epsilon(r, sigma)
    if not (math.isfinite(s0) and s0 > 0):
        raise DomainError(f"spot: must be a finite price > 0, got {s0!r}")
    k = spec.strike
    if spec.payoff is PayoffKind.BINARY_CALL:
        if s0 > k:
            return PriceResult(1.0, k, Regime.IMMEDIATE, spec, s0)
        return PriceResult(s0 / k, k, Regime.LIVE, spec, s0)
    if spec.payoff is PayoffKind.BINARY_PUT:
        if s0 < k:
            return PriceResult(1.0, k, Regime.IMMEDIATE, spec, s0)
        return PriceResult((k / s0) ** eps, k, Regime.LIVE, spec, s0)
    if spec.payoff is PayoffKind.VANILLA_CALL:
        return PriceResult(s0, None, Regime.NEVER, spec, s0)
    boundary = k * eps / (1.0 + eps)
    if s0 < boundary:
        return PriceResult(k - s0, boundary, Regime.IMMEDIATE, spec, s0)
    return PriceResult((k - boundary) * (boundary / s0) ** eps, boundary, Regime.LIVE, spec, s0)


def convergence_table(r: float, sigma: float, rho_list: Iterable[float],
                      moneyness_grid: Iterable[float], strike: float = 1.0) -> pd.DataFrame:
    """
    CTRW put prices against the Black-Scholes put as ρ grows.

    γ is tied to ρ by γ = ρ - 1 + 2r/σ², which keeps the diffusive limit fixed.

    Returns:
        DataFrame with columns rho, moneyness, v_ctrw, v_bs sorted by rho then
        moneyness; prices are per unit strike when strike = 1
    """
    eps = bs_epsilon(r, sigma)
    spec = OptionSpec.vanilla_put(strike)
    grid = sorted(float(m) for m in moneyness_grid)
    rows = []
    for rho in sorted(float(x) for x in rho_list):
        if not rho > 1:
            raise DomainError(f"rho: must be > 1 for the convergence table, got {rho!r}")
        model = risk_neutral_model(JumpLaw(rho, rho - 1.0 + eps), r)
        for m in grid:
            s0 = m * strike
            rows.append({
                "rho": rho,
                "moneyness": m,
                "v_ctrw": vanilla_put_price(model.with_spot(s0), spec).price,
                "v_bs": bs_limit_price(r, sigma, spec, s0).price,
            })
    logger.debug("convergence table: %d rows", len(rows))
    return pd.DataFrame(rows, columns=["rho", "moneyness", "v_ctrw", "v_bs"])

