"""
Survival probabilities of the CTRW in the Laplace domain.

Closed forms hold for the two-sided exponential jump law with exponential
waits. Every evaluator is written in mpmath arithmetic so the same code serves
the float API and the high-precision Laplace inversion; public functions
return floats.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import mpmath
import pandas as pd

from engines import laplace
from engines.process import waiting_transform
from models.market import JumpLaw, MarketModel
from utils.errors import DegenerateDenominator, DomainError

logger = logging.getLogger(__name__)

PSI_SLACK = 1e-12
DELTA_TOL = 1e-300


@dataclass(frozen=True)
class CorridorQuery:
    """
    Survival question for a region [a, b].

    Infinite boundaries are math.inf / -math.inf; a start on a boundary counts
    as alive (crossing needs a strict jump beyond it).

    Attributes:
        a: Lower log-price boundary, may be -inf
        b: Upper log-price boundary, may be +inf
        x0: Starting log-price
        s: Laplace variable, > 0
    """
    a: float
    b: float
    x0: float
    s: float

    def __post_init__(self):
        if math.isnan(self.a) or math.isnan(self.b) or not math.isfinite(self.x0):
            raise DomainError("corridor: boundaries must be numbers and x0 finite")
        if math.isinf(self.a) and math.isinf(self.b):
            raise DomainError("corridor: at most one boundary may be infinite")
        if not self.a < self.b:
            raise DomainError(f"corridor: need a < b, got a={self.a!r}, b={self.b!r}")
        if not self.a <= self.x0 <= self.b:
            raise DomainError(f"corridor: need a <= x0 <= b, got x0={self.x0!r}")
        if not self.s > 0:
            raise DomainError(f"s: Laplace variable must be > 0, got {self.s!r}")

    @property
    def one_sided(self) -> bool:
        return math.isinf(self.a) or math.isinf(self.b)


@dataclass(frozen=True)
class Auxiliaries:
    """
    Exponents of the survival solution.

    Attributes:
        alpha: Larger root, α = (ρ-γ)/2 + √D
        beta: Smaller root, β = (ρ-γ)/2 - √D
        delta: Corridor determinant Δ (None for one-sided use)
    """
    alpha: float
    beta: float
    delta: Optional[float] = None


@dataclass(frozen=True)
class WienerParams:
    """
    Brownian motion with drift used for comparison.

    Attributes:
        sigma: Volatility (> 0)
        vartheta: Drift ϑ
    """
    sigma: float
    vartheta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise DomainError(f"sigma: volatility must be > 0, got {self.sigma!r}")


def _roots(rho, gamma, psi):
    half = (rho - gamma) / 2
    root = mpmath.sqrt(((rho + gamma) / 2) ** 2 - gamma * rho * psi)
    return half + root, half - root


def _psi(model: MarketModel, s):
    return waiting_transform(model.waits, s)


def auxiliaries(jumps: JumpLaw, psi_hat: float) -> Auxiliaries:
    """
    α and β for a given value of ψ̂(s).

    Args:
        jumps: Jump law
        psi_hat: Waiting-time transform value in [0, 1]

    Returns:
        Auxiliaries with delta left unset

    Raises:
        DomainError: If psi_hat is outside [0, 1] beyond a 1e-12 slack
    """
    if not (-PSI_SLACK <= psi_hat <= 1.0 + PSI_SLACK):
        raise DomainError(f"psi_hat: must lie in [0, 1], got {psi_hat!r}")
    psi = min(max(psi_hat, 0.0), 1.0)
    rho, gamma = jumps.rho, jumps.gamma
    half = (rho - gamma) / 2.0
    disc = ((rho + gamma) / 2.0) ** 2 - gamma * rho * psi
    root = math.sqrt(max(disc, half * half))
    return Auxiliaries(alpha=half + root, beta=half - root)


def corridor_auxiliaries(jumps: JumpLaw, psi_hat: float, a: float, b: float) -> Auxiliaries:
    """α, β and the determinant Δ for a finite corridor (Δ may overflow to ±inf)"""
    aux = auxiliaries(jumps, psi_hat)
    alpha, beta = aux.alpha, aux.beta
    rho, gamma = jumps.rho, jumps.gamma
    delta = (mpmath.mpf(rho - alpha) * (gamma + beta) * mpmath.exp((alpha - beta) * a)
             - mpmath.mpf(rho - beta) * (gamma + alpha) * mpmath.exp((alpha - beta) * b))
    return Auxiliaries(alpha, beta, float(delta))


def _corridor(model: MarketModel, a, b, x0, s):
    rho, gamma = model.jumps.rho, model.jumps.gamma
    psi = _psi(model, s)
    alpha, beta = _roots(rho, gamma, psi)
    u = x0 - a      # distance to the lower boundary
    w = b - x0      # distance to the upper boundary
    width = b - a
    # Δ, both numerators and the 1/Δ factor all carry e^{(α-β)b}; it is divided out
    delta = (rho - alpha) * (gamma + beta) * mpmath.exp(-(alpha - beta) * width) - (rho - beta) * (gamma + alpha)
    if abs(delta) < DELTA_TOL:
        raise DegenerateDenominator(f"corridor determinant vanished for width={width!r}")
    upper = rho * (gamma + beta) * mpmath.exp(-alpha * w + beta * width) - gamma * (rho - beta) * mpmath.exp(-alpha * w)
    lower = gamma * (rho - alpha) * mpmath.exp(beta * u - alpha * width) - rho * (gamma + alpha) * mpmath.exp(beta * u)
    return (1 - psi * (upper + lower) / delta) / s


def _phi_plus(model: MarketModel, k0_log, x0, s):
    rho, gamma = model.jumps.rho, model.jumps.gamma
    psi = _psi(model, s)
    alpha, _ = _roots(rho, gamma, psi)
    return 1 / s - (gamma / s) * psi / (gamma + alpha) * mpmath.exp(alpha * (x0 - k0_log))


def _phi_minus(model: MarketModel, k0_log, x0, s):
    rho, gamma = model.jumps.rho, model.jumps.gamma
    psi = _psi(model, s)
    _, beta = _roots(rho, gamma, psi)
    return 1 / s - (rho / s) * psi / (rho - beta) * mpmath.exp(beta * (x0 - k0_log))


def _check_s(s: float):
    if not (math.isfinite(s) and s > 0):
        raise DomainError(f"s: Laplace variable must be a finite number > 0, got {s!r}")


def phi_plus_laplace(model: MarketModel, k0_log: float, x0: float, s: float) -> float:
    """
    Laplace transform of Pr{τ⁺ > t}, the up-crossing survival.

    Φ̂⁺ = 1/s - (γ/s) ψ̂(s)/(γ+α) (S₀/K₀)^α

    Args:
        model: Market with exponential waits
        k0_log: Log threshold ln K₀
        x0: Starting log-price, at or below k0_log
        s: Laplace variable, > 0

    Returns:
        Transform value in (0, 1/s]
    """
    _check_s(s)
    if x0 > k0_log:
        raise DomainError(f"x0={x0!r} lies above the up threshold {k0_log!r}")
    return float(_phi_plus(model, k0_log, x0, mpmath.mpf(s)))


def phi_minus_laplace(model: MarketModel, k0_log: float, x0: float, s: float) -> float:
    """
    Laplace transform of Pr{τ⁻ > t}, the down-crossing survival.

    Φ̂⁻ = 1/s - (ρ/s) ψ̂(s)/(ρ-β) (S₀/K₀)^β
    """
    _check_s(s)
    if x0 < k0_log:
        raise DomainError(f"x0={x0!r} lies below the down threshold {k0_log!r}")
    return float(_phi_minus(model, k0_log, x0, mpmath.mpf(s)))


def survival_corridor_laplace(model: MarketModel, q: CorridorQuery) -> float:
    """
    Laplace transform of the survival probability in [a, b].

    A query with one infinite boundary is answered by the matching one-sided
    formula rather than as a limit of the corridor expression.

    Raises:
        DegenerateDenominator: If the corridor determinant vanishes
    """
    if math.isinf(q.a):
        return phi_plus_laplace(model, q.b, q.x0, q.s)
    if math.isinf(q.b):
        return phi_minus_laplace(model, q.a, q.x0, q.s)
    return float(_corridor(model, q.a, q.b, q.x0, mpmath.mpf(q.s)))


def wiener_exponents(params: WienerParams, s: float):
    """(ᾱ, β̄) for Brownian motion with drift at Laplace variable s"""
    var = params.sigma ** 2
    root = math.sqrt(params.vartheta ** 2 + 2.0 * var * s)
    return (-params.vartheta + root) / var, (-params.vartheta - root) / var


def wiener_phi(params: WienerParams, k0_log: float, x0: float, s: float, side: str) -> float:
    """
    Wiener counterpart of Φ̂±: (1/s)(1 - (S₀/K₀)^{ᾱ or β̄}).

    Args:
        side: "up" (x0 ≤ k0_log) or "down" (x0 ≥ k0_log)
    """
    _check_s(s)
    alpha_bar, beta_bar = wiener_exponents(params, s)
    if side == "up":
        if x0 > k0_log:
            raise DomainError(f"x0={x0!r} lies above the up threshold {k0_log!r}")
        exponent = alpha_bar
    elif side == "down":
        if x0 < k0_log:
            raise DomainError(f"x0={x0!r} lies below the down threshold {k0_log!r}")
        exponent = beta_bar
    else:
        raise DomainError(f"side: expected 'up' or 'down', got {side!r}")
    return (1.0 - math.exp(exponent * (x0 - k0_log))) / s


def diffusive_parameters(model: MarketModel) -> WienerParams:
    """
    Wiener process matched to the CTRW for small mean sojourn time μ.

    ϑ = (γ-ρ)/(γρμ), σ² = 2/(γρμ)
    """
    rho, gamma = model.jumps.rho, model.jumps.gamma
    mu = model.waits.mean
    return WienerParams(sigma=math.sqrt(2.0 / (gamma * rho * mu)), vartheta=(gamma - rho) / (gamma * rho * mu))


def survival_transform(model: MarketModel, a: float, b: float, x0: float) -> Callable:
    """
    Transform evaluator s -> Ŝ_[a,b](s; x0) for the Laplace inverter.

    Returns:
        Callable accepting mpmath real or complex s
    """
    CorridorQuery(a, b, x0, 1.0)
    if math.isinf(a):
        return lambda s: _phi_plus(model, b, x0, s)
    if math.isinf(b):
        return lambda s: _phi_minus(model, a, x0, s)
    return lambda s: _corridor(model, a, b, x0, s)


def survival_at(model: MarketModel, a: float, b: float, x0: float, t: float,
                method: str = "talbot") -> laplace.Inversion:
    """Time-domain survival probability S_[a,b](t; x0), clamped to [0, 1]"""
    return laplace.invert_laplace(survival_transform(model, a, b, x0), t, method=method, clamp=True)


def phi_curve(model: MarketModel, k0_log: float, x0: float, side: str,
              times: Iterable[float]) -> pd.DataFrame:
    """
    Φ±(t) on a time grid, Talbot values with a Gaver-Stehfest cross-check.

    Returns:
        DataFrame with columns t, phi, residual, stehfest, gap
    """
    if side == "up":
        a, b = -math.inf, k0_log
    elif side == "down":
        a, b = k0_log, math.inf
    else:
        raise DomainError(f"side: expected 'up' or 'down', got {side!r}")
    return corridor_curve(model, a, b, x0, times)


def corridor_curve(model: MarketModel, a: float, b: float, x0: float,
                   times: Iterable[float]) -> pd.DataFrame:
    """S_[a,b](t) on a time grid; see phi_curve"""
    f_hat = survival_transform(model, a, b, x0)
    rows = []
    for t in times:
        talbot = laplace.invert_laplace(f_hat, float(t), "talbot", clamp=True)
        stehfest = laplace.invert_laplace(f_hat, float(t), "stehfest", clamp=True)
        rows.append({
            "t": float(t),
            "phi": talbot.value,
            "residual": talbot.residual,
            "stehfest": stehfest.value,
            "gap": abs(talbot.unclamped - stehfest.unclamped),
        })
    logger.debug("inverted survival on %d time points", len(rows))
    return pd.DataFrame(rows, columns=["t", "phi", "residual", "stehfest", "gap"])
