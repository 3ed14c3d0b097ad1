"""
CTRW market process: jump and waiting-time transforms, the Fourier-Laplace
propagator, the risk-neutral (martingale) rate, and increment sampling.
"""
import logging
import math
from typing import Tuple

import numpy as np
from scipy import integrate

from models.market import JumpLaw, MarketModel, TransformPoint, WaitingLaw
from utils.errors import DegenerateDenominator, DomainError, InfeasibleRiskNeutral

logger = logging.getLogger(__name__)

# Distance to the feasibility frontier below which λ is refused
FEASIBILITY_SLACK = 1e-9
RISK_NEUTRAL_RTOL = 1e-12
DENOMINATOR_TOL = 1e-14


def jump_density(jumps: JumpLaw, x):
    """
    Evaluate h(x) for scalar or array x.

    Args:
        jumps: Jump law
        x: Log-return value(s)

    Returns:
        Density value(s), same shape as x
    """
    x = np.asarray(x, dtype=float)
    c = jumps.gamma * jumps.rho / (jumps.gamma + jumps.rho)
    # clip exponents so the unused branch cannot overflow
    up = np.exp(-jumps.rho * np.clip(x, 0.0, None))
    down = np.exp(jumps.gamma * np.clip(x, None, 0.0))
    out = c * np.where(x >= 0, up, down)
    return float(out) if out.ndim == 0 else out


def jump_mass(jumps: JumpLaw) -> float:
    """Numerical integral of h over the real line"""
    down, _ = integrate.quad(lambda x: jump_density(jumps, x), -np.inf, 0.0, epsabs=1e-13, epsrel=1e-13)
    up, _ = integrate.quad(lambda x: jump_density(jumps, x), 0.0, np.inf, epsabs=1e-13, epsrel=1e-13)
    return down + up


def jump_transform(jumps: JumpLaw, omega: complex) -> complex:
    """
    Fourier transform h̃(ω) = E[e^{iωX}] of the jump law.

    Complex ω is allowed; h̃(-i) = E[e^X] = γρ/((ρ-1)(γ+1)).
    """
    rho, gamma = jumps.rho, jumps.gamma
    iw = 1j * complex(omega)
    up_den = rho - iw
    down_den = gamma + iw
    if abs(up_den) < DENOMINATOR_TOL or abs(down_den) < DENOMINATOR_TOL:
        raise DomainError(f"omega={omega!r} is a pole of the jump transform")
    return gamma * rho / (gamma + rho) * (1.0 / up_den + 1.0 / down_den)


def jump_moments(jumps: JumpLaw) -> Tuple[float, float]:
    """
    Mean and variance of a single log-return jump.

    Returns:
        (mean, variance) with mean = (γ-ρ)/(γρ)
    """
    rho, gamma = jumps.rho, jumps.gamma
    mean = (gamma - rho) / (gamma * rho)
    second = 2.0 * (gamma ** 2 - gamma * rho + rho ** 2) / (gamma ** 2 * rho ** 2)
    return mean, second - mean ** 2


def waiting_transform(waits: WaitingLaw, s: complex) -> complex:
    """
    Laplace transform ψ̂(s) of the waiting-time density.

    Raises:
        InfeasibleRiskNeutral: For non-exponential waits (sampling only)
    """
    if not waits.is_exponential:
        raise InfeasibleRiskNeutral(
            "exponential waiting times",
            f"{waits.kind.value} waits are supported by the Monte Carlo oracle only",
        )
    lam = waits.rate
    return lam / (lam + s)


def propagator_fl(model: MarketModel, p: TransformPoint) -> complex:
    """
    Fourier-Laplace propagator (1/s)(1-ψ̂(s))/(1-h̃(ω)ψ̂(s)).

    Args:
        model: Market with exponential waits
        p: Evaluation point, Re(s) > 0

    Returns:
        Complex transform value

    Raises:
        DegenerateDenominator: When |1 - h̃ψ̂| is numerically zero
    """
    s = complex(p.s)
    psi = waiting_transform(model.waits, s)
    h = jump_transform(model.jumps, p.omega)
    den = 1.0 - h * psi
    if abs(den) < DENOMINATOR_TOL:
        raise DegenerateDenominator(f"|1 - h(omega) psi(s)| = {abs(den):.3g} at omega={p.omega!r}, s={s!r}")
    return (1.0 - psi) / (s * den)


def martingale_rate(jumps: JumpLaw, r: float) -> float:
    """
    Transaction rate that makes e^{-rt}S(t) a martingale.

    λ = r(ρ-1)(γ+1)/(γ-ρ+1), equivalently r/(h̃(-i) - 1).

    Args:
        jumps: Jump law; needs γ > ρ-1 > 0
        r: Risk-free rate, > 0

    Returns:
        The rate λ > 0

    Raises:
        InfeasibleRiskNeutral: Naming the violated inequality
    """
    rho, gamma = jumps.rho, jumps.gamma
    if not rho - 1.0 > FEASIBILITY_SLACK:
        raise InfeasibleRiskNeutral("rho > 1", f"rho={rho!r}: E[e^X] is unbounded")
    if not gamma - (rho - 1.0) > FEASIBILITY_SLACK:
        raise InfeasibleRiskNeutral("gamma > rho - 1", f"rho={rho!r}, gamma={gamma!r}: lambda would not be positive")
    if not (math.isfinite(r) and r > 0):
        raise InfeasibleRiskNeutral("r > 0", f"r={r!r}: lambda would not be positive")
    return r * (rho - 1.0) * (gamma + 1.0) / (gamma - rho + 1.0)


def check_risk_neutral(model: MarketModel):
    """
    Confirm the model's waits are exponential at the martingale rate.

    Raises:
        InfeasibleRiskNeutral: When no risk-neutral measure matches the model
    """
    if not model.waits.is_exponential:
        raise InfeasibleRiskNeutral(
            "exponential waiting times",
            "non-Poisson transaction flow admits no risk-neutral measure",
        )
    target = martingale_rate(model.jumps, model.r)
    lam = model.waits.rate
    if abs(lam - target) > RISK_NEUTRAL_RTOL * target:
        raise InfeasibleRiskNeutral(
            "lambda = r (rho-1)(gamma+1)/(gamma-rho+1)",
            f"lambda={lam!r} but the martingale rate is {target!r}",
        )


def risk_neutral_model(jumps: JumpLaw, r: float, s0: float = 1.0) -> MarketModel:
    """Build the risk-neutral market for a jump law and rate"""
    lam = martingale_rate(jumps, r)
    logger.debug("martingale rate for rho=%g gamma=%g r=%g: %.12g", jumps.rho, jumps.gamma, r, lam)
    return MarketModel(jumps, WaitingLaw.exponential(lam), r, s0, risk_neutral=True)


def require_risk_neutral(model: MarketModel) -> float:
    """Return λ for a risk-neutral model, raising otherwise"""
    check_risk_neutral(model)
    return model.waits.rate


def sample_increments(model: MarketModel, rng: np.random.Generator, size: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Draw `size` independent (waiting time, log-return) pairs by inverse transform.

    Four uniforms are consumed per pair in a fixed layout, so the stream is
    reproducible for any waiting family.

    Returns:
        (dt, dx) arrays of length size
    """
    u = rng.random((4, size))
    dt = model.waits.quantile(u[0], u[1])
    jumps = model.jumps
    up = u[2] < jumps.up_probability
    magnitude = -np.log1p(-u[3])
    dx = np.where(up, magnitude / jumps.rho, -magnitude / jumps.gamma)
    return dt, dx


def sample_increment(model: MarketModel, rng: np.random.Generator) -> Tuple[float, float]:
    """Single (dt, dx) draw; deterministic given the generator state"""
    dt, dx = sample_increments(model, rng, 1)
    return float(dt[0]), float(dx[0])


def sample_path(model: MarketModel, rng: np.random.Generator, horizon: float,
                max_jumps: int = 1_000_000) -> Tuple[np.ndarray, np.ndarray]:
    """
    One step trajectory on [0, horizon].

    Returns:
        (times, log_prices): times[0] = 0 with log_prices[0] = x₀, followed by
        every jump time ≤ horizon and the log-price right after it
    """
    if not horizon > 0:
        raise DomainError(f"horizon: must be > 0, got {horizon!r}")
    times = [0.0]
    values = [model.x0]
    t, x = 0.0, model.x0
    for _ in range(max_jumps):
        dt, dx = sample_increment(model, rng)
        t += dt
        if t > horizon:
            break
        x += dx
        times.append(t)
        values.append(x)
    return np.asarray(times), np.asarray(values)
