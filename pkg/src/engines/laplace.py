"""Numerical Laplace inversion (fixed-contour Talbot with a Gaver-Stehfest cross-check)"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import mpmath

from utils.errors import DomainError, InversionUnstable

logger = logging.getLogger(__name__)

# mpmath raises the working precision with the Stehfest order (1.38 digits per term)
STEHFEST_ORDERS = range(10, 41, 2)
DEFAULT_STEHFEST_ORDER = 32
TALBOT_NODES = 32
DEFAULT_TOLERANCE = 1e-6
# agreement is judged relative to max(|estimate|, ABS_FLOOR)
ABS_FLOOR = 1e-9


@dataclass(frozen=True)
class Inversion:
    """
    Time-domain value recovered from a transform.

    Attributes:
        t: Evaluation time
        value: Reported value (clamped to [0, 1] when requested)
        unclamped: Raw inversion output
        residual: unclamped - value (zero when no clamping happened)
        method: "stehfest" or "talbot"
        order: Stehfest order or number of Talbot nodes
        lower_estimate: Estimate at the next lower order used for the agreement check
    """
    t: float
    value: float
    unclamped: float
    residual: float
    method: str
    order: int
    lower_estimate: float


def _invert(f_hat: Callable, t: float, method: str, degree: int) -> float:
    value = mpmath.invertlaplace(f_hat, t, method=method, degree=degree)
    return float(mpmath.re(value))


def _agree(high: float, low: float, tolerance: float) -> bool:
    return abs(high - low) <= tolerance * max(abs(high), ABS_FLOOR)


def invert_laplace(f_hat: Callable, t: float, method: str = "talbot",
                   order: Optional[int] = None, tolerance: float = DEFAULT_TOLERANCE,
                   clamp: bool = False) -> Inversion:
    """
    Invert a Laplace transform at time t.

    The evaluator is called with mpmath numbers at raised working precision and
    must stay inside mpmath arithmetic (real s for Stehfest, complex for Talbot).

    Args:
        f_hat: Transform evaluator s -> f̂(s)
        t: Time, > 0
        method: "talbot" (fixed contour) or "stehfest" (orders 10..40, even)
        order: Talbot node count or Stehfest order; both default to 32
        tolerance: Relative agreement required between N and N-8 Talbot
            nodes (orders N and N-2 for Stehfest)
        clamp: Clamp the result to [0, 1], for survival probabilities

    Returns:
        Inversion with the value and the pre-clamp residual

    Raises:
        InversionUnstable: When the two orders disagree beyond tolerance
    """
    if not (math.isfinite(t) and t > 0):
        raise DomainError(f"t: inversion time must be > 0, got {t!r}")
    if method == "stehfest":
        order = DEFAULT_STEHFEST_ORDER if order is None else int(order)
        if order not in STEHFEST_ORDERS:
            raise DomainError(f"order: Stehfest order must be even in [10, 40], got {order}")
        lower = order - 2
    elif method == "talbot":
        order = TALBOT_NODES if order is None else int(order)
        if order < 16:
            raise DomainError(f"order: Talbot needs at least 16 nodes, got {order}")
        lower = order - 8
    else:
        raise DomainError(f"method: unknown inversion method {method!r}")

    high = _invert(f_hat, t, method, order)
    low = _invert(f_hat, t, method, lower)
    if not _agree(high, low, tolerance):
        raise InversionUnstable(t, low, high, tolerance)

    value = min(max(high, 0.0), 1.0) if clamp else high
    if value != high:
        logger.debug("clamped %s inversion at t=%g: %.3e -> %.3e", method, t, high, value)
    return Inversion(t=t, value=value, unclamped=high, residual=high - value,
                     method=method, order=order, lower_estimate=low)


def cross_check(f_hat: Callable, t: float, clamp: bool = False,
                tolerance: float = DEFAULT_TOLERANCE) -> float:
    """
    Absolute gap between the Talbot and Gaver-Stehfest inversions.

    Returns:
        |talbot - stehfest| (pre-clamp values)
    """
    talbot = invert_laplace(f_hat, t, "talbot", tolerance=tolerance, clamp=clamp)
    stehfest = invert_laplace(f_hat, t, "stehfest", tolerance=tolerance, clamp=clamp)
    return abs(talbot.unclamped - stehfest.unclamped)
