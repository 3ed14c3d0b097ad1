"""Validation utilities for run configurations"""
import math
from typing import Any, Dict, List, Optional

from utils.parsers import parse_float_list

PAYOFF_KINDS = ['binary_call', 'binary_put', 'vanilla_call', 'vanilla_put']
SIDES = ['up', 'down']
COMMANDS = ['price', 'survival', 'fig2', 'verify']

# Keys a config file may carry; anything else is reported
KNOWN_KEYS = {
    'rho', 'gamma', 'r', 'spot', 'lambda', 'payoff', 'strike', 'out', 'precision',
    'seed', 'n_paths', 'sigma', 'rhos', 'moneyness', 'times', 'side', 'threshold',
    'lower', 'upper', 'strike_normalized', 'csv',
}


def is_auto(value: Any) -> bool:
    """True for a missing lambda or the literal 'auto'"""
    return value is None or str(value).strip().lower() == 'auto'


def sanitize_float(value: Any) -> Optional[float]:
    """
    Convert a value to float

    Args:
        value: Raw value (any type)

    Returns:
        Float value, or None if it does not parse
    """
    try:
        return float(value)
    except (ValueError, TypeError):
        return None


def sanitize_int(value: Any) -> Optional[int]:
    """Convert a value to int, accepting integral floats such as '1e6'"""
    number = sanitize_float(value)
    if number is None or not math.isfinite(number) or number != int(number):
        return None
    return int(number)


def _number(data: Dict[str, Any], field: str, errors: List[str]) -> Optional[float]:
    if data.get(field) is None:
        return None
    value = sanitize_float(data[field])
    if value is None or not math.isfinite(value):
        errors.append(f"{field}: expected a finite number, got {data[field]!r}")
        return None
    return value


def _positive(data: Dict[str, Any], field: str, errors: List[str]) -> Optional[float]:
    value = _number(data, field, errors)
    if value is not None and not value > 0:
        errors.append(f"{field}: must be > 0, got {value:g}")
        return None
    return value


def _float_list(data: Dict[str, Any], field: str, errors: List[str]) -> List[float]:
    if data.get(field) is None:
        return []
    raw = data[field]
    if isinstance(raw, (list, tuple)):
        return [float(v) for v in raw]
    try:
        return parse_float_list(raw)
    except ValueError as e:
        errors.append(f"{field}: {e}")
        return []


def validate_model_params(data: Dict[str, Any], errors: List[str]) -> bool:
    """
    Check the market parameters (rho, gamma, r, spot, lambda).

    With lambda=auto the risk-neutral inequalities are enforced and named.

    Returns:
        True if lambda is auto (the model is risk-neutral)
    """
    rho = _positive(data, 'rho', errors)
    gamma = _positive(data, 'gamma', errors)
    r = _number(data, 'r', errors)
    _positive(data, 'spot', errors)
    if r is not None and r < 0:
        errors.append(f"r: must be >= 0, got {r:g}")
        r = None

    auto = is_auto(data.get('lambda'))
    if not auto:
        _positive(data, 'lambda', errors)
        return False

    if rho is not None and not rho > 1:
        errors.append(f"rho: must be > 1 for a risk-neutral model, got {rho:g}")
    elif rho is not None and gamma is not None and not gamma > rho - 1:
        errors.append(f"gamma: must be > rho - 1 = {rho - 1:g} for a risk-neutral model, got {gamma:g}")
    if r is not None and not r > 0:
        errors.append(f"r: must be > 0 for a risk-neutral model, got {r:g}")
    return True


def validate_run_config(data: Dict[str, Any], command: str = 'price') -> tuple[bool, Optional[List[str]]]:
    """
    Validate a merged (file + flags) run configuration for one command

    Args:
        data: Raw configuration values keyed by field name
        command: Subcommand the configuration is meant for

    Returns:
        Tuple of (is_valid, list_of_errors)
    """
    errors = []

    if command not in COMMANDS:
        errors.append(f"command: expected one of {', '.join(COMMANDS)}, got {command!r}")

    unknown = sorted(set(data) - KNOWN_KEYS)
    for key in unknown:
        errors.append(f"{key}: unknown configuration key")

    if command == 'fig2':
        _positive(data, 'r', errors)
        _positive(data, 'sigma', errors)
        rhos = _float_list(data, 'rhos', errors)
        if any(not rho > 1 for rho in rhos):
            errors.append("rhos: every rho must be > 1")
        grid = _float_list(data, 'moneyness', errors)
        if any(not m > 0 for m in grid):
            errors.append("moneyness: every value must be > 0")
    else:
        risk_neutral = validate_model_params(data, errors)
        if command == 'price' and not risk_neutral:
            errors.append("lambda: closed-form pricing needs lambda=auto (the martingale rate)")

    _positive(data, 'strike', errors)

    payoff = data.get('payoff')
    if payoff is not None and str(payoff) not in PAYOFF_KINDS:
        errors.append(f"payoff: expected one of {', '.join(PAYOFF_KINDS)}, got {payoff!r}")

    if command == 'survival':
        side = data.get('side')
        if side is not None and str(side) not in SIDES:
            errors.append(f"side: expected 'up' or 'down', got {side!r}")
        _positive(data, 'threshold', errors)
        lower = _positive(data, 'lower', errors)
        upper = _positive(data, 'upper', errors)
        if (data.get('lower') is None) != (data.get('upper') is None):
            errors.append("lower/upper: a corridor needs both levels")
        elif lower is not None and upper is not None and not lower < upper:
            errors.append(f"lower: must be < upper, got {lower:g} >= {upper:g}")
        times = _float_list(data, 'times', errors)
        if any(not t > 0 for t in times):
            errors.append("times: every time must be > 0")

    if data.get('precision') is not None:
        precision = sanitize_int(data['precision'])
        if precision is None or not 1 <= precision <= 17:
            errors.append(f"precision: expected an integer in [1, 17], got {data['precision']!r}")

    if data.get('seed') is not None:
        seed = sanitize_int(data['seed'])
        if seed is None or not 0 <= seed < 2 ** 64:
            errors.append(f"seed: expected an integer in [0, 2^64), got {data['seed']!r}")

    if data.get('n_paths') is not None:
        n_paths = sanitize_int(data['n_paths'])
        if n_paths is None or n_paths < 1:
            errors.append(f"n_paths: expected an integer >= 1, got {data['n_paths']!r}")

    is_valid = len(errors) == 0
    return is_valid, errors if errors else None
