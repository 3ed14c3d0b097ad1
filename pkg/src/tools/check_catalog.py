"""Check catalogue - the Monte Carlo versus closed-form verification suite"""
from typing import Any, Dict, List


# Every check compares a closed form (or a known law) with an independent
# Monte Carlo estimate. Levels are given relative to a unit threshold/strike.
VERIFICATION_CHECKS = {
    "martingale": {
        "description": "E[S(t) e^{-rt}] / S0 = 1",
        "times": (1.0, 5.0),
        "n_stderr": 4.0,
    },
    "binary_call": {
        "description": "D+ = ((rho-1)/rho) S0/K0 against the discounted up-crossing",
        "spot": 0.5,
        "n_stderr": 3.0,
    },
    "binary_put": {
        "description": "D- = ((rho-1)/gamma) (K0/S0)^(gamma-rho+1) against the discounted down-crossing",
        "spot": 2.0,
        "n_stderr": 3.0,
    },
    "vanilla_put": {
        "description": "V- at the optimal boundary against the discounted exercise payoff",
        "spot": 1.0,
        "n_stderr": 3.0,
    },
    "survival": {
        "description": "Inverted survival transform against survival frequencies",
        "spot": 0.5,
        "times": (1.0, 10.0, 100.0),
        "n_stderr": 3.0,
        "inversion_tolerance": 1e-6,
    },
    "overshoot_up": {
        "description": "Up-crossing overshoot is Exp(rho)",
        "spot": 0.5,
        "min_p_value": 0.01,
    },
    "overshoot_down": {
        "description": "Down-crossing overshoot is Exp(gamma)",
        "spot": 2.0,
        "min_p_value": 0.01,
    },
}


def get_check_names() -> List[str]:
    """
    Get the names of all verification checks, in suite order

    Returns:
        List of check names
    """
    return list(VERIFICATION_CHECKS.keys())


def get_check(name: str) -> Dict[str, Any]:
    """
    Get the parameters of one check

    Args:
        name: Check name

    Returns:
        Parameter dict (a copy)

    Raises:
        KeyError: If the check is unknown
    """
    if name not in VERIFICATION_CHECKS:
        raise KeyError(f"unknown verification check: {name!r}")
    return dict(VERIFICATION_CHECKS[name])
