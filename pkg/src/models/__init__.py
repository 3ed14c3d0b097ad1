"""Domain types for the CTRW market and its options"""
from .market import JumpLaw, WaitingLaw, WaitingKind, MarketModel, TransformPoint
from .options import PayoffKind, OptionSpec, Regime, PriceResult
from .run_config import RunConfig

__all__ = [
    'JumpLaw',
    'WaitingLaw',
    'WaitingKind',
    'MarketModel',
    'TransformPoint',
    'PayoffKind',
    'OptionSpec',
    'Regime',
    'PriceResult',
    'RunConfig'
]
