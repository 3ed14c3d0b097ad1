"""CSV export for survival curves, convergence tables and price rows"""
import sys
from pathlib import Path
from typing import List, Optional, Union

import pandas as pd

SURVIVAL_COLUMNS = ["t", "phi", "mc", "mc_stderr"]
CONVERGENCE_COLUMNS = ["rho", "moneyness", "v_ctrw", "v_bs"]
PRICE_COLUMNS = ["payoff", "strike", "spot", "price", "boundary", "regime"]


def float_format(precision: int) -> str:
    """printf-style format with `precision` significant digits"""
    return f"%.{int(precision)}g"


def to_csv_text(frame: pd.DataFrame, columns: List[str], precision: int = 12) -> str:
    """
    Render a table as CSV with a fixed header.

    Args:
        frame: Table holding at least `columns`
        columns: Header, in order
        precision: Significant digits per float

    Returns:
        CSV text; reading it back gives the values rounded to `precision` digits
    """
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise KeyError(f"table lacks columns {missing}")
    return frame[columns].to_csv(index=False, float_format=float_format(precision), lineterminator="\n")


def write_csv(frame: pd.DataFrame, columns: List[str], out: Optional[Union[str, Path]] = None,
              precision: int = 12) -> str:
    """
    Write a table to a file, or to stdout when `out` is None or '-'.

    Returns:
        The CSV text written
    """
    text = to_csv_text(frame, columns, precision)
    if out is None or str(out) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    return text


def read_csv(source: Union[str, Path]) -> pd.DataFrame:
    """Read a CSV written by write_csv"""
    return pd.read_csv(source, float_precision="round_trip")
