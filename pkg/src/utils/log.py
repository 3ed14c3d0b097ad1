"""Logging setup: standard logging routed through rich"""
import logging
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler

_configured = False


def configure_logging(level: Optional[str] = None, verbose: bool = False):
    """
    Install a single RichHandler on the root logger.

    Args:
        level: Level name; defaults to the CTRW_LOG_LEVEL setting
        verbose: Force DEBUG regardless of level
    """
    global _configured
    from utils.config import get_settings

    name = "DEBUG" if verbose else (level or get_settings().log_level)
    root = logging.getLogger()
    root.setLevel(getattr(logging, name.upper(), logging.WARNING))
    if _configured:
        return
    handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=False, markup=False)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    root.addHandler(handler)
    _configured = True
