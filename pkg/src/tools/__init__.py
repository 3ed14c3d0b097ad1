"""Helpers around the engines: verification catalogue and CSV export"""
from .check_catalog import VERIFICATION_CHECKS, get_check, get_check_names
from .csv_export import (CONVERGENCE_COLUMNS, PRICE_COLUMNS, SURVIVAL_COLUMNS,
                         read_csv, to_csv_text, write_csv)

__all__ = [
    'VERIFICATION_CHECKS',
    'get_check',
    'get_check_names',
    'CONVERGENCE_COLUMNS',
    'PRICE_COLUMNS',
    'SURVIVAL_COLUMNS',
    'read_csv',
    'to_csv_text',
    'write_csv'
]
