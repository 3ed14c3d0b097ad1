"""Utility functions for the CTRW pricer"""
from .parsers import parse_config_text, load_config_file, parse_float_list
from .validators import validate_run_config

__all__ = [
    'parse_config_text',
    'load_config_file',
    'parse_float_list',
    'validate_run_config'
]
