"""Parser utilities for run configuration files and list-valued flags"""
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np


def parse_config_text(text: str) -> Dict[str, str]:
    """
    Parse flat key=value text.

    Blank lines and '#' comments are ignored; keys are lower-cased with
    dashes turned into underscores so they match flag names.

    Args:
        text: File contents

    Returns:
        Dict of raw string values

    Raises:
        ValueError: On a line without '=' (the message names the line number)
    """
    result = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ValueError(f"line {number}: expected key=value, got {raw.strip()!r}")
        key, value = line.split('=', 1)
        key = key.strip().lower().replace('-', '_')
        result[key] = value.strip()
    return result


def load_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """Read and parse a key=value configuration file"""
    return parse_config_text(Path(path).read_text())


def parse_float_list(value: Optional[str]) -> List[float]:
    """
    Parse '1,10,100' or a 'start:stop:step' range (stop included).

    Args:
        value: Comma list or range spec

    Returns:
        List of floats (empty for None or blank input)
    """
    if value is None or not str(value).strip():
        return []
    text = str(value).strip()
    if ':' in text:
        parts = [float(p) for p in text.split(':')]
        if len(parts) != 3 or parts[2] <= 0:
            raise ValueError(f"range must be start:stop:step with step > 0, got {text!r}")
        start, stop, step = parts
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(max(count, 0))]
    return [float(p) for p in text.split(',') if p.strip()]
