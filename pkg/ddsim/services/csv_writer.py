"""
CSV Writer Service
Deterministic, locale-independent CSV output for experiment tables.
"""
import csv
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np

from ddsim.constants import CSV_FLOAT_FORMAT


def format_value(value: Any) -> str:
    """Integers as plain decimal, floats in 17-digit scientific notation."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), CSV_FLOAT_FORMAT)
    if value is None:
        return ""
    return str(value)


def write_csv(path: Path, columns: Sequence[str], rows: List[Dict[str, Any]]) -> Path:
    """
    Write rows (dicts keyed by column) with a header line.

    Missing keys raise KeyError so a schema slip cannot go unnoticed.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row[column]) for column in columns])
    return path


def read_csv(path: Path) -> List[Dict[str, str]]:
    """Read a CSV written by write_csv back as strings."""
    with open(path, 'r', encoding='utf-8', newline='') as f:
        return list(csv.DictReader(f))
