"""Module providing deterministic writers of data files.

CSV files carry a header row, JSON files are written with sorted keys and
JSON-lines files hold one record per line. Floats are written in their
shortest round-trip representation, so identical results give identical
bytes.
"""

import csv
import json
import math
import os

import numpy as np


def plain(obj):
    """Convert numpy values and non-finite floats into JSON compatible values."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, np.generic):
        return plain(obj.item())
    if isinstance(obj, complex):
        return [plain(obj.real), plain(obj.imag)]
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def _cell(value):
    value = plain(value)
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, float):
        return repr(value)
    return value


def write_csv(path, header, rows):
    """Write rows with a header line to a CSV file.

    :param path: output file
    :type path: str
    :param header: column names
    :type header: list
    :param rows: rows of values
    :type rows: list
    """
    with open(path, 'w', newline='', encoding='utf8') as file:
        writer = csv.writer(file, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def dumps(record):
    """Return the canonical JSON text of a record."""
    return json.dumps(plain(record), sort_keys=True, separators=(',', ':'))


def write_json(path, record):
    """Write a record to a JSON file."""
    with open(path, 'w', encoding='utf8') as file:
        json.dump(plain(record), file, sort_keys=True, indent=2)
        file.write('\n')


def write_jsonl(path, records):
    """Write records to a JSON-lines file."""
    with open(path, 'w', encoding='utf8') as file:
        for record in records:
            file.write(dumps(record) + '\n')


def ensure_dir(path):
    """Create an output directory if it does not exist yet."""
    try:
        os.makedirs(path, exist_ok=True)
    except Exception as e:
        raise Exception(f"An exception occurred while creating the output directory '{path}': {e}")
    if not os.access(path, os.W_OK):
        raise Exception(f"The output directory '{path}' is not writeable.")
