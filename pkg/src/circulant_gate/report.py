"""Deterministic CSV emission for figures, scenarios, and sweeps.

Numbers are written with 17 significant digits so a re-read reproduces the
binary values exactly; '#'-prefixed header lines echo the configuration
that produced the file, making every CSV a self-contained regression
artifact.
"""

from __future__ import annotations

import os

import numpy as np


def format_number(value):
    return f"{float(value):.17g}"


def write_csv(path, columns, header_lines=()):
    """Write named columns of equal length as comma-separated values.

    ``columns`` is a mapping name -> 1-D array; column order follows the
    mapping order.  Header comment lines are prefixed with '# '.
    """
    names = list(columns)
    if not names:
        raise ValueError("no columns to write")
    arrays = [np.asarray(columns[name], dtype=float) for name in names]
    length = len(arrays[0])
    for name, arr in zip(names, arrays):
        if arr.ndim != 1 or len(arr) != length:
            raise ValueError(f"column {name!r} has mismatched shape {arr.shape}")

    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(names) + "\n")
        for row in range(length):
            fh.write(",".join(format_number(arr[row]) for arr in arrays) + "\n")
    return path


def read_csv(path):
    """Read back a CSV written by write_csv: (columns, header_lines)."""
    header = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    body_start = 0
    for body_start, line in enumerate(lines):
        if line.startswith("#"):
            header.append(line[1:].strip())
        else:
            break
    names = lines[body_start].split(",")
    data = [[] for _ in names]
    for line in lines[body_start + 1:]:
        if not line:
            continue
        for slot, token in zip(data, line.split(",")):
            slot.append(float(token))
    return {name: np.array(values) for name, values in zip(names, data)}, header
