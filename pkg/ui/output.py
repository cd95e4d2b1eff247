"""
Output writers -- JSON reports, CSV tables and plain-text corpora.

Everything written here is byte-stable: JSON keys are sorted, floats are
formatted by pandas with a fixed format and no timestamps are added.
"""
from __future__ import annotations

import json
import math
import os
from datetime import date
from typing import Any, Iterable

import numpy as np
import pandas as pd

from cogmarket.errors import InputError
from cogmarket.ingest import CSV_OPTIONS


def _plain(value: Any) -> Any:
    """JSON-ready copy: numpy scalars unwrapped, NaN/inf become null."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, date):
        return value.isoformat()
    return value


def _atomic_write(text: str, filepath: str) -> None:
    dir_path = os.path.dirname(filepath) or "."
    tmp = os.path.join(dir_path, f".tmp_{os.path.basename(filepath)}")

    try:
        os.makedirs(dir_path, exist_ok=True)
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, filepath)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise InputError(f"{filepath}: cannot write output: {exc}") from exc


def save_json(result: Any, filepath: str) -> None:
    """Write *result* to *filepath* atomically (write-tmp then rename)."""
    _atomic_write(json.dumps(_plain(result), indent=2, sort_keys=True, ensure_ascii=False) + "\n", filepath)


def write_csv(frame: pd.DataFrame, filepath: str) -> None:
    _atomic_write(frame.to_csv(**CSV_OPTIONS), filepath)


def write_lines(lines: Iterable[str], filepath: str) -> None:
    """One item per line, newline-terminated."""
    _atomic_write("".join(f"{line}\n" for line in lines), filepath)
