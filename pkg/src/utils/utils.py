import csv
import json
import logging
import math
import os
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Iterator, Optional, Sequence

import numpy as np

from src.fuzzy.fuzzy_number import AlphaGrid, FuzzyNumber, load_fuzzy_number, trapezoidal, triangular
from src.wave.views import WaveProblem
from src.wave.wave_solver import kernel, level_functions, z_series

logger = logging.getLogger(__name__)

Z_HEADER = ("x", "t", "z")
LEVEL_HEADER = ("x", "t", "alpha", "u1", "u2")


def format_number(value: float) -> str:
    """Shortest decimal that round-trips to the same double; -0.0 is written as 0.0"""
    return repr(float(value) + 0.0)


def eval_points(upper: float, step: float) -> np.ndarray:
    """Points k * step for k = 0..floor(upper / step), never beyond upper"""
    if upper < 0:
        raise ValueError(f"grid upper bound must be non-negative, got {upper}")
    if not step > 0:
        raise ValueError(f"grid step must be positive, got {step}")
    count = int(math.floor(upper / step + 1e-9)) + 1
    return np.arange(count) * step


@contextmanager
def open_output(path: Optional[str | Path]) -> Iterator[IO[str]]:
    """Text stream for an output path, or stdout when the path is None or '-'"""
    if path is None or str(path) == "-":
        yield sys.stdout
        return
    path = Path(path)
    if path.parent and not path.parent.exists():
        os.makedirs(path.parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        yield f
    logger.info(f"💾 Wrote {path}")


def z_grid_rows(xs: np.ndarray, ts: np.ndarray, m: int, problem: Optional[WaveProblem] = None) -> list[tuple[float, float, float]]:
    rows = []
    for x in xs:
        for t in ts:
            x, t = float(x), float(t)
            z = z_series(x, t, m) if problem is None else kernel(x, t, problem)
            rows.append((x, t, z))
    return rows


def level_grid_rows(xs: np.ndarray, ts: np.ndarray, problem: WaveProblem) -> list[tuple[float, float, float, float, float]]:
    rows = []
    for x in xs:
        for t in ts:
            for a in problem.U0.grid.levels:
                u1, u2 = level_functions(float(x), float(t), a, problem)
                rows.append((float(x), float(t), float(a), u1, u2))
    return rows


def _write_rows(stream: IO[str], header: Sequence[str], rows) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v) for v in row])


def write_z_grid_csv(stream: IO[str], xs: np.ndarray, ts: np.ndarray, m: int, problem: Optional[WaveProblem] = None) -> None:
    """x,t,z rows with x as the outer loop"""
    _write_rows(stream, Z_HEADER, z_grid_rows(xs, ts, m, problem))


def write_level_grid_csv(stream: IO[str], xs: np.ndarray, ts: np.ndarray, problem: WaveProblem) -> None:
    """x,t,alpha,u1,u2 rows of the raw levelwise solutions"""
    _write_rows(stream, LEVEL_HEADER, level_grid_rows(xs, ts, problem))


def write_rows_json(stream: IO[str], header: Sequence[str], rows) -> None:
    records = [dict(zip(header, (float(v) + 0.0 for v in row))) for row in rows]
    json.dump(records, stream, indent=2)
    stream.write("\n")


def dump_json(data, stream: IO[str]) -> None:
    json.dump(data, stream, indent=2, sort_keys=False, default=_json_default)
    stream.write("\n")


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, FuzzyNumber):
        return value.to_dict()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def parse_coeff(text: str, levels: int) -> FuzzyNumber:
    """A fuzzy coefficient from 'a,b,c' (triangular), 'a,b,c,d' (trapezoidal) or a JSON file path"""
    if os.path.isfile(text):
        return load_fuzzy_number(text)
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise ValueError(f"coefficient must be 'a,b,c', 'a,b,c,d' or a JSON file path, got {text!r}")
    grid = AlphaGrid.uniform(levels)
    if len(values) == 3:
        return triangular(*values, grid=grid)
    if len(values) == 4:
        return trapezoidal(*values, grid=grid)
    raise ValueError(f"coefficient needs 3 or 4 comma-separated values, got {len(values)}")
