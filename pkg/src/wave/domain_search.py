import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Optional

import numpy as np

from .views import PUBLISHED_SQUARE_SIDES, ValidityDomain, Violation
from .wave_solver import grid_points, z_grid

logger = logging.getLogger(__name__)

DEFAULT_REFINE_TOL = 1e-4
DEFAULT_SCAN_STEP = 1e-3
ROW_CHUNK = 64


def max_workers() -> int:
    value = os.getenv("FUZZY_WAVE_THREADS", "")
    if value.strip():
        try:
            return max(1, int(value))
        except ValueError:
            logger.warning(f"Ignoring non-integer FUZZY_WAVE_THREADS={value!r}")
    return max(1, os.cpu_count() or 1)


def edge_kernel(t: float, m: int) -> float:
    """sum_{n=0..m} cos((2n+1)t): the x -> 0 slope of the kernel, up to the factor 4/pi"""
    return math.fsum(math.cos(k * t) for k in range(1, 2 * m + 2, 2))


def edge_kernel_closed_form(t: float, m: int) -> float:
    return math.sin(2 * (m + 1) * t) / (2.0 * math.sin(t))


def edge_oracle(m: int) -> float:
    """First zero of the x -> 0 slope in t: pi / (2(m+1))"""
    return math.pi / (2 * (m + 1))


@lru_cache(maxsize=None)
def verify_edge_identity(m: int, samples: int = 10_000, seed: int = 0) -> float:
    """Largest gap between the cosine sum and its closed form at random t, brute force"""
    rng = np.random.default_rng(seed)
    ts = rng.uniform(0.01, math.pi - 0.01, size=samples)
    return max(abs(edge_kernel(t, m) - edge_kernel_closed_form(t, m)) for t in ts)


def _first_violation(xs: np.ndarray, ts: np.ndarray, m: int, epsilon: float) -> Optional[tuple[int, int, float]]:
    """First row-major grid point with z < -epsilon, scanning row chunks in parallel waves"""
    starts = list(range(0, xs.size, ROW_CHUNK))
    workers = max_workers()

    def scan(start):
        Z = z_grid(xs[start:start + ROW_CHUNK], ts, m)
        bad = np.argwhere(Z < -epsilon)
        if bad.size == 0:
            return None
        i, j = (int(v) for v in bad[0])
        return start + i, j, float(Z[i, j])

    with ThreadPoolExecutor(max_workers=workers) as executor:
        for w in range(0, len(starts), workers):
            # results are examined in chunk order, so the answer does not depend on timing
            for hit in executor.map(scan, starts[w:w + workers]):
                if hit is not None:
                    return hit
    return None


def first_negative(m: int, side: float, epsilon: float = 0.0, step: Optional[float] = None) -> Optional[Violation]:
    """First point of [0, side]^2 (row-major, x outer) where z < -epsilon"""
    if step is None:
        step = min(DEFAULT_SCAN_STEP, side / 2000) if side > 0 else DEFAULT_SCAN_STEP
    xs = grid_points(side, step)
    hit = _first_violation(xs, xs, m, epsilon)
    if hit is None:
        return None
    i, j, z = hit
    return Violation(x=float(xs[i]), t=float(xs[j]), z=z)


def _square_feasible(s: float, m: int, epsilon: float, resolution: Optional[float]) -> tuple[bool, float]:
    step = resolution or min(DEFAULT_SCAN_STEP, s / 2000)
    xs = grid_points(s, step)
    return _first_violation(xs, xs, m, epsilon) is None, step


def validity_square(
    m: int,
    epsilon: float = 0.0,
    refine_tol: float = DEFAULT_REFINE_TOL,
    resolution: Optional[float] = None,
) -> ValidityDomain:
    """Largest s with z(x, t, m) >= -epsilon on [0, s]^2.

    Outer bisection on s down to refine_tol; each candidate square is scanned on a
    grid of step `resolution` (default min(1e-3, s/2000)). The result is certified
    against the x -> 0 edge bound pi / (2(m+1)).
    """
    if int(m) != m or m < 0:
        raise ValueError(f"series index m must be a non-negative integer, got {m}")
    m = int(m)
    lo, hi = 0.0, math.pi
    step = resolution or DEFAULT_SCAN_STEP
    feasible, hi_step = _square_feasible(hi, m, epsilon, resolution)
    if feasible:
        lo, step = hi, hi_step
    while hi - lo > refine_tol:
        mid = 0.5 * (lo + hi)
        ok, mid_step = _square_feasible(mid, m, epsilon, resolution)
        logger.debug(f"m={m} square side {mid:.6f}: {'feasible' if ok else 'infeasible'}")
        if ok:
            lo, step = mid, mid_step
        else:
            hi = mid
    s = lo

    oracle = edge_oracle(m)
    notes = []
    identity_gap = verify_edge_identity(m)
    identity_ok = identity_gap < 1e-9
    if not identity_ok:
        notes.append(f"edge identity check failed (gap {identity_gap:.3e}); oracle not used")
    certified = identity_ok and abs(s - oracle) <= max(refine_tol, 2 * step)

    published_value = PUBLISHED_SQUARE_SIDES.get(m)
    published_check = None
    if published_value is not None:
        published_check = first_negative(m, published_value, epsilon)
        if published_check is not None:
            notes.append(
                f"published side {published_value} not reproduced: z={published_check.z:.3e} < 0 at "
                f"(x={published_check.x:.6g}, t={published_check.t:.6g}); edge bound is {oracle:.6f}"
            )
    logger.info(f"📐 m={m}: validity square side {s:.6f} (oracle {oracle:.6f}, certified={certified})")
    return ValidityDomain(
        m=m,
        kind="square",
        s=s,
        x_max=s,
        t_max=s,
        epsilon=epsilon,
        resolution=step,
        refine_tol=refine_tol,
        certified=certified,
        oracle=oracle,
        published_value=published_value,
        published_check=published_check,
        notes=notes,
    )


def _staircase(xs: np.ndarray, ts: np.ndarray, m: int, epsilon: float) -> np.ndarray:
    """limits[i]: number of leading t columns feasible for every row up to i"""
    limits = np.empty(xs.size, dtype=int)
    bound = ts.size
    starts = list(range(0, xs.size, ROW_CHUNK))
    workers = max_workers()

    def scan(start, cols):
        if cols == 0:
            return np.zeros(min(ROW_CHUNK, xs.size - start), dtype=int)
        Z = z_grid(xs[start:start + ROW_CHUNK], ts[:cols], m)
        bad = Z < -epsilon
        return np.where(bad.any(axis=1), bad.argmax(axis=1), cols)

    with ThreadPoolExecutor(max_workers=workers) as executor:
        for w in range(0, len(starts), workers):
            wave = starts[w:w + workers]
            # a wider column window than needed cannot change the prefix minimum
            for start, first_bad in zip(wave, executor.map(scan, wave, [bound] * len(wave))):
                rows = np.minimum.accumulate(np.minimum(first_bad, bound))
                limits[start:start + rows.size] = rows
                bound = int(rows[-1])
    return limits


def validity_rectangle(m: int, epsilon: float = 0.0, resolution: float = DEFAULT_SCAN_STEP) -> ValidityDomain:
    """Maximal-area rectangle [0, X] x [0, T] inside [0, pi]^2 with z >= -epsilon.

    Because every admissible T shrinks as X grows, a single staircase scan over
    rows gives T(X) for all X; the area maximizer is the first argmax.
    """
    if int(m) != m or m < 0:
        raise ValueError(f"series index m must be a non-negative integer, got {m}")
    m = int(m)
    xs = grid_points(math.pi, resolution)
    ts = xs
    limits = _staircase(xs, ts, m, epsilon)
    t_of_x = np.where(limits > 0, ts[np.maximum(limits - 1, 0)], -1.0)
    area = np.where(limits > 0, xs * t_of_x, -1.0)
    i = int(np.argmax(area))
    x_max, t_max = float(xs[i]), float(t_of_x[i])
    step = float(xs[1] - xs[0]) if xs.size > 1 else resolution

    oracle = edge_oracle(m)
    notes = []
    if m == 0:
        # exact rectangle of sin(x) cos(t) >= 0
        certified = abs(x_max - math.pi) <= step and abs(t_max - math.pi / 2) <= step
        if certified:
            x_max, t_max = math.pi, math.pi / 2
        else:
            notes.append(f"scan ({x_max}, {t_max}) disagrees with [0, pi] x [0, pi/2]")
    else:
        certified = abs(t_max - oracle) <= 2 * step
    logger.info(f"📐 m={m}: validity rectangle [0, {x_max:.6f}] x [0, {t_max:.6f}] (certified={certified})")
    return ValidityDomain(
        m=m,
        kind="rectangle",
        x_max=x_max,
        t_max=t_max,
        epsilon=epsilon,
        resolution=step,
        certified=certified,
        oracle=oracle,
        notes=notes,
    )
