import logging
import math
from typing import Callable

import numpy as np

from src.calculus.gs_derivative import gs_partial, gs_second_partial
from src.fuzzy.fuzzy_number import scalar_mul
from src.wave.views import WaveProblem
from src.wave.wave_solver import solution_envelope

from .views import EquationCheck, GridSpec, ResidualReport

logger = logging.getLogger(__name__)

LevelSurface = Callable[[float, float, float], float]

ROUNDOFF_FLOOR = 1e-9


def _interior(lo: float, hi: float, step: float) -> np.ndarray:
    if hi - lo <= 0:
        return np.array([lo])
    n = int(math.ceil((hi - lo) / step - 1e-9)) + 1
    pts = np.linspace(lo, hi, max(n, 2))[1:-1]
    return pts if pts.size else np.array([0.5 * (lo + hi)])


def _second_differences(u: LevelSurface, x: float, t: float, a: float, h: float, center: float) -> tuple[float, float]:
    u_tt = (u(x, t + h, a) - 2.0 * center + u(x, t - h, a)) / (h * h)
    u_xx = (u(x + h, t, a) - 2.0 * center + u(x - h, t, a)) / (h * h)
    return u_tt, u_xx


def pde_residual(levels: LevelSurface, c: float, grid: GridSpec) -> ResidualReport:
    """Max |u_tt - c^2 u_xx| by central second differences over the interior grid.

    The observed order comes from Richardson differences of the two second-difference
    operators at order_step, order_step/2 and order_step/4. For separable modes with
    c = 1 the truncation errors of u_tt and u_xx cancel in the residual itself, so
    the residual alone cannot exhibit the order.
    """
    xs = _interior(grid.x_min, grid.x_max, grid.step)
    ts = _interior(grid.t_min, grid.t_max, grid.step)
    c2 = c * c
    H = grid.order_step
    steps = (H, H / 2, H / 4)

    worst, worst_point = -1.0, None
    diff_coarse = diff_fine = 0.0
    scale = 1.0
    skipped = points = 0
    for x in xs:
        for t in ts:
            for a in grid.alphas:
                try:
                    center = levels(x, t, a)
                    u_tt, u_xx = _second_differences(levels, x, t, a, grid.h, center)
                    ladder = [_second_differences(levels, x, t, a, s, center) for s in steps]
                except (ValueError, ArithmeticError) as e:
                    logger.debug(f"Skipping ({x}, {t}, {a}): {e}")
                    skipped += 1
                    continue
                points += 1
                r = abs(u_tt - c2 * u_xx)
                # strict comparison keeps the lexicographically first worst point
                if r > worst:
                    worst, worst_point = r, (float(x), float(t), float(a))
                scale = max(scale, abs(center))
                diff_coarse = max(diff_coarse, *(abs(p - q) for p, q in zip(ladder[0], ladder[1])))
                diff_fine = max(diff_fine, *(abs(p - q) for p, q in zip(ladder[1], ladder[2])))

    order = None
    if diff_fine > ROUNDOFF_FLOOR * scale and diff_coarse > 0:
        order = math.log2(diff_coarse / diff_fine)
    report = ResidualReport(
        max_abs_residual=max(worst, 0.0),
        x_step=float(xs[1] - xs[0]) if xs.size > 1 else 0.0,
        t_step=float(ts[1] - ts[0]) if ts.size > 1 else 0.0,
        alphas=tuple(grid.alphas),
        h=grid.h,
        worst_point=worst_point,
        order_estimate=order,
        order_steps=steps,
        points=points,
        skipped=skipped,
    )
    logger.debug(f"PDE residual {report.max_abs_residual:.3e} over {points} points, order {order}")
    return report


def fuzzy_equation_check(P: WaveProblem, x: float, t: float, rel_tol: float = 1e-9) -> EquationCheck:
    """Compare gS levels of u_tt with those of c^2 ⊙ u_xx for the solution at (x, t)"""
    env = solution_envelope(P)
    tt = gs_second_partial(env, "tt", (x, t))
    xx = gs_second_partial(env, "xx", (x, t))
    px = gs_partial(env, "x", (x, t))
    pt = gs_partial(env, "t", (x, t))
    passed = tt.exists and xx.exists
    gap = math.inf
    if passed:
        rhs = scalar_mul(P.c * P.c, xx.as_fuzzy_number())
        gap = float(max(np.max(np.abs(tt.lower - rhs.lower)), np.max(np.abs(tt.upper - rhs.upper))))
        size = max(1.0, float(np.max(np.abs(tt.lower))), float(np.max(np.abs(tt.upper))))
        passed = gap <= rel_tol * size
    return EquationCheck(
        x=x,
        t=t,
        tt_classification=tt.classification.value,
        xx_classification=xx.classification.value,
        x_classification=px.classification.value,
        t_classification=pt.classification.value,
        max_gap=gap,
        passed=passed,
    )
