import logging
import math
from typing import Optional, Union

import numpy as np

from src.calculus.gs_derivative import TwoVariableEnvelope
from src.fuzzy.fuzzy_number import (
    AlphaGrid,
    FuzzyNumber,
    Interval,
    alpha_cut,
    alpha_derivative,
    from_level_functions,
    is_crisp,
    scalar_mul,
)

from .views import CrispLevelProblem, GeneralLevelProblem, SSolutionReport, Violation, WaveProblem

logger = logging.getLogger(__name__)

FOUR_OVER_PI = 4.0 / math.pi


def _check_m(m: int) -> int:
    if int(m) != m or m < 0:
        raise ValueError(f"series index m must be a non-negative integer, got {m}")
    return int(m)


def z_series(x: float, t: float, m: int) -> float:
    """Truncated kernel (4/pi) * sum_{n=0..m} sin((2n+1)x) cos((2n+1)t) / (2n+1)"""
    m = _check_m(m)
    terms = []
    for n in range(m + 1):
        k = 2 * n + 1
        terms.append(math.sin(k * x) * math.cos(k * t) / k)
    return FOUR_OVER_PI * math.fsum(terms)


def z_series_dx(x: float, t: float, m: int) -> float:
    m = _check_m(m)
    return FOUR_OVER_PI * math.fsum(math.cos(k * x) * math.cos(k * t) for k in range(1, 2 * m + 2, 2))


def z_series_dt(x: float, t: float, m: int) -> float:
    m = _check_m(m)
    return -FOUR_OVER_PI * math.fsum(math.sin(k * x) * math.sin(k * t) for k in range(1, 2 * m + 2, 2))


def z_series_dxx(x: float, t: float, m: int) -> float:
    m = _check_m(m)
    return -FOUR_OVER_PI * math.fsum(k * math.sin(k * x) * math.cos(k * t) for k in range(1, 2 * m + 2, 2))


# every mode sin(kx)cos(kt) has equal second partials in x and t
z_series_dtt = z_series_dxx


def z_grid(xs: np.ndarray, ts: np.ndarray, m: int) -> np.ndarray:
    """Kernel on the tensor grid xs x ts (rows follow xs), Kahan-compensated over modes"""
    m = _check_m(m)
    xs = np.asarray(xs, dtype=float)
    ts = np.asarray(ts, dtype=float)
    total = np.zeros((xs.size, ts.size))
    comp = np.zeros_like(total)
    for n in range(m + 1):
        k = 2 * n + 1
        term = np.multiply.outer(np.sin(k * xs) / k, np.cos(k * ts))
        y = term - comp
        s = total + y
        comp = (s - total) - y
        total = s
    return FOUR_OVER_PI * total


def grid_points(upper: float, step: float) -> np.ndarray:
    """Uniform points covering [0, upper] with spacing at most step, both ends included"""
    if upper < 0:
        raise ValueError(f"grid upper bound must be non-negative, got {upper}")
    if not step > 0:
        raise ValueError(f"grid step must be positive, got {step}")
    n = int(math.ceil(upper / step - 1e-9)) + 1
    return np.linspace(0.0, upper, max(n, 1))


def kernel_coordinates(x: float, t: float, P: WaveProblem) -> tuple[float, float]:
    if P.is_canonical:
        return x, t
    w = math.pi / P.length
    return w * x, w * P.c * t


def kernel(x: float, t: float, P: WaveProblem) -> float:
    X, T = kernel_coordinates(x, t, P)
    return z_series(X, T, P.m)


def level_functions(x: float, t: float, alpha: float, P: WaveProblem) -> tuple[float, float]:
    """The crisp levelwise solutions (u1, u2) = (U01(alpha) z, U02(alpha) z), unordered"""
    cut = alpha_cut(P.U0, alpha)
    z = kernel(x, t, P)
    return cut.lo * z, cut.hi * z


def level_solution(x: float, t: float, alpha: float, P: WaveProblem) -> Interval:
    u1, u2 = level_functions(x, t, alpha, P)
    return Interval(min(u1, u2), max(u1, u2))


def fuzzy_solution(x: float, t: float, P: WaveProblem) -> FuzzyNumber:
    z = kernel(x, t, P)
    if z < 0:
        logger.warning(
            f"⚠️ Kernel z={z:.3e} < 0 at (x={x}, t={t}); levels swapped and the levelwise pair is not an S-solution here"
        )
    return scalar_mul(z, P.U0)


def solution_envelope(P: WaveProblem) -> TwoVariableEnvelope:
    """The solution U0 ⊙ z(x, t) with analytic partials of the kernel"""
    if P.is_canonical:
        wx, wt = 1.0, 1.0
    else:
        wx = math.pi / P.length
        wt = wx * P.c

    def scaled(fn, sx, st):
        return lambda x, t: sx * st * fn(wx * x, wt * t, P.m)

    return TwoVariableEnvelope(
        coeff=P.U0,
        factor=lambda x, t: kernel(x, t, P),
        partials={
            "x": scaled(z_series_dx, wx, 1.0),
            "t": scaled(z_series_dt, 1.0, wt),
            "xx": scaled(z_series_dxx, wx * wx, 1.0),
            "tt": scaled(z_series_dtt, 1.0, wt * wt),
        },
    )


def kernel_grid(xs: np.ndarray, ts: np.ndarray, P: WaveProblem) -> np.ndarray:
    if P.is_canonical:
        return z_grid(xs, ts, P.m)
    w = math.pi / P.length
    return z_grid(w * np.asarray(xs), w * P.c * np.asarray(ts), P.m)


def resample_levels(U0: FuzzyNumber, grid: Optional[AlphaGrid]) -> FuzzyNumber:
    if grid is None or grid == U0.grid:
        return U0
    return from_level_functions(lambda a: alpha_cut(U0, a).lo, lambda a: alpha_cut(U0, a).hi, grid)


def s_solution_check(
    P: WaveProblem,
    domain: tuple[float, float],
    alpha_grid: Optional[AlphaGrid] = None,
    step: float = 0.01,
    epsilon: float = 0.0,
) -> SSolutionReport:
    """Check du1/dalpha >= -eps and du2/dalpha <= eps on [0, X] x [0, T] x alpha grid.

    Alpha-derivatives of U0 are finite differences on the grid. Since
    du_i/dalpha = U0i'(alpha) z, the worst alpha at each point is found from the
    extreme values of U0i' and the sign of z.
    """
    x_max, t_max = domain
    U0 = resample_levels(P.U0, alpha_grid)
    xs = grid_points(x_max, step)
    ts = grid_points(t_max, step)
    points = xs.size * ts.size * len(U0.grid)
    base = dict(m=P.m, x_max=x_max, t_max=t_max, step=step, epsilon=epsilon, points=points)

    if is_crisp(U0):
        return SSolutionReport(
            **base,
            passed=True,
            vacuous=True,
            notes=["U0 has zero alpha-spread; the condition holds vacuously"],
        )

    Z = kernel_grid(xs, ts, P)
    d1, d2 = alpha_derivative(U0)
    neg = Z < 0
    worst1 = np.where(neg, Z * d1.max(), Z * d1.min())
    worst2 = np.where(neg, Z * d2.min(), Z * d2.max())
    bad1 = worst1 < -epsilon
    bad = bad1 | (worst2 > epsilon)
    if not bad.any():
        logger.debug(f"S-solution condition holds on [0,{x_max}]x[0,{t_max}] for m={P.m}")
        return SSolutionReport(**base, passed=True)

    i, j = (int(v) for v in np.argwhere(bad)[0])
    z = float(Z[i, j])
    if bad1[i, j]:
        k = int(np.argmax(d1) if z < 0 else np.argmin(d1))
    else:
        k = int(np.argmin(d2) if z < 0 else np.argmax(d2))
    violation = Violation(
        x=float(xs[i]),
        t=float(ts[j]),
        z=z,
        alpha=float(U0.grid.levels[k]),
        du1_dalpha=float(d1[k] * z),
        du2_dalpha=float(d2[k] * z),
    )
    logger.info(f"❌ S-solution condition fails for m={P.m} at x={violation.x:.6g}, t={violation.t:.6g} (z={z:.3e})")
    return SSolutionReport(**base, passed=False, first_violation=violation)


def _validate_general(problem: GeneralLevelProblem) -> None:
    grid = problem.grid
    from_level_functions(problem.c11, problem.c12, grid)
    from_level_functions(problem.c21, problem.c22, grid)
    xs = np.linspace(0.0, problem.length, problem.sample_points + 2)[1:-1]
    for x in xs:
        from_level_functions(lambda a: problem.f1(x, a), lambda a: problem.f2(x, a), grid)
        from_level_functions(lambda a: problem.g1(x, a), lambda a: problem.g2(x, a), grid)


def levelwise_decompose(problem: Union[WaveProblem, GeneralLevelProblem]) -> tuple[CrispLevelProblem, CrispLevelProblem]:
    """Split a fuzzy wave problem into the crisp problems for the lower and upper level functions.

    Raises FuzzyNumberError when boundary or initial level data are not fuzzy numbers.
    """
    if isinstance(problem, WaveProblem):
        problem = problem.as_general()
    _validate_general(problem)
    lower = CrispLevelProblem(
        level="lower",
        c=problem.c,
        length=problem.length,
        left_boundary=lambda t, a: problem.c11(a),
        right_boundary=lambda t, a: problem.c21(a),
        displacement=problem.f1,
        velocity=problem.g1,
    )
    upper = CrispLevelProblem(
        level="upper",
        c=problem.c,
        length=problem.length,
        left_boundary=lambda t, a: problem.c12(a),
        right_boundary=lambda t, a: problem.c22(a),
        displacement=problem.f2,
        velocity=problem.g2,
    )
    return lower, upper
