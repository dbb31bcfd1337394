import logging
from typing import Optional, Sequence

import numpy as np

from src.fuzzy.fuzzy_number import MONOTONE_TOLERANCE, AlphaGrid, FuzzyNumber, alpha_cut, is_crisp, validate
from src.wave.views import WaveProblem
from src.wave.wave_solver import (
    grid_points,
    kernel,
    kernel_coordinates,
    kernel_grid,
    level_functions,
    levelwise_decompose,
    resample_levels,
    z_series,
    z_series_dt,
)

from .views import BoundaryReport, InitialConvergence, ScanFailure, ScanReport

logger = logging.getLogger(__name__)

BOUNDARY_TOLERANCE = 1e-12


def _initial_convergence(x: float, P: WaveProblem) -> InitialConvergence:
    X, _ = kernel_coordinates(x, 0.0, P)
    values = [z_series(X, 0.0, k) for k in range(P.m + 1)]
    errors = [abs(v - 1.0) for v in values]
    decreasing = all(b <= a for a, b in zip(errors, errors[1:]))
    return InitialConvergence(x=x, values=values, errors=errors, decreasing=decreasing)


def boundary_initial_check(
    P: WaveProblem,
    t_samples: int = 101,
    convergence_points: Optional[Sequence[float]] = None,
    gibbs_samples: int = 2001,
) -> BoundaryReport:
    """Boundary, initial-velocity and initial-value checks of the series solution.

    Boundary values are compared against the crisp levelwise problems with tolerance
    1e-12 (m+1) |U0i(alpha)|. The initial value only matches U0 in the limit m -> oo,
    so it is checked by error decay at interior points; the endpoint mismatch and the
    Gibbs overshoot are reported without failing.
    """
    lower, upper = levelwise_decompose(P)
    ts = np.linspace(0.0, P.length / P.c, t_samples)
    alphas = P.U0.grid.levels

    boundary_error = 0.0
    boundary_ok = True
    edges = (
        (0.0, lower.left_boundary, upper.left_boundary),
        (P.length, lower.right_boundary, upper.right_boundary),
    )
    for a in alphas:
        cut = alpha_cut(P.U0, a)
        tol_lo = BOUNDARY_TOLERANCE * (P.m + 1) * abs(cut.lo)
        tol_hi = BOUNDARY_TOLERANCE * (P.m + 1) * abs(cut.hi)
        for t in ts:
            for x, target_lo, target_hi in edges:
                u1, u2 = level_functions(x, t, a, P)
                e1, e2 = abs(u1 - target_lo(t, a)), abs(u2 - target_hi(t, a))
                boundary_error = max(boundary_error, e1, e2)
                if e1 > tol_lo or e2 > tol_hi:
                    boundary_ok = False

    # d/dt of every mode carries sin(k * 0) = 0
    xs = np.linspace(0.0, P.length, t_samples)
    velocity = max(abs(z_series_dt(*kernel_coordinates(x, 0.0, P), P.m)) for x in xs)
    velocity_ok = velocity == 0.0

    if convergence_points is None:
        convergence_points = (0.5 * P.length,)
    convergence = [_initial_convergence(x, P) for x in convergence_points]
    convergence_ok = all(c.decreasing for c in convergence)

    endpoint = kernel(0.0, 0.0, P)
    profile = kernel_grid(np.linspace(0.0, P.length, gibbs_samples), np.array([0.0]), P)
    overshoot = max(0.0, float(profile.max()) - 1.0)
    notes = [
        f"z(0, 0) = {endpoint:g} against the initial value 1: sine series vanish at the endpoints",
        f"Gibbs overshoot of the truncated initial profile: {overshoot:.6f}",
    ]
    if is_crisp(P.U0):
        notes.append("U0 is crisp; boundary tolerance reduces to the crisp value")

    report = BoundaryReport(
        m=P.m,
        boundary_max_error=boundary_error,
        boundary_ok=boundary_ok,
        velocity_max=velocity,
        velocity_ok=velocity_ok,
        convergence=convergence,
        convergence_ok=convergence_ok,
        endpoint_value=endpoint,
        gibbs_overshoot=overshoot,
        notes=notes,
    )
    logger.debug(f"Boundary/initial check for m={P.m}: passed={report.passed}")
    return report


def _row_failures(z_row: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Mask of t-points whose raw levelwise pair fails validate; same arithmetic as validate"""
    L = np.multiply.outer(z_row, lower)
    U = np.multiply.outer(z_row, upper)
    bad = (np.diff(L, axis=1) < -MONOTONE_TOLERANCE).any(axis=1)
    bad |= (np.diff(U, axis=1) > MONOTONE_TOLERANCE).any(axis=1)
    bad |= (L > U).any(axis=1)
    return bad


def _sign_failure(U0: FuzzyNumber, z: float) -> tuple[str, Optional[tuple[float, float]]]:
    """Exact monotonicity break of a non-crisp pair scaled by z < 0"""
    alphas = U0.grid.levels
    for condition, values, sign in (("i", U0.lower * z, 1.0), ("ii", U0.upper * z, -1.0)):
        k = np.flatnonzero(sign * np.diff(values) < 0)
        if k.size:
            return condition, (alphas[int(k[0])], alphas[int(k[0]) + 1])
    return "i", None


def fuzzy_validity_scan(
    P: WaveProblem,
    domain: tuple[float, float],
    resolution: float = 0.01,
    alpha_grid: Optional[AlphaGrid] = None,
    epsilon: float = 0.0,
) -> ScanReport:
    """Validate the raw levelwise pair (U01(alpha) z, U02(alpha) z) as a fuzzy number at every grid point.

    The pair is taken before any reordering, so a negative kernel shows up as
    broken monotonicity or ordering of the levels. For non-crisp U0 a point with
    z < -epsilon fails even when the broken steps sit inside the tie tolerance.
    Kernel values in [-epsilon, 0) are read as zero.
    """
    x_max, t_max = domain
    U0 = resample_levels(P.U0, alpha_grid)
    crisp = is_crisp(U0)
    xs = grid_points(x_max, resolution)
    ts = grid_points(t_max, resolution)
    Z = kernel_grid(xs, ts, P)

    failures = 0
    first = None
    for i, x in enumerate(xs):
        z_row = np.where((Z[i] < 0) & (Z[i] >= -epsilon), 0.0, Z[i])
        bad = _row_failures(z_row, U0.lower, U0.upper)
        if not crisp:
            bad |= Z[i] < -epsilon
        count = int(bad.sum())
        if not count:
            continue
        failures += count
        if first is None:
            j = int(np.flatnonzero(bad)[0])
            z = float(Z[i, j])
            report = validate(U0.lower * z_row[j], U0.upper * z_row[j], U0.grid)
            if report.ok:
                condition, pair = _sign_failure(U0, z)
            else:
                worst = report.failures()[0]
                condition, pair = worst.condition, worst.first_violation
            first = ScanFailure(x=float(x), t=float(ts[j]), z=z, condition=condition, alpha_pair=pair)

    result = ScanReport(
        m=P.m,
        x_max=x_max,
        t_max=t_max,
        resolution=resolution,
        points=xs.size * ts.size,
        failures=failures,
        first_failure=first,
        crisp=crisp,
    )
    if failures:
        logger.info(
            f"❌ Fuzzy validity scan m={P.m}: {failures}/{result.points} points fail, first at "
            f"x={first.x:.6g}, t={first.t:.6g} (z={first.z:.3e})"
        )
    else:
        logger.debug(f"Fuzzy validity scan m={P.m}: all {result.points} points pass")
    return result
