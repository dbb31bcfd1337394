from dotenv import load_dotenv

load_dotenv()
import sys

sys.path.append(".")

import logging
import math

import numpy as np
import pytest

from src.calculus.gs_derivative import gs_partial, gs_second_partial
from src.calculus.views import Classification
from src.fuzzy.fuzzy_number import AlphaGrid, FuzzyNumber, FuzzyNumberError, alpha_cut, crisp, triangular
from src.wave.views import GeneralLevelProblem, WaveProblem
from src.wave.wave_solver import (
    fuzzy_solution,
    grid_points,
    kernel,
    level_functions,
    level_solution,
    levelwise_decompose,
    s_solution_check,
    solution_envelope,
    z_grid,
    z_series,
    z_series_dt,
    z_series_dx,
    z_series_dxx,
    z_series_dtt,
)


@pytest.fixture(scope="module")
def U0():
    return triangular(1, 2, 3)


def leibniz(m):
    return 4 / math.pi * math.fsum((-1) ** n / (2 * n + 1) for n in range(m + 1))


@pytest.mark.parametrize("m, expected", [(0, 1.27324), (1, 0.84883), (2, 1.10347), (3, 0.92158)])
def test_midpoint_partial_sums(m, expected):
    value = z_series(math.pi / 2, 0.0, m)
    assert value == pytest.approx(leibniz(m), abs=1e-14)
    assert value == pytest.approx(expected, abs=1e-5)


def test_first_term_is_the_single_mode():
    for x, t in [(0.3, 0.2), (1.0, 1.4), (2.5, 0.7)]:
        assert z_series(x, t, 0) == pytest.approx(4 / math.pi * math.sin(x) * math.cos(t), rel=1e-15)


def test_kernel_vanishes_on_x_zero():
    for m in range(4):
        for t in np.linspace(0, math.pi, 7):
            assert z_series(0.0, t, m) == 0.0


def test_kernel_is_symmetric_about_half_pi():
    for m in range(4):
        for x, t in [(0.2, 0.3), (0.9, 1.1), (1.3, 0.05)]:
            assert z_series(math.pi - x, t, m) == pytest.approx(z_series(x, t, m), abs=1e-14)


def test_series_index_is_validated():
    with pytest.raises(ValueError):
        z_series(0.1, 0.1, -1)
    with pytest.raises(ValueError):
        z_series(0.1, 0.1, 1.5)


def test_analytic_partials_match_finite_differences():
    h = 1e-6
    x, t = 0.7, 0.4
    for m in range(4):
        dx = (z_series(x + h, t, m) - z_series(x - h, t, m)) / (2 * h)
        dt = (z_series(x, t + h, m) - z_series(x, t - h, m)) / (2 * h)
        assert z_series_dx(x, t, m) == pytest.approx(dx, abs=1e-7)
        assert z_series_dt(x, t, m) == pytest.approx(dt, abs=1e-7)
        assert z_series_dtt(x, t, m) == z_series_dxx(x, t, m)


def test_initial_velocity_is_zero():
    for m in range(4):
        for x in np.linspace(0, math.pi, 9):
            assert z_series_dt(x, 0.0, m) == 0.0


def test_grid_evaluation_matches_scalar():
    xs = np.linspace(0, math.pi, 17)
    ts = np.linspace(0, math.pi / 2, 13)
    for m in range(4):
        Z = z_grid(xs, ts, m)
        assert Z.shape == (17, 13)
        for i in (0, 5, 16):
            for j in (0, 6, 12):
                assert Z[i, j] == pytest.approx(z_series(xs[i], ts[j], m), abs=1e-14)


def test_grid_points_cover_the_interval():
    pts = grid_points(0.78, 0.01)
    assert pts[0] == 0.0 and pts[-1] == 0.78
    assert np.max(np.diff(pts)) <= 0.01 + 1e-15
    assert list(grid_points(0.0, 0.1)) == [0.0]


def test_level_functions_keep_raw_order(U0):
    x, t = 0.2, 1.0
    z = z_series(x, t, 1)
    assert z < 0
    u1, u2 = level_functions(x, t, 0.0, WaveProblem(U0=U0, m=1))
    assert u1 == pytest.approx(1.0 * z) and u2 == pytest.approx(3.0 * z)
    assert u1 > u2


def test_level_solution_is_sorted(U0):
    P = WaveProblem(U0=U0, m=1)
    cut = level_solution(0.2, 1.0, 0.0, P)
    assert cut.lo <= cut.hi
    cut = level_solution(0.5, 0.3, 0.5, P)
    z = z_series(0.5, 0.3, 1)
    assert cut.lo == pytest.approx(1.5 * z) and cut.hi == pytest.approx(2.5 * z)


def test_fuzzy_solution_warns_on_negative_kernel(U0, caplog):
    P = WaveProblem(U0=U0, m=1)
    with caplog.at_level(logging.WARNING):
        F = fuzzy_solution(0.2, 1.0, P)
    assert "levels swapped" in caplog.text
    z = z_series(0.2, 1.0, 1)
    assert alpha_cut(F, 0.0).lo == pytest.approx(3.0 * z)


def test_fuzzy_solution_scales_positive_kernel(U0):
    P = WaveProblem(U0=U0, m=0)
    F = fuzzy_solution(math.pi / 2, 0.0, P)
    np.testing.assert_allclose(F.lower, U0.lower * 4 / math.pi)
    np.testing.assert_allclose(F.upper, U0.upper * 4 / math.pi)


def test_wave_problem_validation(U0):
    with pytest.raises(ValueError, match="wave speed"):
        WaveProblem(U0=U0, c=0.0)
    with pytest.raises(ValueError, match="length"):
        WaveProblem(U0=U0, length=-1.0)
    with pytest.raises(ValueError, match="series index"):
        WaveProblem(U0=U0, m=-2)


def test_rescaled_problem_uses_scaled_kernel(U0):
    P = WaveProblem(U0=U0, m=2, c=2.0, length=2 * math.pi)
    assert not P.is_canonical
    assert kernel(math.pi, 0.3, P) == pytest.approx(z_series(math.pi / 2, 0.3, 2), rel=1e-14)
    assert kernel(2 * math.pi, 0.3, P) == pytest.approx(0.0, abs=1e-14)


def test_s_solution_check_passes_inside_validity_square(U0):
    report = s_solution_check(WaveProblem(U0=U0, m=1), (0.78, 0.78))
    assert report.passed
    assert not report.vacuous
    assert report.first_violation is None
    assert report.points == 79 * 79 * 101


def test_s_solution_check_reports_first_violation(U0):
    report = s_solution_check(WaveProblem(U0=U0, m=3), (0.41, 0.41))
    assert not report.passed
    v = report.first_violation
    assert v.z < 0
    assert v.t > math.pi / 8
    assert v.du1_dalpha < 0


def test_s_solution_check_is_vacuous_for_crisp_data():
    report = s_solution_check(WaveProblem(U0=crisp(2.0), m=3), (0.41, 0.41))
    assert report.passed and report.vacuous
    assert report.notes


@pytest.mark.parametrize("abc", [(2, 2, 3), (1, 2, 2)])
def test_s_solution_check_accepts_degenerate_sides(abc):
    report = s_solution_check(WaveProblem(U0=triangular(*abc), m=1), (0.5, 0.5))
    assert report.passed
    assert not report.vacuous
    assert report.first_violation is None


def test_s_solution_violation_names_the_failing_level():
    U0 = FuzzyNumber(AlphaGrid((0.0, 0.5, 1.0)), [2.0, 2.0, 2.0], [4.0, 3.9, 2.0])
    report = s_solution_check(WaveProblem(U0=U0, m=3), (0.41, 0.41))
    assert not report.passed
    v = report.first_violation
    assert v.z < 0
    assert v.alpha == 1.0
    assert v.du1_dalpha == 0.0
    assert v.du2_dalpha == pytest.approx(-3.8 * v.z)


def test_levelwise_decompose_of_the_series_problem(U0):
    lower, upper = levelwise_decompose(WaveProblem(U0=U0, m=1))
    assert lower.level == "lower" and upper.level == "upper"
    assert lower.left_boundary(0.7, 0.3) == 0.0 and upper.right_boundary(0.7, 0.3) == 0.0
    assert lower.displacement(1.0, 0.5) == pytest.approx(1.5)
    assert upper.displacement(1.0, 0.5) == pytest.approx(2.5)
    assert lower.velocity(1.0, 0.5) == 0.0
    record = upper.describe(0.5, (0.5, 1.0))
    assert record["equation"] == "u_tt = c^2 u_xx"
    assert record["displacement"] == [pytest.approx(2.5), pytest.approx(2.5)]


def test_levelwise_decompose_rejects_inverted_boundary_levels():
    problem = GeneralLevelProblem(
        c=1.0,
        length=math.pi,
        c11=lambda a: 1.0,
        c12=lambda a: 0.0,
        c21=lambda a: 0.0,
        c22=lambda a: 0.0,
        f1=lambda x, a: 1.0 + a,
        f2=lambda x, a: 3.0 - a,
        g1=lambda x, a: 0.0,
        g2=lambda x, a: 0.0,
    )
    with pytest.raises(FuzzyNumberError):
        levelwise_decompose(problem)


def test_solution_partials_are_gs_but_not_seikkala(U0):
    env = solution_envelope(WaveProblem(U0=U0, m=0))
    assert gs_partial(env, "x", (math.pi / 4, 0.3)).classification == Classification.SEIKKALA
    assert gs_partial(env, "t", (math.pi / 2, 0.3)).classification == Classification.GS_ONLY
    tt = gs_second_partial(env, "tt", (math.pi / 2, 0.3))
    assert tt.classification == Classification.GS_ONLY
    z = z_series(math.pi / 2, 0.3, 0)
    np.testing.assert_allclose(tt.lower, -U0.upper * z, rtol=1e-14)


if __name__ == "__main__":
    test_midpoint_partial_sums(3, 0.92158)
    test_kernel_vanishes_on_x_zero()
