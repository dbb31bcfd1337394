from dotenv import load_dotenv

load_dotenv()
import sys

sys.path.append(".")

import math
import time

import pytest

from src.fuzzy.fuzzy_number import crisp, triangular
from src.verification.checks import boundary_initial_check, fuzzy_validity_scan
from src.verification.residuals import fuzzy_equation_check, pde_residual
from src.verification.views import GridSpec
from src.wave.domain_search import edge_oracle, validity_square
from src.wave.views import WaveProblem
from src.wave.wave_solver import level_functions


@pytest.fixture(scope="module")
def U0():
    return triangular(1, 2, 3)


@pytest.fixture(scope="module")
def sides():
    return {m: validity_square(m).s for m in range(4)}


def lower_level(P):
    return lambda x, t, a: level_functions(x, t, a, P)[0]


def upper_level(P):
    return lambda x, t, a: level_functions(x, t, a, P)[1]


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_series_solution_residual(U0, m):
    P = WaveProblem(U0=U0, m=m)
    s = edge_oracle(m)
    grid = GridSpec(x_max=s, t_max=s)
    for levels in (lower_level(P), upper_level(P)):
        report = pde_residual(levels, 1.0, grid)
        assert report.max_abs_residual < 1e-5
        assert report.order_estimate is not None
        assert report.order_estimate == pytest.approx(2.0, abs=0.3)
        assert report.skipped == 0
        assert report.points > 0
        assert report.order_steps == (0.05, 0.025, 0.0125)


def test_linear_function_has_zero_residual():
    report = pde_residual(lambda x, t, a: x, 3.0, GridSpec(x_max=1.0, t_max=1.0))
    assert report.max_abs_residual < 1e-8
    assert report.order_estimate is None


def test_quadratic_in_time_has_residual_two():
    report = pde_residual(lambda x, t, a: t * t, 0.7, GridSpec(x_max=1.0, t_max=1.0))
    assert report.max_abs_residual == pytest.approx(2.0, abs=1e-6)
    assert report.worst_point is not None


def test_worst_point_is_lexicographically_first():
    report = pde_residual(lambda x, t, a: 0.0, 1.0, GridSpec(x_max=1.0, t_max=1.0))
    x, t, a = report.worst_point
    assert x == pytest.approx(0.05) and t == pytest.approx(0.05) and a == 0.0
    assert report.max_abs_residual == 0.0


def test_out_of_domain_points_are_skipped():
    report = pde_residual(lambda x, t, a: math.sqrt(x - 0.5) * t, 1.0, GridSpec(x_max=1.0, t_max=1.0))
    assert report.skipped > 0
    assert report.points > 0


def test_grid_spec_rejects_bad_steps():
    with pytest.raises(ValueError):
        GridSpec(x_max=1.0, t_max=1.0, h=0.0)
    with pytest.raises(ValueError):
        GridSpec(x_max=-1.0, t_max=1.0)


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_boundary_and_initial_conditions(U0, m):
    report = boundary_initial_check(WaveProblem(U0=U0, m=m))
    assert report.passed
    assert report.boundary_ok
    assert report.velocity_max == 0.0
    assert report.endpoint_value == 0.0
    assert report.gibbs_overshoot > 0
    assert report.notes


def test_initial_value_partial_sums_oscillate_toward_one(U0):
    report = boundary_initial_check(WaveProblem(U0=U0, m=3))
    (midpoint,) = report.convergence
    assert midpoint.x == pytest.approx(math.pi / 2)
    assert midpoint.values == pytest.approx([1.27324, 0.84883, 1.10347, 0.92158], abs=1e-5)
    assert midpoint.decreasing


def test_non_monotone_convergence_point_is_reported(U0):
    report = boundary_initial_check(WaveProblem(U0=U0, m=3), convergence_points=(0.39,))
    assert not report.convergence[0].decreasing
    assert not report.passed


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_validity_scan_passes_on_the_validity_square(U0, sides, m):
    s = sides[m]
    report = fuzzy_validity_scan(WaveProblem(U0=U0, m=m), (s, s))
    assert report.passed
    assert report.pass_rate == 1.0
    assert report.first_failure is None


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_validity_scan_fails_beyond_the_validity_square(U0, sides, m):
    s = sides[m] + 0.02
    report = fuzzy_validity_scan(WaveProblem(U0=U0, m=m), (s, s))
    assert not report.passed
    assert report.pass_rate < 1.0
    assert report.first_failure.z < 0
    assert report.first_failure.t > edge_oracle(m)


def test_validity_scan_with_published_four_mode_window(U0):
    report = fuzzy_validity_scan(WaveProblem(U0=U0, m=3), (0.41, 0.41))
    assert not report.passed
    first = report.first_failure
    assert first.x < 0.05
    assert first.t == pytest.approx(0.4, abs=0.011)
    assert first.condition in ("i", "ii", "iv")


def test_validity_scan_on_published_two_mode_square(U0):
    report = fuzzy_validity_scan(WaveProblem(U0=U0, m=1), (0.78, 0.78))
    assert report.passed


def test_validity_scan_catches_negative_kernel_under_narrow_spread():
    narrow = triangular(1.0, 1.0 + 1e-11, 1.0 + 2e-11)
    P = WaveProblem(U0=narrow, m=3)
    report = fuzzy_validity_scan(P, (0.41, 0.41))
    assert not report.passed
    first = report.first_failure
    assert first.z < 0
    assert first.condition == "iv"
    assert first.alpha_pair == (0.0, 0.0)
    relaxed = fuzzy_validity_scan(P, (0.41, 0.41), epsilon=1.0)
    assert relaxed.passed
    assert relaxed.first_failure is None


def test_validity_scan_at_fine_resolution_is_fast(U0):
    start = time.perf_counter()
    report = fuzzy_validity_scan(WaveProblem(U0=U0, m=1), (0.78, 0.78), resolution=1e-3)
    assert time.perf_counter() - start < 10.0
    assert report.passed
    assert report.points == 781 * 781


def test_validity_scan_is_trivial_for_crisp_data():
    report = fuzzy_validity_scan(WaveProblem(U0=crisp(2.0), m=3), (0.41, 0.41))
    assert report.passed
    assert report.crisp


@pytest.mark.parametrize("m", [0, 1, 3])
def test_fuzzy_equation_holds_on_gs_second_partials(U0, m):
    s = edge_oracle(m)
    check = fuzzy_equation_check(WaveProblem(U0=U0, m=m), 0.5 * s, 0.5 * s)
    assert check.passed
    assert check.max_gap == 0.0
    assert check.tt_classification == "gS_only"


def test_fuzzy_equation_with_wave_speed(U0):
    P = WaveProblem(U0=U0, m=1, c=2.0, length=2 * math.pi)
    check = fuzzy_equation_check(P, 0.4, 0.1)
    assert check.passed


if __name__ == "__main__":
    test_linear_function_has_zero_residual()
    test_quadratic_in_time_has_residual_two()
