import math
from fractions import Fraction

import pytest

from src.core.errors import ParameterError, RegimeError, SingularityError
from src.core.params import ProblemParams
from src.quadrature.grid import RadialGrid
from src.solutions.bubble import (
    BUBBLE_GRID,
    bubble_collocation_integral,
    bubble_exponent_identity,
    bubble_interior,
    build_bubble,
)
from src.solutions.exact import (
    build_exact_solution,
    composition_windows,
    exact_interior,
    exact_interior_on_axis,
)
from src.solutions.residual import fixed_point_residual

SAMPLES = [0.5, 1.0, 2.0]


def test_exact_solution_constants(reference_params):
    sol = build_exact_solution(reference_params)
    assert sol.trace_exp == pytest.approx(1.0 / 3.0)
    assert sol.trace_coeff > 0
    assert sol.trace_at(8.0) == pytest.approx(sol.trace_coeff / 2.0)
    assert composition_windows(reference_params) == (True, True)


def test_exact_solution_regime_guards(reference_params):
    with pytest.raises(RegimeError):
        build_exact_solution(reference_params.with_p(3.0))
    with pytest.raises(RegimeError):
        build_exact_solution(reference_params.with_p(4.0))
    with pytest.raises(ParameterError):
        build_exact_solution(reference_params.with_lambda(0.0))


def test_exact_trace_is_a_fixed_point(reference_params, coarse_grid):
    sol = build_exact_solution(reference_params)
    residual = fixed_point_residual(sol.trace(coarse_grid), reference_params, SAMPLES)
    assert residual.sup_rel_residual < 1e-5
    assert len(residual.per_point) == len(SAMPLES)


def test_scaled_trace_is_not_a_fixed_point(reference_params, coarse_grid):
    trace = build_exact_solution(reference_params).trace(coarse_grid)
    residual = fixed_point_residual(trace.scaled(1.1), reference_params, SAMPLES)
    assert residual.sup_rel_residual == pytest.approx(1.1**4.5 - 1.0, rel=1e-4)


def test_exact_interior_on_axis(reference_params):
    sol = build_exact_solution(reference_params)
    quadrature = exact_interior(sol, (0.0, 1.0))
    assert quadrature == pytest.approx(exact_interior_on_axis(sol, 1.0), rel=1e-3)
    # homogeneity of degree -tau
    assert exact_interior_on_axis(sol, 8.0) == pytest.approx(exact_interior_on_axis(sol, 1.0) / 2.0)
    with pytest.raises(SingularityError):
        exact_interior(sol, (0.0, 0.0))


def test_exact_interior_matches_trace_on_the_boundary(reference_params):
    sol = build_exact_solution(reference_params)
    assert exact_interior(sol, (2.0, 0.0)) == pytest.approx(sol.trace_at(2.0), rel=1e-4)


@pytest.mark.parametrize('N, k', [(3, Fraction(3, 2)), (4, Fraction(2)), (5, Fraction(5, 2))])
def test_bubble_exponent_identity(N, k):
    assert bubble_exponent_identity(N, k)


def test_bubble_collocation_integral_closed_form(critical_params):
    # sigma_2 B((N-k)/2, (N-1)/2) / 2 = 2 pi B(3/4, 1) / 2
    assert bubble_collocation_integral(critical_params, 1.0) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-7)


def test_bubble_guards(reference_params, critical_params):
    with pytest.raises(RegimeError):
        build_bubble(reference_params, 1.0)
    with pytest.raises(ParameterError):
        build_bubble(critical_params, 0.0)
    with pytest.raises(ParameterError):
        build_bubble(critical_params.with_lambda(0.0), 1.0)


def test_bubble_profile_and_scaling(critical_params):
    bubble = build_bubble(critical_params, 1.0)
    assert bubble.trace_at(0.0) == pytest.approx(bubble.trace_coeff)
    other = build_bubble(critical_params, 2.0)
    for x in (0.0, 0.7, 3.0):
        expected = bubble.trace_at(x / 2.0) * 2.0**-0.25
        assert other.trace_at(x) == pytest.approx(expected, rel=1e-6)


def test_off_center_bubble_is_a_translate(critical_params):
    centred = build_bubble(critical_params, 1.0)
    shifted = build_bubble(critical_params, 1.0, zeta_offset=0.5)
    assert shifted.trace_at((1.5, 0.0)) == pytest.approx(centred.trace_at(1.0))
    with pytest.raises(ParameterError):
        shifted.trace(BUBBLE_GRID)


@pytest.mark.slow
def test_bubble_trace_is_a_fixed_point(critical_params):
    bubble = build_bubble(critical_params, 1.0)
    residual = fixed_point_residual(bubble.trace(BUBBLE_GRID), critical_params, [0.0, 0.5, 1.0, 4.0])
    assert residual.sup_rel_residual < 1e-3


@pytest.mark.slow
def test_bubble_interior_meets_the_trace(critical_params):
    bubble = build_bubble(critical_params, 1.0)
    grid = RadialGrid(r_min=1e-3, r_max=1e3, n_nodes=121)
    assert bubble_interior(bubble, 1.0, 0.0, grid=grid) == pytest.approx(bubble.trace_at(1.0), rel=1e-2)


def test_lambda_zero_params_are_valid():
    assert ProblemParams(N=3, k=1.5, p=5.5, lam=0.0).lam == 0.0
