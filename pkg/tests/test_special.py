import math

import numpy as np
import pytest

from src.core.errors import ParameterError, SingularityError
from src.special.functions import (
    fundamental_solution,
    gamma_fn,
    hyp2f1_near_one,
    neumann_green,
    riesz_composition_constant,
    sphere_area,
)


def test_gamma_and_sphere_area():
    assert gamma_fn(5.0) == pytest.approx(24.0)
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi))
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    with pytest.raises(ParameterError):
        gamma_fn(0.0)


def test_fundamental_solution_in_three_dimensions():
    assert fundamental_solution([0.0, 0.0, 2.0]) == pytest.approx(1.0 / (8 * math.pi))
    with pytest.raises(SingularityError):
        fundamental_solution([0.0, 0.0, 0.0])


def test_neumann_green_doubles_on_the_boundary():
    x = [0.3, -0.2, 0.0]
    y = [1.0, 0.5, 0.7]
    assert neumann_green(x, y) == pytest.approx(2.0 * fundamental_solution([-0.7, -0.7, -0.7]))
    assert neumann_green(x, y) == pytest.approx(neumann_green(y, x))


def test_composition_constant_reference_value():
    # pi Gamma(1/4)^2 / Gamma(3/4)^2 for N = 3, a = 1, b = 3/2
    expected = math.pi * math.gamma(0.25) ** 2 / math.gamma(0.75) ** 2
    assert riesz_composition_constant(3, 1.0, 1.5).value == pytest.approx(expected)


@pytest.mark.parametrize('a, b', [(1.5, 1.0), (0.0, 1.0), (1.0, 2.0)])
def test_composition_constant_window(a, b):
    with pytest.raises(ParameterError):
        riesz_composition_constant(3, a, b)


def test_hyp2f1_near_one_closed_forms():
    # 2F1(a, b; b; z) = (1 - z)^{-a}
    assert hyp2f1_near_one(0.5, 1.5, 1.5, 1e-12) == pytest.approx(1e6, rel=1e-10)
    # 2F1(1, 1; 2; z) = -log(1 - z) / z
    assert hyp2f1_near_one(1.0, 1.0, 2.0, 1e-14) == pytest.approx(-math.log(1e-14), rel=1e-10)
    gauss_sum = gamma_fn(1.5) * gamma_fn(0.75) / (gamma_fn(1.0) * gamma_fn(1.25))
    assert hyp2f1_near_one(0.5, 0.25, 1.5, 0.0) == pytest.approx(gauss_sum, rel=1e-10)
    assert hyp2f1_near_one(0.5, 1.5, 1.5, 0.0) == math.inf


def test_hyp2f1_near_one_is_continuous_across_the_switch():
    below = hyp2f1_near_one(0.75, 0.5, 1.0, 0.999e-6)
    above = hyp2f1_near_one(0.75, 0.5, 1.0, 1.001e-6)
    assert below == pytest.approx(above, rel=1e-3)
    values = hyp2f1_near_one(0.75, 0.5, 1.0, np.array([1e-3, 1e-9, 1e-15]))
    assert np.all(np.isfinite(values))
    assert np.all(np.diff(values) > 0)


def test_neumann_green_has_zero_normal_derivative_on_the_boundary():
    x = [0.3, -0.2, 0.0]
    y = [1.0, 0.5, 0.7]
    h = 1e-5
    lifted = [0.3, -0.2, h]
    slope = (neumann_green(lifted, y) - neumann_green(x, y)) / h
    free_slope = (fundamental_solution([-0.7, -0.7, h - 0.7]) - fundamental_solution([-0.7, -0.7, -0.7])) / h
    assert abs(free_slope) > 1e-3
    assert abs(slope) < 1e-3 * abs(free_slope)
