import math

import numpy as np
import pytest

from pydantic import ValidationError

from src.core.errors import ParameterError
from src.quadrature.adaptive import PowerTail, adaptive_integrate
from src.quadrature.angular import angular_kernel, angular_kernel_array, radial_kernel_function
from src.quadrature.grid import RadialGrid, SingularityHint
from src.quadrature.monte_carlo import Annulus, Ball, mc_integral_oracle
from src.quadrature.panels import gauss_legendre_panels
from src.special.functions import sphere_area


def test_graded_endpoint_singularity():
    hint = SingularityHint(location=0.0, exponent=0.5)
    result = adaptive_integrate(lambda t: t**-0.5, 0.0, 1.0, hints=[hint])
    assert result.value == pytest.approx(2.0, rel=1e-8)
    assert result.converged


def test_interior_log_singularity():
    hint = SingularityHint(location=0.5, exponent=0.0)
    result = adaptive_integrate(lambda t: math.log(abs(t - 0.5)) if t != 0.5 else 0.0, 0.0, 1.0, hints=[hint])
    assert result.value == pytest.approx(math.log(0.5) - 1.0, rel=1e-7)


def test_infinite_interval_with_and_without_tail():
    tail = PowerTail(coeff=1.0, exponent=2.0, start=1.0)
    with_tail = adaptive_integrate(lambda t: 1.0 / (1.0 + t) ** 2 if t < 1 else t**-2, 0.0, math.inf, tail=tail)
    assert with_tail.value == pytest.approx(0.5 + 1.0, rel=1e-8)

    mapped = adaptive_integrate(lambda t: 1.0 / (1.0 + t * t), 0.0, math.inf)
    assert mapped.value == pytest.approx(math.pi / 2, rel=1e-8)


def test_non_integrable_hint_is_rejected():
    with pytest.raises(ValidationError, match='non-integrable'):
        SingularityHint(location=0.0, exponent=1.0)


def test_empty_interval_is_rejected():
    with pytest.raises(ParameterError):
        adaptive_integrate(lambda t: t, 1.0, 1.0)


def test_panel_rule_integrates_polynomials():
    nodes, weights = gauss_legendre_panels(np.array([0.0, 0.5, 2.0]))
    assert float(np.sum(weights * nodes**5)) == pytest.approx(2.0**6 / 6)


@pytest.mark.parametrize('r, s, beta', [(1.0, 0.5, 1.0), (0.3, 2.0, 1.5), (1.0, 1.2, 0.5)])
def test_angular_kernel_routes_agree(r, s, beta):
    closed = angular_kernel(2, beta, r, s)
    quad = angular_kernel(2, beta, r, s, method='quadrature', tol=1e-10)
    assert closed == pytest.approx(quad, rel=1e-7)
    assert closed == pytest.approx(angular_kernel(2, beta, s, r))


def test_angular_kernel_at_origin_is_sphere_area():
    value = angular_kernel_array(2, 1.5, 0.0, 2.0)
    assert float(value) == pytest.approx(sphere_area(2) * 2.0**-1.5)


def test_angular_kernel_with_height_matches_quadrature():
    closed = angular_kernel(2, 1.0, 1.0, 1.0, height=0.5)
    quad = angular_kernel(2, 1.0, 1.0, 1.0, height=0.5, method='quadrature', tol=1e-10)
    assert closed == pytest.approx(quad, rel=1e-7)


@pytest.mark.parametrize(
    'd, beta, gap',
    [(2, 1.5, 1e-4), (2, 1.5, 1e-8), (2, 1.0, 1e-12), (3, 1.5, 1e-9), (3, 2.5, 1e-6)],
)
def test_angular_kernel_routes_agree_next_to_the_diagonal(d, beta, gap):
    closed = angular_kernel(d, beta, 1.0, 1.0 + gap)
    quad = angular_kernel(d, beta, 1.0, 1.0 + gap, method='quadrature', tol=1e-10)
    assert closed > 0
    assert math.isfinite(closed)
    assert quad == pytest.approx(closed, rel=1e-6)


def test_radial_kernel_is_finite_one_ulp_off_the_diagonal():
    kernel = radial_kernel_function(2, 1.5, 2.0)
    closest = kernel(math.nextafter(2.0, 0.0))
    assert math.isfinite(closest)
    assert closest > kernel(2.0 - 1e-6) > 0
    assert kernel(2.0) == 0.0


def test_lifting_kernel_at_small_height_matches_quadrature():
    closed = angular_kernel(2, 2.0, 1.0, 1.0, height=1e-7)
    quad = angular_kernel(2, 2.0, 1.0, 1.0, height=1e-7, method='quadrature', tol=1e-10)
    assert math.isfinite(closed)
    assert quad == pytest.approx(closed, rel=1e-6)


def test_monte_carlo_volume_is_exact_for_constants():
    estimate = mc_integral_oracle(lambda y: np.ones(len(y)), Ball(center=(0.0, 0.0, 0.0), radius=1.0), 10_000, seed=3)
    assert estimate.estimate == pytest.approx(4 * math.pi / 3)
    assert estimate.stderr == pytest.approx(0.0, abs=1e-12)


def test_monte_carlo_importance_sampling_of_singular_integrand():
    # Int_{B_1 in R^2} |y|^{-1} dy = 2 pi; importance exponent 1 makes the weights constant
    ball = Ball(center=(0.0, 0.0), radius=1.0)
    estimate = mc_integral_oracle(lambda y: 1.0 / np.linalg.norm(y, axis=1), ball, 10_000, seed=0, radial_exponent=1.0)
    assert estimate.estimate == pytest.approx(2 * math.pi, rel=1e-10)


def test_monte_carlo_annulus_and_seed_determinism():
    annulus = Annulus(center=(0.0, 0.0), inner=1.0, outer=2.0)
    first = mc_integral_oracle(lambda y: np.sum(y * y, axis=1), annulus, 20_000, seed=7)
    second = mc_integral_oracle(lambda y: np.sum(y * y, axis=1), annulus, 20_000, seed=7)
    assert first == second
    # Int r^2 over the annulus = 2 pi (2^4 - 1) / 4
    assert abs(first.estimate - 7.5 * math.pi) <= 4 * first.stderr


def test_monte_carlo_rejects_few_samples():
    with pytest.raises(ParameterError):
        mc_integral_oracle(lambda y: np.ones(len(y)), Ball(center=(0.0,), radius=1.0), 100, seed=0)


def test_grid_refinement_keeps_nodes():
    grid = RadialGrid(r_min=1e-2, r_max=1e2, n_nodes=9)
    fine = grid.refine()
    assert fine.n_nodes == 17
    assert fine.refinement_level == 1
    np.testing.assert_allclose(fine.nodes[::2], grid.nodes)


def test_grid_truncation_keeps_density():
    grid = RadialGrid(r_min=1e-3, r_max=1e3, n_nodes=121)
    cut = grid.truncated(10.0)
    assert cut.r_max == 10.0
    assert cut.ratio == pytest.approx(grid.ratio, rel=1e-2)
