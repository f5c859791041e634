import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.analysis.estimates import EmpiricalConstants
from src.analysis.holder import pair_ladder
from src.core.errors import BracketError, ParameterError
from src.solutions.residual import fixed_point_residual
from src.solver.config import SolverConfig
from src.solver.interior import InteriorReconstructor, reconstruct_interior
from src.solver.measure import (
    SphereMeasure,
    check_munu_bound,
    green_potential,
    green_trace,
    newtonian_potential_sphere,
)
from src.solver.picard import IterationStatus, PicardOperator, T_operator, picard_iterate
from src.solver.threshold import lambda_star_estimate, invariance_lambda_bound
from src.special.functions import sphere_area


@pytest.fixture
def measure() -> SphereMeasure:
    return SphereMeasure(N=3, h=1.0, rho=0.25, m=1.0)


class TestMeasure:
    def test_support_must_stay_above_the_boundary(self):
        with pytest.raises(ValidationError):
            SphereMeasure(h=1.0, rho=1.0)

    def test_potential_outside_and_inside(self, measure):
        assert newtonian_potential_sphere(measure, (0.0, 0.0, 0.0)) == pytest.approx(1.0 / (4 * math.pi))
        assert newtonian_potential_sphere(measure, (0.0, 0.1, 1.0)) == pytest.approx(1.0 / math.pi)

    def test_green_potential_doubles_on_the_boundary(self, measure):
        x = (0.3, 0.4, 0.0)
        assert green_potential(measure, x) == pytest.approx(2.0 * newtonian_potential_sphere(measure, x))
        with pytest.raises(ParameterError):
            green_potential(measure, (0.0, 0.0, -0.1))

    def test_green_trace_laws(self, measure, coarse_grid):
        trace = green_trace(measure, coarse_grid)
        assert trace(0.0) == pytest.approx(1.0 / (2 * math.pi), rel=1e-6)
        assert trace.tail_exp == 1.0
        assert trace(1e4) == pytest.approx(2.0 / (4 * math.pi * math.hypot(1e4, 1.0)), rel=1e-3)

    def test_munu_bound_covers_the_closest_point(self, measure, coarse_grid):
        A = check_munu_bound(measure, 1.5, coarse_grid)
        assert A >= measure.inner_constant * 1.75**0.5
        with pytest.raises(ParameterError):
            check_munu_bound(measure, 2.0, coarse_grid)


class TestSolverConfig:
    def test_defaults(self):
        cfg = SolverConfig()
        assert not cfg.truncated
        assert cfg.envelope_constant(2.0) == pytest.approx(5.0)
        assert cfg.solver_grid() == cfg.grid

    def test_truncated_grid(self):
        cfg = SolverConfig(R=64.0)
        assert cfg.truncated
        assert cfg.solver_grid().r_max == 64.0
        assert SolverConfig(R=2.0).certificate_points() == (0.15, 0.35, 0.7, 1.3)

    @pytest.mark.parametrize('kwargs', [{'R': 0.5}, {'envelope_factor': 2.0}, {'max_iter': 0}])
    def test_invalid_settings(self, kwargs):
        with pytest.raises(ValidationError):
            SolverConfig(**kwargs)

    def test_explicit_envelope_needs_twice_the_bound(self):
        with pytest.raises(ParameterError, match='M > 2A'):
            SolverConfig(M=1.0).envelope_constant(1.0)


class TestPicard:
    def test_uncoupled_problem_returns_the_source(self, measure, reference_params, coarse_grid):
        cfg = SolverConfig(grid=coarse_grid)
        report = picard_iterate(measure, reference_params.with_lambda(0.0), cfg)
        assert report.status == IterationStatus.CONVERGED
        assert report.iterations == 1
        np.testing.assert_allclose(report.trace.values, green_trace(measure, coarse_grid).values)
        assert report.summary()['status'] == 'Converged'

    def test_dimension_mismatch(self, reference_params):
        with pytest.raises(ParameterError):
            PicardOperator(SphereMeasure(N=4), reference_params, SolverConfig())

    @pytest.mark.slow
    def test_small_coupling_converges_monotonically(self, measure, reference_params, coarse_grid):
        cfg = SolverConfig(grid=coarse_grid)
        report = picard_iterate(measure, reference_params.with_lambda(1e-3), cfg)
        assert report.converged
        assert report.monotone_ok
        assert all(report.envelope_ok)
        assert report.final_residual <= cfg.tol
        assert report.certificate_residual is not None
        assert report.envelope_constant == pytest.approx(2.5 * report.munu_bound)
        source = green_trace(measure, coarse_grid).values
        assert np.all(report.trace.values >= source)

    @pytest.mark.slow
    def test_large_coupling_diverges(self, measure, reference_params, coarse_grid):
        report = picard_iterate(measure, reference_params.with_lambda(1e3), SolverConfig(grid=coarse_grid))
        assert report.status == IterationStatus.DIVERGED
        assert report.divergence_reason in ('blowup', 'envelope')
        assert report.trace is None

    @pytest.mark.slow
    def test_finite_radius_run(self, measure, reference_params, coarse_grid):
        cfg = SolverConfig(R=64.0, grid=coarse_grid)
        report = picard_iterate(measure, reference_params.with_lambda(1e-3), cfg)
        assert report.converged
        assert report.trace.grid.r_max == 64.0

    @pytest.mark.slow
    def test_pointwise_certificate_meets_twice_the_tolerance(self, measure, reference_params, coarse_grid):
        params = reference_params.with_lambda(1e-3)
        cfg = SolverConfig(grid=coarse_grid, tol=1e-6)
        report = picard_iterate(measure, params, cfg)
        assert report.converged
        assert report.certificate_residual <= 2.0 * cfg.tol

        radii = cfg.certificate_points()
        assert not set(radii) & set(coarse_grid.nodes.tolist())
        source = green_trace(measure, coarse_grid)
        exact = fixed_point_residual(report.trace, params, radii, source=source)
        assert exact.sup_rel_residual == pytest.approx(report.certificate_residual)
        perturbed = fixed_point_residual(report.trace.scaled(1.01), params, radii, source=source)
        assert perturbed.sup_rel_residual > 5e-3

    @pytest.mark.slow
    def test_finite_radius_certificate(self, measure, reference_params, coarse_grid):
        cfg = SolverConfig(R=64.0, grid=coarse_grid, tol=1e-6)
        report = picard_iterate(measure, reference_params.with_lambda(1e-3), cfg)
        assert report.converged
        assert report.certificate_residual <= 2.0 * cfg.tol

    @pytest.mark.slow
    def test_finite_radius_agrees_with_the_full_space(self, measure, reference_params, coarse_grid):
        params = reference_params.with_lambda(1e-3)
        full = picard_iterate(measure, params, SolverConfig(grid=coarse_grid))
        cut = picard_iterate(measure, params, SolverConfig(R=64.0, grid=coarse_grid))
        radii = [r for r in coarse_grid.nodes if 0.1 <= r <= 4.0]
        np.testing.assert_allclose(cut.trace(radii), full.trace(radii), rtol=5e-2)

    @pytest.mark.slow
    def test_T_operator_fixes_the_converged_trace(self, measure, reference_params, coarse_grid):
        params = reference_params.with_lambda(1e-3)
        cfg = SolverConfig(grid=coarse_grid)
        report = picard_iterate(measure, params, cfg)
        image = T_operator(report.trace, measure, params, cfg)
        np.testing.assert_allclose(image.values, report.trace.values, rtol=1e-6)

    @pytest.mark.slow
    def test_stalls_when_iterations_run_out(self, measure, reference_params, coarse_grid):
        cfg = SolverConfig(grid=coarse_grid, max_iter=1, tol=1e-300)
        report = picard_iterate(measure, reference_params.with_lambda(1e-6), cfg)
        assert report.status == IterationStatus.STALLED
        assert report.iterations == 1


class TestThreshold:
    def test_invariance_bound_formula(self, reference_params):
        constants = EmpiricalConstants(c1=2.0, c2=3.0)
        bound = invariance_lambda_bound(reference_params, 1.0, 2.5, constants)
        expected = sphere_area(3) * 1.5 / (2.0 * 6.0 * 2.5**5.5)
        assert bound == pytest.approx(expected)
        with pytest.raises(ParameterError):
            invariance_lambda_bound(reference_params, 1.0, 1.0, constants)

    def test_unordered_bracket_is_rejected(self, measure, reference_params):
        with pytest.raises(BracketError):
            lambda_star_estimate(measure, reference_params, SolverConfig(), (1.0, 0.5))

    @pytest.mark.slow
    def test_bracket_without_sign_change(self, measure, reference_params, coarse_grid):
        with pytest.raises(BracketError) as excinfo:
            lambda_star_estimate(measure, reference_params, SolverConfig(grid=coarse_grid), (1e3, 1e4))
        assert excinfo.value.verdicts['lambda_lo'] == 'Diverged'

    @pytest.mark.slow
    def test_bisection_brackets_the_threshold(self, measure, reference_params, coarse_grid):
        estimate = lambda_star_estimate(
            measure, reference_params, SolverConfig(grid=coarse_grid), (1e-3, 1e3)
        )
        lo, hi = estimate.bracket
        assert lo < estimate.lambda_hat < hi
        assert hi / lo - 1.0 <= 1e-2
        assert estimate.lambda_hat == pytest.approx(math.sqrt(lo * hi))
        assert estimate.converging_report.converged
        assert not estimate.failing_report.converged

    @pytest.mark.slow
    def test_threshold_decreases_with_the_mass(self, reference_params, coarse_grid):
        cfg = SolverConfig(grid=coarse_grid)
        light = lambda_star_estimate(SphereMeasure(m=1.0), reference_params, cfg, (1e-3, 1e3))
        heavy = lambda_star_estimate(SphereMeasure(m=2.0), reference_params, cfg, (1e-3, 1e3))
        assert heavy.lambda_hat < light.lambda_hat


class TestInterior:
    def test_uncoupled_interior_is_the_green_potential(self, measure, reference_params, coarse_grid):
        params = reference_params.with_lambda(0.0)
        trace = green_trace(measure, coarse_grid)
        reconstructor = InteriorReconstructor(trace, measure, params)
        x = (0.5, 0.3)
        assert reconstructor(x) == pytest.approx(green_potential(measure, (0.5, 0.0, 0.3)))
        assert reconstructor.nonlinear_part(x) == 0.0
        with pytest.raises(ParameterError):
            reconstructor((0.5, -0.3))

    @pytest.mark.slow
    def test_interior_meets_the_trace(self, measure, reference_params, coarse_grid):
        params = reference_params.with_lambda(1e-3)
        report = picard_iterate(measure, params, SolverConfig(grid=coarse_grid))
        value = reconstruct_interior(report.trace, measure, params, (1.0, 0.0))
        assert value == pytest.approx(report.trace(1.0), rel=1e-2)

    @pytest.mark.slow
    def test_nonlinear_part_is_hoelder(self, measure, reference_params, coarse_grid):
        params = reference_params.with_lambda(1e-3)
        report = picard_iterate(measure, params, SolverConfig(grid=coarse_grid))
        reconstructor = InteriorReconstructor(report.trace, measure, params)
        holder = reconstructor.nonlinear_holder(pair_ladder((1.0, 0.5)))
        assert 0 < holder.emp_const < math.inf
        assert holder.gamma > 0

    @pytest.mark.slow
    def test_interior_just_above_the_boundary(self, measure, reference_params, coarse_grid):
        params = reference_params.with_lambda(1e-3)
        report = picard_iterate(measure, params, SolverConfig(grid=coarse_grid))
        reconstructor = InteriorReconstructor(report.trace, measure, params)
        for r in (0.5, 1.0, 2.0):
            value = reconstructor((r, 1e-3))
            assert math.isfinite(value)
            assert value == pytest.approx(report.trace(r), rel=1e-2)
