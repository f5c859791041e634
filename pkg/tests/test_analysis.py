import math
from fractions import Fraction

import pytest
from scipy import special

from src.analysis.bootstrap import LimitKind, VerdictKind, as_rational, bootstrap_sequence
from src.analysis.certificates import (
    critical_lp_certificate,
    k_small_divergence,
    lower_bound_check,
    lower_bound_report,
    regularity_check,
)
from src.analysis.estimates import (
    empirical_constants,
    stan1_lhs,
    stan6_samples,
    verify_estimate_stan1,
    verify_estimate_stan6,
)
from src.analysis.hls import hls_check
from src.analysis.holder import (
    AnalysisConfig,
    hls_target_exponent,
    holder_check,
    pair_ladder,
    straddling_pairs,
)
from src.core.errors import ParameterError
from src.core.params import ProblemParams
from src.operators.radial_fn import RadialFn
from src.quadrature.grid import RadialGrid
from src.solutions.exact import build_exact_solution

SMALL_GRID = RadialGrid(r_min=1e-2, r_max=1e2, n_nodes=9)


def bump(grid: RadialGrid) -> RadialFn:
    return RadialFn.from_profile(lambda s: (1.0 + s) ** -3.0, grid, tail_exp=3.0)


class TestBootstrap:
    def test_subcritical_certificate_in_three_dimensions(self):
        trace = bootstrap_sequence(ProblemParams(N=3, k=1.5, p=2.0))
        assert trace.gamma_seq == [Fraction(1, 2), Fraction(-1, 2)]
        assert trace.stop_index == 1
        assert trace.verdict.kind == VerdictKind.CERTIFIED_NONEXISTENCE
        assert trace.verdict.label() == 'CertifiedNonexistence(0)'

    def test_subcritical_certificate_in_four_dimensions(self):
        trace = bootstrap_sequence(ProblemParams(N=4, k=2.0, p=2.5))
        assert trace.gamma_seq == [Fraction(1), Fraction(1, 2), Fraction(-3, 4)]
        assert trace.verdict.label() == 'CertifiedNonexistence(1)'
        assert trace.as_floats() == [1.0, 0.5, -0.75]

    def test_critical_power_is_stationary(self):
        trace = bootstrap_sequence(ProblemParams(N=3, k=1.5, p=4.0), n_max=10)
        assert trace.verdict.kind == VerdictKind.NO_CERTIFICATE
        assert trace.limit.kind == LimitKind.STATIONARY
        assert trace.limit.value == pytest.approx(0.5)
        assert set(trace.gamma_seq) == {Fraction(1, 2)}

    def test_supercritical_power_increases(self, reference_params):
        trace = bootstrap_sequence(reference_params, n_max=5)
        assert trace.verdict.kind == VerdictKind.NO_CERTIFICATE
        assert trace.limit.kind == LimitKind.INCREASING
        assert trace.stop_index is None
        assert len(trace.gamma_seq) == 6

    def test_power_below_one_converges(self):
        trace = bootstrap_sequence(ProblemParams(N=3, k=1.5, p=0.5))
        assert trace.limit.kind == LimitKind.CONVERGES_TO_LIMIT
        assert trace.limit.value == pytest.approx(-3.0)

    def test_rationals_come_from_decimal_text(self):
        assert as_rational(0.1) == Fraction(1, 10)
        with pytest.raises(ParameterError):
            bootstrap_sequence(ProblemParams(N=3, k=1.0, p=2.0))


class TestEstimates:
    def test_stan1_at_origin_is_a_beta_function(self):
        expected = 2 * math.pi * special.beta(0.5, 3.5)
        assert stan1_lhs(1.5, 4.0, 3, 0.0) == pytest.approx(expected, rel=1e-7)

    def test_sweeps_are_finite(self):
        first = verify_estimate_stan1(1.5, 4.0, 3, SMALL_GRID)
        assert 0 < first.sup_ratio < math.inf
        second = verify_estimate_stan6(1.5, 3, stan6_samples(SMALL_GRID))
        assert 0 < second.sup_ratio < math.inf
        assert len(stan6_samples(SMALL_GRID)) == 1 + 3 * SMALL_GRID.n_nodes

    @pytest.mark.parametrize(
        'k, beta, fragment',
        [(0.5, 4.0, '1 < k'), (2.5, 4.0, 'k < N - 1'), (1.5, 2.0, 'N - 1 < beta')],
    )
    def test_stan1_window(self, k, beta, fragment):
        with pytest.raises(ParameterError, match=fragment):
            verify_estimate_stan1(k, beta, 3, SMALL_GRID)

    def test_empirical_constants_need_supercritical_power(self, reference_params):
        with pytest.raises(ParameterError):
            empirical_constants(reference_params.with_p(3.0), grid=SMALL_GRID)
        constants = empirical_constants(reference_params, grid=SMALL_GRID)
        assert constants.c1 > 0 and constants.c2 > 0


class TestHolder:
    def test_solver_pack(self, reference_params):
        pack = AnalysisConfig.solver_pack(reference_params, s=2.0)
        assert pack.alpha == pytest.approx(0.5)
        assert pack.q == pytest.approx(4.0)
        assert pack.lifted_gamma == pytest.approx(0.5)
        assert AnalysisConfig.solver_pack(reference_params).s == pytest.approx(8.0 / 3.0)
        with pytest.raises(ParameterError):
            AnalysisConfig.solver_pack(reference_params, s=5.0)

    def test_hls_target_exponent(self):
        assert hls_target_exponent(3, 1.0, 1.5) == pytest.approx(6.0)
        assert AnalysisConfig(N=3, alpha=1.0, s=1.5).gamma == pytest.approx(1.0 - 2.0 / 6.0)

    def test_pair_ladder(self):
        pairs = pair_ladder((1.0, 0.5))
        assert len(pairs) == 9
        assert math.dist(*pairs[0]) == pytest.approx(1e-4)
        assert straddling_pairs(1.0)[-1] == ((1.0, 0.0), (1.0, 1.0))
        with pytest.raises(ParameterError):
            pair_ladder((0.1, 0.0), direction=(-1.0, 0.0))

    def test_window_is_checked(self, reference_params):
        with pytest.raises(ParameterError):
            holder_check(bump(SMALL_GRID), 1.0, 1.0, reference_params, pair_ladder((1.0, 0.5)))

    @pytest.mark.slow
    def test_lifting_of_bump_is_hoelder(self, reference_params):
        report = holder_check(bump(RadialGrid()), 1.0, 4.0, reference_params, pair_ladder((1.0, 0.5)))
        assert report.gamma == pytest.approx(0.5)
        assert report.passed
        assert report.emp_exponent >= 0.45

    @pytest.mark.slow
    def test_lifting_is_hoelder_across_the_boundary_plane(self, reference_params):
        report = holder_check(bump(RadialGrid()), 1.0, 4.0, reference_params, straddling_pairs(1.0))
        assert report.passed
        assert 0 < report.emp_const < math.inf
        assert report.emp_exponent >= report.gamma - 0.05


class TestHLS:
    def test_zero_input(self):
        assert hls_check(RadialFn.zeros(SMALL_GRID), 1.5, 1.0, 3) == 0.0

    @pytest.mark.slow
    def test_ratio_is_dilation_invariant(self, coarse_grid):
        f = bump(coarse_grid)
        ratio = hls_check(f, 1.5, 1.0, 3)
        assert 0 < ratio < math.inf
        assert hls_check(f.dilated(2.0), 1.5, 1.0, 3) == pytest.approx(ratio, rel=1e-2)


class TestCertificates:
    def test_small_k_kernel_diverges(self):
        power = k_small_divergence(ProblemParams(N=3, k=0.5, p=2.0))
        assert power.divergent and power.growth == 'power'
        assert power.partial_integrals == sorted(power.partial_integrals)
        log = k_small_divergence(ProblemParams(N=3, k=1.0, p=2.0), radii=[math.e])
        assert log.growth == 'log'
        assert log.partial_integrals[0] == pytest.approx(2 * math.pi)
        assert not k_small_divergence(ProblemParams(N=3, k=1.5, p=2.0)).divergent

    def test_critical_lp_certificate(self, reference_params):
        critical = critical_lp_certificate(reference_params.with_p(4.0))
        assert critical.divergent and critical.growth == 'log'
        assert not critical_lp_certificate(reference_params).divergent

    @pytest.mark.parametrize('p, regular', [(5.5, False), (8.0, True)])
    def test_regularity_matches_prediction(self, p, regular):
        report = regularity_check(build_exact_solution(ProblemParams(N=3, k=1.5, p=p)))
        assert report.exponent == pytest.approx(8.0)
        assert report.finite == regular
        assert report.predicted_regular == regular

    def test_lower_bound_of_exact_trace(self, reference_params, coarse_grid):
        trace = build_exact_solution(reference_params).trace(coarse_grid)
        assert lower_bound_check(trace, reference_params)
        report = lower_bound_report(trace, reference_params)
        assert report.holds
        assert report.constant > 0
        assert report.min_ratio >= 1.0 - 1e-6

    def test_fitted_lower_bound_rejects_fast_decay(self, reference_params, coarse_grid):
        slow = RadialFn.power(1.0, 0.5, coarse_grid)
        fast = RadialFn.power(1.0, 1.0, coarse_grid)
        assert lower_bound_check(slow, reference_params)
        assert not lower_bound_check(fast, reference_params)
        assert lower_bound_check(fast, reference_params, slack=1e-3)

    def test_zero_is_not_a_positive_solution(self, reference_params, coarse_grid):
        assert not lower_bound_check(RadialFn.zeros(coarse_grid), reference_params)
        assert not lower_bound_report(RadialFn.zeros(coarse_grid), reference_params).holds
