import logging
from typing import Any, Dict

import numpy as np
import pandas as pd
from tabulate import tabulate

from src.analysis.bootstrap import bootstrap_sequence
from src.analysis.certificates import (
    critical_lp_certificate,
    k_small_divergence,
    lower_bound_check,
    lower_bound_report,
    regularity_check,
)
from src.analysis.estimates import empirical_constants
from src.cli.config import ExperimentConfig, preflight
from src.core.errors import BracketError, ConfigError, LabError, ParameterError, RegimeError
from src.core.params import classify_regime, critical_exponents, is_critical
from src.data_processing.file_processor import ResultFileProcessor
from src.solutions.bubble import BUBBLE_GRID
from src.solutions.exact import build_exact_solution
from src.solver.measure import check_munu_bound, green_trace
from src.solver.picard import IterationStatus, picard_iterate
from src.solver.threshold import lambda_star_estimate
from src.tools.verification_tools import REJECTION_ERRORS, VerificationToolkit, run_verification

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_REJECTED = 2
EXIT_NOT_CONVERGED = 3


def _print_table(rows: Dict[str, Any]) -> None:
    table = [[key, value] for key, value in rows.items()]
    print(tabulate(table, headers=['campo', 'valor'], tablefmt='github'))


def _params_dict(config: ExperimentConfig) -> Dict[str, Any]:
    return config.params.model_dump(by_alias=True)


def cmd_exponents(config: ExperimentConfig) -> int:
    """Critical exponents, regime and the certificates that go with it."""
    params = config.params
    regime = classify_regime(params)
    payload: Dict[str, Any] = {
        'params': _params_dict(config),
        'regime': regime.label(),
        'regime_tag': regime.tag,
        'regular': regime.regular,
        'regular_vacuous': regime.vacuous,
        'p_star': None,
        'p_star_star': None,
    }

    if params.k <= 1:
        payload['k_small_divergence'] = k_small_divergence(params)._asdict()
    else:
        p_star, p_star_star = critical_exponents(params)
        payload['p_star'] = p_star
        payload['p_star_star'] = p_star_star
        if is_critical(params.p, p_star):
            payload['critical_lp_certificate'] = critical_lp_certificate(params)._asdict()
        elif params.p > p_star and params.lam > 0:
            try:
                sol = build_exact_solution(params)
            except (ParameterError, RegimeError) as e:
                logger.info('no power solution reported: %s', e)
            else:
                payload['exact_trace'] = {'coeff': sol.trace_coeff, 'exponent': sol.trace_exp}
                payload['regularity'] = regularity_check(sol)._asdict()

    ResultFileProcessor.write_json(payload, 'exponents.json')
    _print_table(
        {
            'N': params.N,
            'k': params.k,
            'p': params.p,
            'p*': payload['p_star'],
            'p**': payload['p_star_star'],
            'regime': payload['regime'],
        }
    )
    return EXIT_OK


def _verify_payload(config: ExperimentConfig, target: str) -> Dict[str, Any]:
    params = config.params
    verify = config.verify
    tolerances = config.tolerances
    grid = config.grid()

    if target == 'composition':
        return {
            'N': params.N,
            'pairs': verify.composition_pairs,
            'separations': verify.composition_separations,
            'method': verify.composition_method,
            'rel_tol': tolerances.composition,
            'seed': config.seeds.mc,
            'angular_triples': verify.angular_triples,
            'mc_samples': verify.mc_samples,
            'stderr_factor': tolerances.angular_stderr,
        }
    if target == 'exact':
        samples = np.geomspace(verify.exact_r_min, verify.exact_r_max, verify.exact_samples)
        return {
            'params': params,
            'grid': grid,
            'samples': samples.tolist(),
            'residual_tol': tolerances.residual,
            'perturbation': verify.perturbation,
            'axis_height': verify.axis_height,
            'axis_tol': tolerances.axis,
        }
    if target == 'bubble':
        samples = [0.0] + np.linspace(0.5, verify.bubble_r_max, verify.bubble_samples - 1).tolist()
        payload = {
            'params': params,
            't': verify.bubble_t,
            'samples': samples,
            'residual_tol': tolerances.residual,
            'scaled_t': verify.bubble_scaled_t,
            'covariance_tol': tolerances.covariance,
        }
        if config.refine:
            payload['grid'] = BUBBLE_GRID.refine(config.refine)
        return payload
    if target == 'estimates':
        return {
            'N': params.N,
            'k': params.k,
            'beta': verify.beta,
            'grid': grid,
            'refine_tol': tolerances.refine,
        }
    if target == 'holder':
        return {
            'params': params,
            'alpha': verify.holder_alpha,
            'q': verify.holder_q,
            'grid': grid,
            'center': verify.holder_center,
            'pack_s': verify.pack_s,
        }
    if target == 'hls':
        return {
            'N': params.N,
            'alpha': verify.hls_alpha,
            's': verify.hls_s,
            'grid': grid,
            'dilations': verify.dilations,
            'dilation_tol': tolerances.dilation,
            'refine_tol': tolerances.refine,
        }
    raise ParameterError(f'unknown verification target {target!r}')


def cmd_verify(config: ExperimentConfig, target: str) -> int:
    """Run one verification tool and write verify_<target>.json."""
    preflight(config, 'verify')
    tool = VerificationToolkit().get_tool(target)
    result = run_verification(tool, _verify_payload(config, target))
    result.setdefault('params', _params_dict(config))

    ResultFileProcessor.write_json(result, f'verify_{target}.json')
    if target == 'composition' and 'table' in result:
        ResultFileProcessor.write_csv(
            pd.DataFrame(result['table']),
            'verify_composition.csv',
            columns=['a', 'b', 'separation', 'closed_form', 'oracle', 'rel_err'],
        )

    if result['status'] == 'error':
        logger.error('%s: %s', result['error_type'], result['error'])
        if result['error_type'] in REJECTION_ERRORS:
            return EXIT_REJECTED
        return EXIT_CHECK_FAILED

    _print_table({'target': target, 'status': result['status'], **result.get('metrics', {})})
    return EXIT_OK if result['passed'] else EXIT_CHECK_FAILED


def cmd_solve(config: ExperimentConfig) -> int:
    """Picard iteration from v0 = 2 U^nu; trace CSV plus JSON report."""
    preflight(config, 'solve')
    params = config.params
    meas = config.measure_model()
    cfg = config.solver_config()

    report = picard_iterate(meas, params, cfg)
    payload: Dict[str, Any] = {
        'params': _params_dict(config),
        'measure': meas,
        'solver': {
            'R': cfg.R,
            'tol': cfg.tol,
            'max_iter': cfg.max_iter,
            'blowup_threshold': cfg.blowup_threshold,
            'n_nodes': cfg.solver_grid().n_nodes,
        },
        'report': report.summary(),
    }

    if report.converged:
        grid = report.trace.grid
        r = grid.nodes
        envelope = report.envelope_constant * (1.0 + r) ** (1.0 - params.k)
        frame = pd.DataFrame(
            {
                'r': r,
                'v': report.trace.values,
                'envelope': envelope,
                'u_nu': green_trace(meas, grid).values,
            }
        )
        ResultFileProcessor.write_csv(frame, 'solve_trace.csv', columns=['r', 'v', 'envelope', 'u_nu'])
        if params.lam > 0 and not cfg.truncated:
            payload['lower_bound'] = {
                **lower_bound_report(report.trace, params)._asdict(),
                'fitted_holds': lower_bound_check(report.trace, params),
            }

    ResultFileProcessor.write_json(payload, 'solve_report.json')
    _print_table(
        {
            'status': report.status.value,
            'lambda': report.lam,
            'iterations': report.iterations,
            'A': report.munu_bound,
            'M': report.envelope_constant,
            'residual': report.final_residual,
        }
    )
    if report.status == IterationStatus.CONVERGED:
        return EXIT_OK
    return EXIT_NOT_CONVERGED


def cmd_lambda_star(config: ExperimentConfig) -> int:
    """Bisect the convergence threshold of the coupling."""
    preflight(config, 'lambda-star')
    params = config.params
    meas = config.measure_model()
    cfg = config.solver_config()
    section = config.lambda_star

    constants = None
    if section.invariance_bound:
        constants = empirical_constants(params, grid=config.grid())

    try:
        estimate = lambda_star_estimate(
            meas, params, cfg, section.bracket, rel_width=section.rel_width, constants=constants
        )
    except BracketError as e:
        logger.error('%s', e)
        ResultFileProcessor.write_json(
            {
                'params': _params_dict(config),
                'status': 'error',
                'error': str(e),
                'initial_bracket': section.bracket,
                'verdicts': e.verdicts,
            },
            'lambda_star.json',
        )
        return EXIT_REJECTED

    payload = {
        'params': _params_dict(config),
        'status': 'success',
        'lambda_hat': estimate.lambda_hat,
        'bracket': estimate.bracket,
        'initial_bracket': estimate.initial_bracket,
        'evaluations': estimate.evaluations,
        'A': check_munu_bound(meas, params.k, cfg.solver_grid()),
        'converging_run': estimate.converging_report.summary(),
        'failing_run': estimate.failing_report.summary(),
        'invariance_bound': estimate.invariance_bound,
    }
    if constants is not None:
        payload['C1'] = constants.c1
        payload['C2'] = constants.c2
    ResultFileProcessor.write_json(payload, 'lambda_star.json')
    _print_table(
        {
            'lambda_hat': estimate.lambda_hat,
            'bracket': f'[{estimate.bracket[0]:.6g}, {estimate.bracket[1]:.6g}]',
            'runs': estimate.evaluations,
            'invariance_bound': estimate.invariance_bound,
        }
    )
    return EXIT_OK


def cmd_bootstrap(config: ExperimentConfig) -> int:
    """Exact-rational bootstrap recurrence with its verdict."""
    preflight(config, 'bootstrap')
    trace = bootstrap_sequence(config.params, n_max=config.bootstrap.n_max)

    frame = pd.DataFrame(
        {
            'n': range(len(trace.gamma_seq)),
            'gamma': trace.as_floats(),
            'gamma_exact': [str(g) for g in trace.gamma_seq],
        }
    )
    ResultFileProcessor.write_csv(frame, 'bootstrap.csv', columns=['n', 'gamma', 'gamma_exact'])
    ResultFileProcessor.write_json(
        {
            'params': _params_dict(config),
            'gamma_seq': trace.gamma_seq,
            'stop_index': trace.stop_index,
            'verdict': trace.verdict.label(),
            'limit': trace.limit.label(),
        },
        'bootstrap.json',
    )
    _print_table(
        {
            'terms': len(trace.gamma_seq),
            'stop_index': trace.stop_index,
            'verdict': trace.verdict.label(),
            'limit': trace.limit.label(),
        }
    )
    return EXIT_OK


def run_command(config: ExperimentConfig, command: str, target: str = '') -> int:
    """Dispatch a subcommand; regime and parameter rejections map to exit code 2."""
    try:
        if command == 'exponents':
            return cmd_exponents(config)
        if command == 'verify':
            return cmd_verify(config, target)
        if command == 'solve':
            return cmd_solve(config)
        if command == 'lambda-star':
            return cmd_lambda_star(config)
        if command == 'bootstrap':
            return cmd_bootstrap(config)
    except (ConfigError, ParameterError, RegimeError) as e:
        logger.error('%s: %s', type(e).__name__, e)
        return EXIT_REJECTED
    except LabError as e:
        logger.error('%s: %s', type(e).__name__, e)
        return EXIT_CHECK_FAILED
    raise ValueError(f'unknown command {command!r}')
