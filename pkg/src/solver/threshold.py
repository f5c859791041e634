import logging
import math
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from src.analysis.estimates import EmpiricalConstants
from src.core.errors import BracketError, ParameterError
from src.core.params import ProblemParams
from src.solver.config import SolverConfig
from src.solver.measure import SphereMeasure
from src.solver.picard import IterationReport, IterationStatus, picard_iterate
from src.special.functions import sphere_area

logger = logging.getLogger(__name__)

DEFAULT_REL_WIDTH = 1e-2


class LambdaStarEstimate(BaseModel):
    """Bisected convergence threshold of the Picard iteration in lambda."""

    model_config = ConfigDict(frozen=True)

    lambda_hat: float = Field(..., gt=0, description='Geometric midpoint of the final bracket')
    bracket: Tuple[float, float] = Field(..., description='Final (converging, non-converging) pair')
    initial_bracket: Tuple[float, float]
    evaluations: int
    converging_report: IterationReport
    failing_report: IterationReport
    invariance_bound: Optional[float] = Field(
        default=None, description='Empirical (N-2) sigma_N (M-A) / (2 C1 C2 M^p)'
    )


def invariance_lambda_bound(
    params: ProblemParams, A: float, M: float, constants: EmpiricalConstants
) -> float:
    """Coupling below which T maps the envelope set into itself, with fitted C1, C2."""
    if not M > A:
        raise ParameterError(f'M > A violated: M={M}, A={A}')
    return (
        (params.N - 2)
        * sphere_area(params.N)
        * (M - A)
        / (2.0 * constants.c1 * constants.c2 * M**params.p)
    )


def lambda_star_estimate(
    meas: SphereMeasure,
    params: ProblemParams,
    cfg: SolverConfig,
    bracket: Tuple[float, float],
    rel_width: float = DEFAULT_REL_WIDTH,
    constants: Optional[EmpiricalConstants] = None,
) -> LambdaStarEstimate:
    """Geometric bisection of the coupling between convergence and failure.

    Args:
        meas (SphereMeasure): Source measure.
        params (ProblemParams): Parameters; lambda is overridden.
        cfg (SolverConfig): Iteration settings shared by every run.
        bracket (Tuple[float, float]): (lambda_lo, lambda_hi) with 0 < lo < hi.
        rel_width (float): Stop once hi / lo - 1 <= rel_width.
        constants (Optional[EmpiricalConstants]): Fitted C1, C2 for the
            envelope-invariance bound, reported next to the estimate.

    Returns:
        LambdaStarEstimate: lambda_hat and the witnessing reports.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not 0 < lo < hi:
        raise BracketError(
            f'0 < lambda_lo < lambda_hi violated: bracket=({lo}, {hi})',
            {'lambda_lo': None, 'lambda_hi': None},
        )
    if not rel_width > 0:
        raise ParameterError(f'rel_width must be > 0, got {rel_width}')

    low_report = picard_iterate(meas, params.with_lambda(lo), cfg)
    high_report = picard_iterate(meas, params.with_lambda(hi), cfg)
    evaluations = 2
    if not low_report.converged or high_report.converged:
        verdicts = {
            'lambda_lo': low_report.status.value,
            'lambda_hi': high_report.status.value,
        }
        raise BracketError(
            f'invalid bracket ({lo:g}, {hi:g}): lambda_lo gives {verdicts["lambda_lo"]}, '
            f'lambda_hi gives {verdicts["lambda_hi"]}',
            verdicts,
        )

    while hi / lo - 1.0 > rel_width:
        mid = math.sqrt(lo * hi)
        report = picard_iterate(meas, params.with_lambda(mid), cfg)
        evaluations += 1
        # stalled runs count as not converged
        if report.status == IterationStatus.CONVERGED:
            lo, low_report = mid, report
        else:
            hi, high_report = mid, report
        logger.debug('lambda bisection: [%.6g, %.6g]', lo, hi)

    invariance = None
    if constants is not None:
        invariance = invariance_lambda_bound(
            params, low_report.munu_bound, low_report.envelope_constant, constants
        )

    lambda_hat = math.sqrt(lo * hi)
    logger.info(
        'lambda_hat=%.6g after %d runs (bracket [%.6g, %.6g])', lambda_hat, evaluations, lo, hi
    )
    return LambdaStarEstimate(
        lambda_hat=lambda_hat,
        bracket=(lo, hi),
        initial_bracket=(float(bracket[0]), float(bracket[1])),
        evaluations=evaluations,
        converging_report=low_report,
        failing_report=high_report,
        invariance_bound=invariance,
    )
