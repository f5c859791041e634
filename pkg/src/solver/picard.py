"""Picard iteration for the boundary trace of the nonlocal Neumann problem.

Starting from the trace of the Green potential of the measure, the iteration
v_{n+1} = T v_n is nondecreasing because T has a positive kernel and an
increasing nonlinearity. It either settles on a fixed point inside the
envelope M (1 + r)^{1-k} or leaves it, which is taken as divergence.
"""

import logging
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.core.errors import ParameterError
from src.core.params import ProblemParams
from src.operators.kernel_matrix import composed_kernel_matrix, truncated_double_kernel_matrix
from src.operators.radial_fn import OriginLaw, RadialFn
from src.operators.riesz import composed_constant, coupling_constant
from src.solutions.residual import fixed_point_residual
from src.solver.config import SolverConfig
from src.solver.measure import SphereMeasure, check_munu_bound, green_trace

logger = logging.getLogger(__name__)

RELATIVE_FLOOR = 1e-300


class IterationStatus(str, Enum):
    CONVERGED = 'Converged'
    DIVERGED = 'Diverged'
    STALLED = 'Stalled'


class IterationReport(BaseModel):
    """Outcome of one Picard run."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    status: IterationStatus
    lam: float
    iterations: int
    trace: Optional[RadialFn] = Field(default=None, description='Converged trace')
    final_residual: Optional[float] = None
    sup_value: Optional[float] = Field(default=None, description='sup v at divergence')
    divergence_reason: Optional[str] = None
    residual_history: List[float] = Field(default_factory=list)
    envelope_ok: List[bool] = Field(default_factory=list, description='Per iterate, v_0 first')
    monotone_ok: bool = True
    munu_bound: float = Field(..., description='A of the measure')
    envelope_constant: float = Field(..., description='M of the envelope')
    certificate_residual: Optional[float] = Field(
        default=None, description='sup |Tv - v| / v by pointwise quadrature at the certificate radii'
    )

    @property
    def converged(self) -> bool:
        return self.status == IterationStatus.CONVERGED

    def summary(self) -> Dict[str, Any]:
        """JSON-ready view without the trace samples."""
        return {
            'status': self.status.value,
            'lambda': self.lam,
            'iterations': self.iterations,
            'final_residual': self.final_residual,
            'sup_value': self.sup_value,
            'divergence_reason': self.divergence_reason,
            'residual_history': list(self.residual_history),
            'envelope_ok': list(self.envelope_ok),
            'monotone_ok': self.monotone_ok,
            'A': self.munu_bound,
            'M': self.envelope_constant,
            'certificate_residual': self.certificate_residual,
        }


class PicardOperator:
    """Discrete T on the solver grid.

    With R = inf the nonlinear term is the composed boundary operator
    K C(N,1,k) I_{N-k}(v^p); with finite R (N = 3) it is the truncated double
    integral K Int_{B'_R} Int_{B'_R} |x'-y'|^{-(N-2)} |y'-z'|^{-k} v(z')^p.
    Kernel matrices are assembled once per grid and reused.
    """

    def __init__(self, meas: SphereMeasure, params: ProblemParams, cfg: SolverConfig):
        if meas.N != params.N:
            raise ParameterError(f'measure dimension {meas.N} != N={params.N}')
        self.meas = meas
        self.params = params
        self.cfg = cfg
        self.grid = cfg.solver_grid()
        self.source_trace = green_trace(meas, self.grid)
        self.source = np.array(self.source_trace.values)

        if params.lam == 0:
            self.constant = 0.0
            self.matrix = None
        elif cfg.truncated:
            self.constant = coupling_constant(params)
            self.matrix = truncated_double_kernel_matrix(params, self.grid)
        else:
            self.constant = composed_constant(params)
            self.matrix = composed_kernel_matrix(params, self.grid)

    def apply_values(self, values: np.ndarray) -> np.ndarray:
        if self.matrix is None:
            return self.source.copy()
        powered = np.where(values > 0, np.abs(values) ** self.params.p, 0.0)
        return self.source + self.constant * (self.matrix @ powered)

    def as_trace(self, values: np.ndarray) -> RadialFn:
        return RadialFn.from_values(
            self.grid, values, origin_law=OriginLaw.finite(float(values[0]))
        )

    def apply(self, v: RadialFn) -> RadialFn:
        values = v.values if v.grid == self.grid else v(self.grid.nodes)
        return self.as_trace(self.apply_values(np.asarray(values)))


def T_operator(
    v: RadialFn, meas: SphereMeasure, params: ProblemParams, cfg: SolverConfig
) -> RadialFn:
    """Boundary trace of T v: U^nu trace plus the discrete nonlinear term."""
    return PicardOperator(meas, params, cfg).apply(v)


def _relative_change(new: np.ndarray, old: np.ndarray) -> float:
    return float(np.max(np.abs(new - old) / np.maximum(np.abs(new), RELATIVE_FLOOR)))


def picard_iterate(
    meas: SphereMeasure,
    params: ProblemParams,
    cfg: SolverConfig,
    operator: Optional[PicardOperator] = None,
) -> IterationReport:
    """Iterate v_{n+1} = T v_n from v_0 = U^nu trace.

    Args:
        meas (SphereMeasure): Source measure.
        params (ProblemParams): Problem parameters, 1 < k < N - 1.
        cfg (SolverConfig): Iteration settings.
        operator (Optional[PicardOperator]): Prebuilt operator for these inputs.

    Returns:
        IterationReport: Converged, Diverged (blow-up, non-finite value or
            envelope exit) or Stalled after max_iter steps.
    """
    op = operator or PicardOperator(meas, params, cfg)
    grid = op.grid
    A = check_munu_bound(meas, params.k, grid)
    M = cfg.envelope_constant(A)
    envelope = M * (1.0 + grid.nodes) ** (1.0 - params.k)

    v = op.source.copy()
    history: List[float] = []
    envelope_flags = [bool(np.all(v <= envelope))]
    monotone = True
    common = {'lam': params.lam, 'munu_bound': A, 'envelope_constant': M}
    logger.info(
        'picard start: lambda=%g, R=%g, %d nodes, A=%.6g, M=%.6g',
        params.lam,
        cfg.R,
        grid.n_nodes,
        A,
        M,
    )

    for iteration in range(1, cfg.max_iter + 1):
        following = op.apply_values(v)
        sup_value = float(np.max(following))
        if not np.all(np.isfinite(following)) or sup_value >= cfg.blowup_threshold:
            logger.info('picard diverged at iteration %d: sup %g', iteration, sup_value)
            return IterationReport(
                status=IterationStatus.DIVERGED,
                iterations=iteration,
                sup_value=sup_value,
                divergence_reason='blowup',
                residual_history=history,
                envelope_ok=envelope_flags,
                monotone_ok=monotone,
                **common,
            )

        change = _relative_change(following, v)
        history.append(change)
        slack = cfg.monotone_slack * np.maximum(np.abs(following), np.abs(v))
        monotone = monotone and bool(np.all(following >= v - slack))
        inside = bool(np.all(following <= envelope))
        envelope_flags.append(inside)
        logger.debug('picard iteration %d: change %.3e, sup %.6g', iteration, change, sup_value)
        v = following

        if not inside:
            logger.info('picard left the envelope at iteration %d', iteration)
            return IterationReport(
                status=IterationStatus.DIVERGED,
                iterations=iteration,
                sup_value=sup_value,
                divergence_reason='envelope',
                residual_history=history,
                envelope_ok=envelope_flags,
                monotone_ok=monotone,
                **common,
            )

        if change <= cfg.tol:
            trace = op.as_trace(v)
            certificate = fixed_point_residual(
                trace,
                params,
                cfg.certificate_points(),
                source=op.source_trace,
                R=cfg.R,
            ).sup_rel_residual
            logger.info(
                'picard converged in %d iterations (residual %.3e, certificate %.3e)',
                iteration,
                change,
                certificate,
            )
            if certificate > 2.0 * cfg.tol:
                logger.warning(
                    'pointwise fixed point residual %.3e exceeds 2 tol=%.3e; refine the grid',
                    certificate,
                    2.0 * cfg.tol,
                )
            return IterationReport(
                status=IterationStatus.CONVERGED,
                iterations=iteration,
                trace=trace,
                final_residual=change,
                residual_history=history,
                envelope_ok=envelope_flags,
                monotone_ok=monotone,
                certificate_residual=certificate,
                **common,
            )

    logger.warning('picard stalled after %d iterations (last change %.3e)', cfg.max_iter, history[-1])
    return IterationReport(
        status=IterationStatus.STALLED,
        iterations=cfg.max_iter,
        residual_history=history,
        envelope_ok=envelope_flags,
        monotone_ok=monotone,
        **common,
    )
