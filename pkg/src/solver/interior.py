import logging
from typing import Optional, Sequence, Tuple

from src.analysis.holder import AnalysisConfig, HolderReport, PointPair, holder_check
from src.core.errors import ParameterError
from src.core.params import ProblemParams
from src.operators.radial_fn import RadialFn
from src.operators.riesz import boundary_operator_H, coupling_constant, lifting_J
from src.quadrature.adaptive import DEFAULT_TOL
from src.solver.measure import SphereMeasure, green_potential_cylindrical

logger = logging.getLogger(__name__)


class InteriorReconstructor:
    """Evaluates u(x) = U^nu(x) + K J_1(H_v)(x) from a boundary trace v.

    H_v is computed once on the trace grid and reused for every point.
    """

    def __init__(
        self,
        trace: RadialFn,
        meas: SphereMeasure,
        params: ProblemParams,
        tol: float = DEFAULT_TOL,
    ):
        self.trace = trace
        self.meas = meas
        self.params = params
        self.tol = tol
        self.coupling = coupling_constant(params)
        if params.lam == 0:
            self.density = RadialFn.zeros(trace.grid, tail_exp=float(params.k))
        else:
            self.density = boundary_operator_H(trace, params, tol=tol)
        logger.debug('interior reconstructor ready on %d nodes', trace.grid.n_nodes)

    def nonlinear_part(self, x: Tuple[float, float]) -> float:
        """K J_1(H_v)(x), the part of u beyond the Green potential."""
        return self.coupling * lifting_J(self.density, 1.0, self.params, x, tol=self.tol)

    def __call__(self, x: Tuple[float, float]) -> float:
        r_prime, x_n = float(x[0]), float(x[1])
        if x_n < 0:
            raise ParameterError(f'interior point needs x_N >= 0, got {x_n}')
        source = green_potential_cylindrical(self.meas, r_prime, x_n)
        return float(source) + self.nonlinear_part((r_prime, x_n))

    def nonlinear_holder(
        self, pairs: Sequence[PointPair], s: Optional[float] = None
    ) -> HolderReport:
        """Hoelder check of u - U^nu with the exponent pack of the construction."""
        pack = AnalysisConfig.solver_pack(self.params, s)
        return holder_check(
            self.density.scaled(self.coupling), 1.0, pack.q, self.params, pairs
        )


def reconstruct_interior(
    trace: RadialFn,
    meas: SphereMeasure,
    params: ProblemParams,
    x: Tuple[float, float],
    tol: float = DEFAULT_TOL,
) -> float:
    """Interior value u(x) at x = (r', x_N) from a converged trace.

    Args:
        trace (RadialFn): Converged boundary trace.
        meas (SphereMeasure): Source measure.
        params (ProblemParams): Problem parameters.
        x (Tuple[float, float]): Target point in the closed upper half space.
        tol (float): Quadrature tolerance.

    Returns:
        float: Green potential of the measure plus the lifted nonlinear term.
    """
    return InteriorReconstructor(trace, meas, params, tol=tol)(x)
