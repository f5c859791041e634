import logging
import math
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import special

from src.core.errors import ParameterError, RegimeError, SingularityError
from src.core.params import ProblemParams, critical_exponents, is_critical
from src.operators.radial_fn import RadialFn
from src.operators.riesz import coupling_constant, lifting_J
from src.quadrature.adaptive import DEFAULT_TOL
from src.quadrature.grid import RadialGrid
from src.special.functions import riesz_composition_constant, sphere_area

logger = logging.getLogger(__name__)


class ExactSolution(BaseModel):
    """Supercritical solution with power-law trace c r^{-tau}, tau = (N - k)/(p - 1).

    The interior is u(x) = C J_1(|y'|^{-(1+tau)})(x) with C = c / C(N, 1, 1 + tau).
    """

    model_config = ConfigDict(frozen=True)

    params: ProblemParams
    trace_coeff: float = Field(..., gt=0, description='c of the trace c r^-tau')
    trace_exp: float = Field(..., gt=0, description='tau = (N - k)/(p - 1)')
    interior_coeff: float = Field(..., gt=0, description='C of the interior formula')

    @model_validator(mode='after')
    def _check_consistency(self) -> 'ExactSolution':
        params = self.params
        p_star, _ = critical_exponents(params)
        if not params.p > p_star or is_critical(params.p, p_star):
            raise RegimeError(f'exact solution needs p > p* = {p_star}, got p={params.p}')
        tau = (params.N - params.k) / (params.p - 1.0)
        if not math.isclose(self.trace_exp, tau, rel_tol=1e-12):
            raise ParameterError(f'trace exponent {self.trace_exp} != (N-k)/(p-1) = {tau}')
        expected = self.trace_coeff / riesz_composition_constant(params.N, 1.0, 1.0 + tau).value
        if not math.isclose(self.interior_coeff, expected, rel_tol=1e-12):
            raise ParameterError(
                f'interior coefficient {self.interior_coeff} != c / C(N,1,1+tau) = {expected}'
            )
        return self

    def trace(self, grid: RadialGrid) -> RadialFn:
        return RadialFn.power(self.trace_coeff, self.trace_exp, grid)

    def trace_at(self, r: float) -> float:
        return self.trace_coeff * r ** (-self.trace_exp)


def composition_windows(params: ProblemParams) -> Tuple[bool, bool]:
    """Both windows used by the exact construction.

    Returns:
        Tuple[bool, bool]: (0 < 1 < k < N - 1, 0 < N - k < p tau < N - 1).
    """
    tau = (params.N - params.k) / (params.p - 1.0)
    first = 1.0 < params.k < params.N - 1
    second = 0 < params.N - params.k < params.p * tau < params.N - 1
    return first, second


def build_exact_solution(params: ProblemParams) -> ExactSolution:
    """Build the exact power-law solution for p > p*.

    Applying the composition identity twice to the boundary equation gives
    c^{p-1} = [K C(N,1,k) C(N, N-k, p tau)]^{-1} with K = 2 lambda/((N-2) sigma_N).

    Args:
        params (ProblemParams): k > 1, p > p*, lambda > 0.

    Returns:
        ExactSolution: Trace and interior constants.
    """
    p_star, _ = critical_exponents(params)
    if not params.p > p_star or is_critical(params.p, p_star):
        raise RegimeError(
            f'no exact power solution for p={params.p} <= p* = {p_star} '
            '(nonexistence regime)'
        )
    if not params.lam > 0:
        raise ParameterError('exact solution needs lambda > 0')

    first, second = composition_windows(params)
    if not (first and second):
        raise RegimeError(
            f'composition windows fail for {params}: windows=({first}, {second})'
        )

    tau = (params.N - params.k) / (params.p - 1.0)
    outer = riesz_composition_constant(params.N, 1.0, params.k).value
    inner = riesz_composition_constant(params.N, params.N - params.k, params.p * tau).value
    c = (coupling_constant(params) * outer * inner) ** (-1.0 / (params.p - 1.0))
    interior = c / riesz_composition_constant(params.N, 1.0, 1.0 + tau).value

    logger.info('exact solution: tau=%.12g, c=%.12g, C=%.12g', tau, c, interior)
    return ExactSolution(
        params=params, trace_coeff=c, trace_exp=tau, interior_coeff=interior
    )


def exact_interior(
    sol: ExactSolution,
    x: Tuple[float, float],
    grid: RadialGrid = RadialGrid(),
    tol: float = DEFAULT_TOL,
) -> float:
    """Interior value C J_1(|y'|^{-(1+tau)})(x) at x = (r', x_N)."""
    r_prime, x_n = float(x[0]), float(x[1])
    if r_prime == 0.0 and x_n == 0.0:
        raise SingularityError('exact solution is singular at the origin')
    density = RadialFn.power(1.0, 1.0 + sol.trace_exp, grid)
    return sol.interior_coeff * lifting_J(density, 1.0, sol.params, (r_prime, x_n), tol=tol)


def exact_interior_on_axis(sol: ExactSolution, height: float) -> float:
    """Closed form of the interior on the x_N axis.

    u(0, h) = C sigma_{N-1} h^{-tau} B((N-2-tau)/2, tau/2) / 2
    """
    if not height > 0:
        raise ParameterError(f'height must be > 0, got {height}')
    N, tau = sol.params.N, sol.trace_exp
    beta_value = special.beta((N - 2 - tau) / 2.0, tau / 2.0)
    return (
        sol.interior_coeff
        * sphere_area(N - 1)
        * height ** (-tau)
        * 0.5
        * beta_value
    )
