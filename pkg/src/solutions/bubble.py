import logging
import math
from fractions import Fraction
from typing import Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.errors import ParameterError, RegimeError
from src.core.params import ProblemParams, critical_exponents, is_critical
from src.operators.radial_fn import OriginLaw, RadialFn
from src.operators.riesz import (
    composed_constant,
    coupling_constant,
    lifting_J,
    riesz_potential_radial,
)
from src.quadrature.adaptive import DEFAULT_TOL, adaptive_integrate
from src.quadrature.grid import RadialGrid
from src.special.functions import sphere_area

logger = logging.getLogger(__name__)

# Fine enough that log-log interpolation of the profile stays below 1e-4.
BUBBLE_GRID = RadialGrid(r_min=1e-4, r_max=1e4, n_nodes=601)
INTERIOR_GRID = RadialGrid(r_min=1e-3, r_max=1e3, n_nodes=121)


def bubble_exponent_identity(N: int, k: Union[Fraction, int]) -> bool:
    """(k - 1)/2 * p** == N - (k + 1)/2 in exact rational arithmetic."""
    k = Fraction(k)
    p_star_star = 2 * Fraction(N - 1) / (k - 1) - 1
    return (k - 1) / 2 * p_star_star == N - (k + 1) / 2


class BubbleSolution(BaseModel):
    """Critical bubble with trace c (t / (t^2 + |x' - zeta'|^2))^{(k-1)/2}."""

    model_config = ConfigDict(frozen=True)

    params: ProblemParams
    t: float = Field(..., gt=0, description='Bubble scale')
    zeta_offset: float = Field(default=0.0, ge=0, description="|zeta'| along e1")
    trace_coeff: float = Field(..., gt=0)

    @model_validator(mode='after')
    def _check_critical(self) -> 'BubbleSolution':
        _, p_star_star = critical_exponents(self.params)
        if not is_critical(self.params.p, p_star_star):
            raise RegimeError(
                f'bubbles exist only at p = p** = {p_star_star}, got p={self.params.p}'
            )
        return self

    @property
    def profile_exp(self) -> float:
        return 0.5 * (self.params.k - 1.0)

    def _distance(self, x_prime: Union[float, Sequence[float]]) -> float:
        if np.ndim(x_prime) == 0:
            if self.zeta_offset != 0.0:
                raise ParameterError('off-center bubble needs a point x\', not a radius')
            return abs(float(x_prime))
        point = np.array(x_prime, dtype=float)
        point[0] -= self.zeta_offset
        return float(np.linalg.norm(point))

    def profile(self, dist):
        dist = np.asarray(dist, dtype=float)
        return self.trace_coeff * (self.t / (self.t**2 + dist**2)) ** self.profile_exp

    def trace_at(self, x_prime: Union[float, Sequence[float]]) -> float:
        return float(self.profile(self._distance(x_prime)))

    def trace(self, grid: RadialGrid = BUBBLE_GRID) -> RadialFn:
        """Radial trace; only defined for a bubble centred at the origin."""
        if self.zeta_offset != 0.0:
            raise ParameterError('off-center bubble has no radial representation')
        return RadialFn.from_values(
            grid,
            self.profile(grid.nodes),
            tail_exp=self.params.k - 1.0,
            origin_law=OriginLaw.finite(float(self.profile(0.0))),
        )


def bubble_collocation_integral(params: ProblemParams, t: float, tol: float = DEFAULT_TOL) -> float:
    """Int (t / (t^2 + |z'|^2))^{N-(k+1)/2} |z'|^{-(k-1)} dz' over R^{N-1}."""
    d = params.d
    exponent = params.N - 0.5 * (params.k + 1.0)
    power = d - params.k

    def integrand(s: float) -> float:
        return (t / (t * t + s * s)) ** exponent * s**power

    result = adaptive_integrate(integrand, 0.0, math.inf, tol=tol, breakpoints=[t])
    return sphere_area(d) * result.value


def build_bubble(
    params: ProblemParams, t: float, zeta_offset: float = 0.0, tol: float = DEFAULT_TOL
) -> BubbleSolution:
    """Bubble constant c from the boundary equation collocated at x' = zeta'.

    Args:
        params (ProblemParams): k > 1, p = p**, lambda > 0.
        t (float): Bubble scale.
        zeta_offset (float): Distance of the centre from the origin.
        tol (float): Tolerance of the collocation integral.

    Returns:
        BubbleSolution: Bubble with its trace coefficient.
    """
    _, p_star_star = critical_exponents(params)
    if not is_critical(params.p, p_star_star):
        raise RegimeError(
            f'bubble needs p = p** = {p_star_star} (critical regular case), got p={params.p}'
        )
    if not t > 0:
        raise ParameterError(f'bubble scale t > 0 required, got {t}')
    if not params.lam > 0:
        raise ParameterError('bubble needs lambda > 0')

    half = 0.5 * (params.k - 1.0)
    integral = bubble_collocation_integral(params, t, tol=tol)
    c = (t ** (-half) / (composed_constant(params) * integral)) ** (1.0 / (params.p - 1.0))
    logger.info('bubble t=%g: collocation integral %.12g, c=%.12g', t, integral, c)
    return BubbleSolution(params=params, t=t, zeta_offset=zeta_offset, trace_coeff=c)


def bubble_interior(
    sol: BubbleSolution,
    x_prime: Union[float, Sequence[float]],
    x_n: float,
    grid: RadialGrid = INTERIOR_GRID,
    tol: float = DEFAULT_TOL,
) -> float:
    """Interior value K J_1(I_{N-1-k}(v^p))(x) of the bubble, K = 2 lambda/((N-2) sigma_N).

    Off-center bubbles are evaluated through translation to the centred one.
    """
    centred = sol.model_copy(update={'zeta_offset': 0.0})
    dist = sol._distance(x_prime)
    params = sol.params
    density = riesz_potential_radial(
        centred.trace(grid).pow(params.p), params.N - 1 - params.k, params.d, tol=tol
    )
    return coupling_constant(params) * lifting_J(density, 1.0, params, (dist, x_n), tol=tol)
