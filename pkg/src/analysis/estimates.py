import logging
import math
from typing import Iterable, List, NamedTuple, Optional, Tuple

import numpy as np

from src.core.errors import ParameterError
from src.core.params import ProblemParams, critical_exponents
from src.operators.riesz import radial_profile_potential
from src.quadrature.adaptive import DEFAULT_TOL
from src.quadrature.grid import RadialGrid

logger = logging.getLogger(__name__)

Point = Tuple[float, float]


class SupRatio(NamedTuple):
    sup_ratio: float
    argmax: object


class EmpiricalConstants(NamedTuple):
    c1: float
    c2: float


def _check_stan1_window(k: float, beta: float, N: int) -> None:
    if not 1 < k:
        raise ParameterError(f'1 < k violated: k={k}')
    if not k < N - 1:
        raise ParameterError(f'k < N - 1 violated: k={k}, N - 1={N - 1}')
    if not N - 1 < beta:
        raise ParameterError(f'N - 1 < beta violated: beta={beta}, N - 1={N - 1}')


def stan1_lhs(k: float, beta: float, N: int, r: float, tol: float = DEFAULT_TOL) -> float:
    """Int |y' - z'|^{-k} (1 + |z'|)^{-beta} dz' over R^{N-1} at |y'| = r."""
    d = N - 1

    def profile(s: float) -> float:
        return (1.0 + s) ** (-beta)

    return radial_profile_potential(profile, d, k, r, breakpoints=[1.0], tol=tol)


def verify_estimate_stan1(
    k: float, beta: float, N: int, y_grid: RadialGrid, tol: float = DEFAULT_TOL
) -> SupRatio:
    """Sup over |y'| in {0} and the grid of LHS(y') (1 + |y'|)^k.

    Args:
        k (float): Kernel exponent, 1 < k < N - 1.
        beta (float): Decay of the density, beta > N - 1.
        N (int): Dimension.
        y_grid (RadialGrid): Radii of the sweep.
        tol (float): Quadrature tolerance.

    Returns:
        SupRatio: Largest ratio and the radius where it is attained.
    """
    _check_stan1_window(k, beta, N)
    radii = [0.0] + y_grid.nodes.tolist()
    ratios = [stan1_lhs(k, beta, N, r, tol=tol) * (1.0 + r) ** k for r in radii]
    index = int(np.argmax(ratios))
    logger.info(
        'stan1 sweep (k=%g, beta=%g, N=%d, %d radii): sup %.8g at r=%g',
        k,
        beta,
        N,
        len(radii),
        ratios[index],
        radii[index],
    )
    return SupRatio(sup_ratio=float(ratios[index]), argmax=radii[index])


def stan6_lhs(k: float, N: int, x: Point, tol: float = DEFAULT_TOL) -> float:
    """Int |x - (y', 0)|^{-(N-2)} (1 + |y'|)^{-k} dy' at x = (r', x_N)."""
    d = N - 1

    def profile(s: float) -> float:
        return (1.0 + s) ** (-k)

    r_prime, x_n = float(x[0]), abs(float(x[1]))
    return radial_profile_potential(
        profile, d, float(N - 2), r_prime, height=x_n, breakpoints=[1.0], tol=tol
    )


def stan6_samples(grid: RadialGrid) -> List[Point]:
    """Boundary, axis and diagonal points at the grid radii, plus the origin."""
    samples: List[Point] = [(0.0, 0.0)]
    for radius in grid.nodes.tolist():
        samples.append((radius, 0.0))
        samples.append((0.0, radius))
        samples.append((radius / math.sqrt(2.0), radius / math.sqrt(2.0)))
    return samples


def verify_estimate_stan6(
    k: float, N: int, x_samples: Iterable[Point], tol: float = DEFAULT_TOL
) -> SupRatio:
    """Sup over the samples of LHS(x) (1 + |x|)^{k-1}.

    Args:
        k (float): Decay exponent, 1 < k < N - 1.
        N (int): Dimension.
        x_samples (Iterable[Point]): Points (r', x_N) on and off the boundary.
        tol (float): Quadrature tolerance.

    Returns:
        SupRatio: Largest ratio and the point where it is attained.
    """
    if not 1 < k < N - 1:
        raise ParameterError(f'1 < k < N - 1 violated: k={k}, N - 1={N - 1}')
    points = [(float(x[0]), float(x[1])) for x in x_samples]
    if not points:
        raise ParameterError('verify_estimate_stan6 needs at least one sample')
    ratios = [
        stan6_lhs(k, N, x, tol=tol) * (1.0 + math.hypot(x[0], x[1])) ** (k - 1.0)
        for x in points
    ]
    index = int(np.argmax(ratios))
    logger.info(
        'stan6 sweep (k=%g, N=%d, %d points): sup %.8g at %s',
        k,
        N,
        len(points),
        ratios[index],
        points[index],
    )
    return SupRatio(sup_ratio=float(ratios[index]), argmax=points[index])


def empirical_constants(
    params: ProblemParams, grid: Optional[RadialGrid] = None, tol: float = DEFAULT_TOL
) -> EmpiricalConstants:
    """Fitted constants of the two kernel estimates used by the fixed-point construction.

    C1 bounds Int |y'-z'|^{-k} (1+|z'|)^{-p(k-1)} dz' against (1+|y'|)^{-k};
    C2 bounds the lifting of (1+|y'|)^{-k} against (1+|x|)^{1-k}.
    """
    p_star, _ = critical_exponents(params)
    if not params.p > p_star:
        raise ParameterError(
            f'empirical constants need p > p* = {p_star} so that p(k-1) > N-1'
        )
    grid = grid or RadialGrid()
    c1 = verify_estimate_stan1(
        params.k, params.p * (params.k - 1.0), params.N, grid, tol=tol
    ).sup_ratio
    c2 = verify_estimate_stan6(params.k, params.N, stan6_samples(grid), tol=tol).sup_ratio
    return EmpiricalConstants(c1=c1, c2=c2)
