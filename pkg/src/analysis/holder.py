import logging
import math
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.errors import ParameterError
from src.core.params import ProblemParams
from src.operators.radial_fn import RadialFn
from src.operators.riesz import lifting_J, riesz_potential_radial
from src.quadrature.adaptive import DEFAULT_TOL

logger = logging.getLogger(__name__)

Point = Tuple[float, float]
PointPair = Tuple[Point, Point]

HOLDER_TOL = 1e-11
EXPONENT_SLACK = 0.05


def hls_target_exponent(N: int, alpha: float, s: float) -> float:
    """q = (N-1) s / (N-1-alpha s)."""
    d = N - 1
    return d * s / (d - alpha * s)


class AnalysisConfig(BaseModel):
    """Exponent pack (s, q, alpha, gamma) of the HLS and lifting estimates."""

    model_config = ConfigDict(frozen=True)

    N: int = Field(..., ge=3)
    alpha: float = Field(..., gt=0, description='Order of the Riesz potential')
    s: float = Field(..., description='Source exponent of HLS')

    @model_validator(mode='after')
    def _check_window(self) -> 'AnalysisConfig':
        d = self.N - 1
        if not 1 < self.s:
            raise ParameterError(f'1 < s violated: s={self.s}')
        if not self.s < d / self.alpha:
            raise ParameterError(
                f's < (N-1)/alpha violated: s={self.s}, (N-1)/alpha={d / self.alpha}'
            )
        return self

    @property
    def q(self) -> float:
        return hls_target_exponent(self.N, self.alpha, self.s)

    @property
    def gamma(self) -> float:
        """Hoelder exponent alpha - (N-1)/q of the alpha-lifting."""
        return self.alpha - (self.N - 1) / self.q

    @property
    def lifted_gamma(self) -> float:
        """Hoelder exponent 1 - (N-1)/q of J_1 applied to an L^q function."""
        return 1.0 - (self.N - 1) / self.q

    @classmethod
    def solver_pack(cls, params: ProblemParams, s: Optional[float] = None) -> 'AnalysisConfig':
        """Pack used by the fixed-point construction: alpha = N-1-k and
        (N-1)/(N-k) < s < (N-1)/(N-k-1); s defaults to the window midpoint."""
        low, high = solver_window(params)
        if s is None:
            s = 0.5 * (low + high)
        if not low < s < high:
            raise ParameterError(
                f'(N-1)/(N-k) < s < (N-1)/(N-k-1) violated: s={s}, window=({low}, {high})'
            )
        return cls(N=params.N, alpha=params.N - 1 - params.k, s=s)


def solver_window(params: ProblemParams) -> Tuple[float, float]:
    d = params.N - 1
    return d / (params.N - params.k), d / (params.N - params.k - 1)


class HolderReport(NamedTuple):
    emp_const: float
    emp_exponent: float
    gamma: float
    passed: bool


def pair_ladder(
    center: Point,
    direction: Point = (1.0, 1.0),
    scales: Optional[Sequence[float]] = None,
) -> List[PointPair]:
    """Pairs (center, center + delta e) for a geometric ladder of delta.

    Points are (r', x_N) in one meridian half-plane; x_N may be negative.
    The default ladder spans four decades, delta = 1e-4 ... 1.
    """
    if scales is None:
        scales = np.geomspace(1e-4, 1.0, 9).tolist()
    norm = math.hypot(direction[0], direction[1])
    if norm == 0.0:
        raise ParameterError('pair ladder direction must be nonzero')
    e = (direction[0] / norm, direction[1] / norm)
    pairs = []
    for delta in scales:
        other = (center[0] + delta * e[0], center[1] + delta * e[1])
        if other[0] < 0:
            raise ParameterError(f'ladder leaves the half-plane r >= 0 at delta={delta}')
        pairs.append((center, other))
    return pairs


def straddling_pairs(r_prime: float, scales: Optional[Sequence[float]] = None) -> List[PointPair]:
    """Pairs joining (r', 0) on the boundary to (r', delta) above it."""
    return pair_ladder((r_prime, 0.0), direction=(0.0, 1.0), scales=scales)


def _distance(x: Point, z: Point) -> float:
    return math.hypot(x[0] - z[0], x[1] - z[1])


def _check_holder_window(f: RadialFn, alpha: float, q: float, N: int) -> float:
    d = N - 1
    if not alpha - 1 < d / q < alpha:
        raise ParameterError(
            f'alpha - 1 < (N-1)/q < alpha violated: alpha={alpha}, (N-1)/q={d / q}'
        )
    if not f.is_zero and f.tail_coeff > 0 and not f.tail_exp * q > d:
        raise ParameterError(
            f'f not in L^q: tail exponent {f.tail_exp} * q={q} must exceed N-1={d}'
        )
    return alpha - d / q


def holder_check(
    f: RadialFn,
    alpha: float,
    q: float,
    params: ProblemParams,
    pairs: Sequence[PointPair],
    tol: float = HOLDER_TOL,
) -> HolderReport:
    """Empirical Hoelder constant and exponent of J_alpha f on point pairs.

    Args:
        f (RadialFn): Radial boundary data in L^q.
        alpha (float): Order of the lifting.
        q (float): Integrability exponent, alpha - 1 < (N-1)/q < alpha.
        params (ProblemParams): Supplies N.
        pairs (Sequence[PointPair]): Pairs of points (r', x_N); x_N < 0 uses
            the even reflection of J_alpha f.
        tol (float): Quadrature tolerance per evaluation.

    Returns:
        HolderReport: Constant max |dJ| / |dx|^gamma, log-log slope of |dJ|
            against |dx| and the predicted gamma.
    """
    gamma = _check_holder_window(f, alpha, q, params.N)
    if not pairs:
        raise ParameterError('holder_check needs at least one pair')

    cache = {}

    def value(x: Point) -> float:
        key = (float(x[0]), abs(float(x[1])))
        if key not in cache:
            cache[key] = lifting_J(f, alpha, params, key, tol=tol)
        return cache[key]

    steps = []
    jumps = []
    for x, z in pairs:
        dist = _distance(x, z)
        if dist == 0.0:
            raise ParameterError(f'degenerate pair {x}, {z}')
        steps.append(dist)
        jumps.append(abs(value(x) - value(z)))

    steps_arr = np.array(steps)
    jumps_arr = np.array(jumps)
    emp_const = float(np.max(jumps_arr / steps_arr**gamma))

    live = jumps_arr > 0
    if np.count_nonzero(live) >= 2 and np.ptp(np.log(steps_arr[live])) > 0:
        slope = float(np.polyfit(np.log(steps_arr[live]), np.log(jumps_arr[live]), 1)[0])
    else:
        # constant function on the pairs: any exponent holds
        slope = math.inf

    passed = math.isfinite(emp_const) and slope >= gamma - EXPONENT_SLACK
    logger.info(
        'holder check alpha=%g q=%g: gamma=%.4g, const=%.6g, slope=%.4g',
        alpha,
        q,
        gamma,
        emp_const,
        slope,
    )
    return HolderReport(emp_const=emp_const, emp_exponent=slope, gamma=gamma, passed=passed)


def solver_pack_holder_check(
    g: RadialFn,
    params: ProblemParams,
    pairs: Sequence[PointPair],
    s: Optional[float] = None,
    tol: float = HOLDER_TOL,
) -> HolderReport:
    """Hoelder check of J_1(I_{N-1-k} g) with the solver exponent pack.

    g plays the role of v^p; it must lie in L^s with p (k - 1) s > N - 1
    read off its tail, and the pack must give q > N - 1.
    """
    pack = AnalysisConfig.solver_pack(params, s)
    d = params.N - 1
    if not params.p * (params.k - 1.0) * pack.s > d:
        raise ParameterError(
            f'p (k-1) s > N-1 violated: p={params.p}, k={params.k}, s={pack.s}'
        )
    if not pack.q > d:
        raise ParameterError(f'q > N-1 violated: q={pack.q}')
    potential = riesz_potential_radial(g, pack.alpha, d, tol=DEFAULT_TOL)
    return holder_check(potential, 1.0, pack.q, params, pairs, tol=tol)
