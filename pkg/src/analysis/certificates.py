"""Nonexistence and regularity certificates read off exponents and lower bounds."""

import logging
import math
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from src.core.errors import ParameterError
from src.core.params import ProblemParams, critical_exponents
from src.operators.radial_fn import RadialFn
from src.operators.riesz import composed_constant
from src.quadrature.adaptive import DEFAULT_TOL, adaptive_integrate
from src.quadrature.grid import SingularityHint
from src.solutions.exact import ExactSolution
from src.special.functions import sphere_area

logger = logging.getLogger(__name__)

LOWER_BOUND_SLACK = 0.5
LOWER_BOUND_ANCHOR = 2.0
DEFAULT_RADII = (1e1, 1e2, 1e3, 1e4, 1e5, 1e6)


class LowerBoundReport(NamedTuple):
    holds: bool
    constant: float
    min_ratio: float


class DivergenceReport(NamedTuple):
    divergent: bool
    growth: Optional[str]
    exponent: float
    radii: List[float]
    partial_integrals: List[float]


class RegularityReport(NamedTuple):
    exponent: float
    local_norm: float
    finite: bool
    predicted_regular: bool


def ball_integral(v: RadialFn, power: float, d: int, radius: float = 1.0, tol: float = DEFAULT_TOL) -> float:
    """Int_{|x'| < radius} v^power dx' over R^d."""
    law = v.origin_law
    tau_in = law.singular_exponent if law.coeff > 0 else 0.0
    hints = []
    origin_exp = power * tau_in - d + 1.0
    if origin_exp >= 1:
        return math.inf
    if origin_exp > 0:
        hints.append(SingularityHint(location=0.0, exponent=origin_exp))
    nodes = [r for r in v.grid.nodes.tolist() if r < radius]

    def integrand(s: float) -> float:
        if s == 0.0:
            return 0.0
        return v.value_at(s) ** power * s ** (d - 1)

    result = adaptive_integrate(integrand, 0.0, radius, tol=tol, hints=hints, breakpoints=nodes)
    return sphere_area(d) * result.value


def lower_bound_constant(v: RadialFn, params: ProblemParams, tol: float = DEFAULT_TOL) -> float:
    """C = K C(N,1,k) 2^{1-k} Int_{B'_1} v^p, so that Tv >= C |x'|^{1-k} for |x'| > 1.

    For |z'| < 1 < |x'| one has |x' - z'| <= 2|x'|, which gives the bound from
    the unit-ball part of the composed operator alone.
    """
    if params.lam == 0:
        return 0.0
    mass = ball_integral(v, params.p, params.d, 1.0, tol=tol)
    return composed_constant(params) * 2.0 ** (1.0 - params.k) * mass


def lower_bound_check(
    v: RadialFn,
    params: ProblemParams,
    slack: float = LOWER_BOUND_SLACK,
    anchor: float = LOWER_BOUND_ANCHOR,
) -> bool:
    """Check v(r) >= slack * C r^{1-k} for grid radii beyond the anchor, C fitted there.

    C = v(anchor) anchor^{k-1}, so the bound is tight at the anchor and the
    check asks that v decay no faster than r^{1-k} up to r_max.

    Args:
        v (RadialFn): Candidate solution trace.
        params (ProblemParams): Problem parameters with k > 1.
        slack (float): Factor absorbing discretization error.
        anchor (float): Radius where C is read off v.

    Returns:
        bool: False for the zero function or when no grid radius lies beyond the anchor.
    """
    if params.k <= 1:
        raise ParameterError(f'lower bound needs k > 1, got k={params.k}')
    constant = v(anchor) * anchor ** (params.k - 1.0)
    radii = v.grid.nodes[v.grid.nodes > anchor]
    if not constant > 0 or radii.size == 0:
        logger.info('fitted lower bound fails: C=%g at r=%g', constant, anchor)
        return False
    values = np.asarray(v(radii))
    return bool(np.all(values >= slack * constant * radii ** (1.0 - params.k)))


def lower_bound_report(
    v: RadialFn,
    params: ProblemParams,
    slack: float = LOWER_BOUND_SLACK,
    tol: float = DEFAULT_TOL,
) -> LowerBoundReport:
    """Check v(r) >= slack * C r^{1-k} on the grid radii beyond 1 with C of the construction.

    Unlike lower_bound_check the constant comes from the unit-ball mass of
    v^p, so a trace dominated by a faster-decaying source still passes as
    long as the nonlinear term carries the bound.

    Args:
        v (RadialFn): Candidate solution trace.
        params (ProblemParams): Problem parameters with k > 1.
        slack (float): Factor absorbing discretization error.
        tol (float): Quadrature tolerance of the unit-ball mass.

    Returns:
        LowerBoundReport: holds is False for the zero function.
    """
    if params.k <= 1:
        raise ParameterError(f'lower bound needs k > 1, got k={params.k}')
    constant = lower_bound_constant(v, params, tol=tol)
    radii = v.grid.nodes[v.grid.nodes > 1.0]
    if constant <= 0 or radii.size == 0:
        logger.info('lower bound fails: constant %g (zero is not a positive solution)', constant)
        return LowerBoundReport(holds=False, constant=constant, min_ratio=0.0)
    values = np.asarray(v(radii))
    ratios = values / (constant * radii ** (1.0 - params.k))
    min_ratio = float(np.min(ratios))
    return LowerBoundReport(holds=min_ratio >= slack, constant=constant, min_ratio=min_ratio)


def _power_partial_integral(exponent: float, radius: float) -> float:
    """Int_1^radius t^{-exponent} dt."""
    if exponent == 1.0:
        return math.log(radius)
    return (radius ** (1.0 - exponent) - 1.0) / (1.0 - exponent)


def k_small_divergence(
    params: ProblemParams, radii: Sequence[float] = DEFAULT_RADII
) -> DivergenceReport:
    """Far field of Int |x'-y'|^{-(N-2)} |y'-z'|^{-k} dy' over R^{N-1}.

    The integrand decays like |y'|^{-(N-2+k)} in dimension N-1, so the radial
    integral behaves like Int^R t^{-k} dt: divergent iff k <= 1, with growth
    R^{1-k} for k < 1 and log R at k = 1.
    """
    k = params.k
    partial = [sphere_area(params.d) * _power_partial_integral(k, r) for r in radii]
    if k < 1:
        growth = 'power'
    elif k == 1:
        growth = 'log'
    else:
        growth = None
    report = DivergenceReport(
        divergent=k <= 1,
        growth=growth,
        exponent=k,
        radii=list(radii),
        partial_integrals=partial,
    )
    logger.info('k=%g inner kernel: divergent=%s (%s)', k, report.divergent, growth)
    return report


def critical_lp_certificate(
    params: ProblemParams, constant: float = 1.0, radii: Sequence[float] = DEFAULT_RADII
) -> DivergenceReport:
    """Int_{|x'| > 1} (C |x'|^{1-k})^p dx' is infinite iff p (k - 1) <= N - 1.

    At p = p* the lower bound of every solution trace forces v not in L^p.
    """
    critical_exponents(params)
    exponent = params.p * (params.k - 1.0) - params.d + 1.0
    partial = [
        sphere_area(params.d) * constant**params.p * _power_partial_integral(exponent, r)
        for r in radii
    ]
    divergent = exponent <= 1.0 + 1e-12
    growth = None
    if divergent:
        growth = 'log' if math.isclose(exponent, 1.0, rel_tol=1e-12) else 'power'
    return DivergenceReport(
        divergent=divergent,
        growth=growth,
        exponent=exponent,
        radii=list(radii),
        partial_integrals=partial,
    )


def regularity_check(sol: ExactSolution) -> RegularityReport:
    """Local L^{2(N-1)/(k-1)} norm of the trace c r^{-tau} on the unit ball.

    The norm is finite iff tau 2(N-1)/(k-1) < N-1, which must coincide with p > p**.
    """
    params = sol.params
    _, p_star_star = critical_exponents(params)
    q = 2.0 * params.d / (params.k - 1.0)
    gap = params.d - q * sol.trace_exp
    if gap > 0:
        norm = (sphere_area(params.d) * sol.trace_coeff**q / gap) ** (1.0 / q)
    else:
        norm = math.inf
    return RegularityReport(
        exponent=q,
        local_norm=norm,
        finite=math.isfinite(norm),
        predicted_regular=params.p > p_star_star,
    )
