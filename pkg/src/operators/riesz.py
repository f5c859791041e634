import logging
import math
from typing import Callable, Iterable, Sequence, Tuple

import numpy as np

from src.core.errors import (
    ParameterError,
    PotentialDivergenceError,
    SingularityError,
)
from src.core.params import ProblemParams
from src.operators.radial_fn import OriginLaw, RadialFn
from src.quadrature.adaptive import DEFAULT_TOL, NESTED_TOL, adaptive_integrate
from src.quadrature.angular import AngularMethod, angular_kernel, radial_kernel_function
from src.quadrature.grid import SingularityHint
from src.special.functions import riesz_composition_constant, sphere_area

logger = logging.getLogger(__name__)


def coupling_constant(params: ProblemParams) -> float:
    """The factor 2 lambda / ((N - 2) sigma_N) in front of every nonlinear term."""
    return 2.0 * params.lam / ((params.N - 2) * sphere_area(params.N))


def check_riesz_finiteness(v: RadialFn, alpha: float, d: int) -> None:
    """Finiteness of I_alpha v read off the end laws of v.

    Raises:
        PotentialDivergenceError: naming the failing exponent.
    """
    if not 0 < alpha < d:
        raise ParameterError(f'0 < alpha < d violated: alpha={alpha}, d={d}')
    if v.is_zero:
        return
    if v.tail_coeff > 0 and not v.tail_exp > alpha:
        raise PotentialDivergenceError(
            f'potential infinite: tail exponent tau_out={v.tail_exp:.6g} '
            f'must exceed alpha={alpha:.6g}'
        )
    law = v.origin_law
    if law.kind == 'power' and law.coeff > 0 and not law.exponent < d:
        raise PotentialDivergenceError(
            f'potential infinite: origin exponent tau_in={law.exponent:.6g} '
            f'must be below d={d}'
        )


def radial_profile_potential(
    profile: Callable[[float], float],
    d: int,
    beta: float,
    r: float,
    height: float = 0.0,
    origin_exp: float = 0.0,
    breakpoints: Sequence[float] = (),
    tol: float = DEFAULT_TOL,
) -> float:
    """Int_0^inf profile(s) s^{d-1} A_beta(r, s; height) ds for a radial profile.

    Args:
        profile (Callable[[float], float]): Radial density, evaluated for s > 0.
        d (int): Dimension of the hyperplane.
        beta (float): Kernel exponent.
        r (float): Target radius in the hyperplane.
        height (float): Distance of the target from the hyperplane.
        origin_exp (float): tau_in of the profile near s = 0.
        breakpoints (Sequence[float]): Extra interval splits, e.g. grid nodes.
        tol (float): Quadrature tolerance.

    Returns:
        float: The potential at (r, height).
    """
    alpha = d - beta
    hints = []
    if r == 0.0 and height == 0.0:
        if not origin_exp < alpha:
            raise SingularityError(
                f'I_alpha v is infinite at r = 0: tau_in={origin_exp} >= alpha={alpha}'
            )
        singular_at_origin = origin_exp - alpha + 1.0
    else:
        singular_at_origin = origin_exp - d + 1.0
        if height < r:
            hints.append(SingularityHint(location=r, exponent=max(beta - d + 1.0, 0.0)))
    if singular_at_origin > 0:
        hints.append(SingularityHint(location=0.0, exponent=singular_at_origin))

    kernel = radial_kernel_function(d, beta, r, height)
    power = d - 1

    def integrand(s: float) -> float:
        if s == 0.0:
            return 0.0
        return profile(s) * s**power * kernel(s)

    result = adaptive_integrate(
        integrand, 0.0, math.inf, tol=tol, hints=hints, breakpoints=list(breakpoints)
    )
    return result.value


def radial_riesz_at(
    v: RadialFn,
    alpha: float,
    d: int,
    r: float,
    height: float = 0.0,
    tol: float = DEFAULT_TOL,
) -> float:
    """Int_0^inf v(s) s^{d-1} A_{d-alpha}(r, s; height) ds for one target.

    With height = 0 this is the radial Riesz potential I_alpha v at radius r;
    with height = x_N > 0 it is the alpha-lifting at (r, x_N).
    """
    if v.is_zero:
        return 0.0
    law = v.origin_law
    tau_in = law.singular_exponent if law.coeff > 0 else 0.0
    return radial_profile_potential(
        v.value_at,
        d,
        d - alpha,
        r,
        height=height,
        origin_exp=tau_in,
        breakpoints=v.grid.nodes.tolist(),
        tol=tol,
    )


def riesz_potential_radial(
    v: RadialFn, alpha: float, d: int, tol: float = DEFAULT_TOL
) -> RadialFn:
    """Riesz potential I_alpha of a radial function on R^d, sampled on v's grid.

    Args:
        v (RadialFn): Nonnegative radial data.
        alpha (float): Order, 0 < alpha < d.
        d (int): Dimension of the hyperplane.
        tol (float): Quadrature tolerance per target.

    Returns:
        RadialFn: Output with tail exponent min(tau_out - alpha, d - alpha).
    """
    check_riesz_finiteness(v, alpha, d)
    if v.is_zero:
        return RadialFn.zeros(v.grid, tail_exp=d - alpha)

    values = np.array(
        [radial_riesz_at(v, alpha, d, float(r), tol=tol) for r in v.grid.nodes]
    )
    if v.tail_coeff > 0:
        tail_exp = min(v.tail_exp - alpha, d - alpha)
    else:
        tail_exp = d - alpha

    law = v.origin_law
    tau_in = law.singular_exponent if law.coeff > 0 else 0.0
    if tau_in > alpha:
        origin_exp = tau_in - alpha
        origin = OriginLaw.power(float(values[0]) * v.grid.r_min**origin_exp, origin_exp)
    elif tau_in < alpha:
        origin = OriginLaw.finite(radial_riesz_at(v, alpha, d, 0.0, tol=tol))
    else:
        origin = OriginLaw.finite(float(values[0]))

    logger.debug(
        'riesz potential alpha=%g d=%d on %d nodes, tail exponent %g',
        alpha,
        d,
        v.grid.n_nodes,
        tail_exp,
    )
    return RadialFn.from_values(v.grid, values, tail_exp=tail_exp, origin_law=origin)


def boundary_operator_H(v: RadialFn, params: ProblemParams, tol: float = DEFAULT_TOL) -> RadialFn:
    """Boundary convolution H(r) = Int v(y')^p |x' - y'|^{-k} dy'."""
    alpha = params.N - 1 - params.k
    if not v.is_zero and v.tail_coeff > 0:
        if not params.p * v.tail_exp + params.k > params.N - 1:
            raise PotentialDivergenceError(
                f'H_u infinite: p * tau_out + k = {params.p * v.tail_exp + params.k:.6g} '
                f'must exceed N - 1 = {params.N - 1}'
            )
    return riesz_potential_radial(v.pow(params.p), alpha, params.d, tol=tol)


def lifting_J(
    f: RadialFn,
    alpha: float,
    params: ProblemParams,
    x: Tuple[float, float],
    tol: float = DEFAULT_TOL,
) -> float:
    """alpha-lifting J_alpha f(x) = Int f(y') |x - (y', 0)|^{-(N-1-alpha)} dy'.

    Args:
        f (RadialFn): Radial boundary data.
        alpha (float): Order of the lifting.
        params (ProblemParams): Supplies the dimension N.
        x (Tuple[float, float]): Target (r', x_N) with x_N >= 0.
        tol (float): Quadrature tolerance.

    Returns:
        float: J_alpha f(x); equals I_alpha f(r') when x_N = 0.
    """
    r_prime, x_n = float(x[0]), float(x[1])
    if x_n < 0 or r_prime < 0:
        raise ParameterError(f'lifting_J needs r >= 0 and x_N >= 0, got {x}')
    check_riesz_finiteness(f, alpha, params.d)
    return radial_riesz_at(f, alpha, params.d, r_prime, height=x_n, tol=tol)


def _check_composed(params: ProblemParams) -> None:
    if params.k <= 1:
        raise PotentialDivergenceError(
            f'composed kernel divergent for k={params.k} <= 1: '
            'the inner boundary integral has no decay to absorb'
        )


def composed_constant(params: ProblemParams) -> float:
    """(2 lambda / ((N-2) sigma_N)) * C(N, 1, k)."""
    _check_composed(params)
    return coupling_constant(params) * riesz_composition_constant(
        params.N, 1.0, params.k
    ).value


def _check_composed_tail(v: RadialFn, params: ProblemParams) -> None:
    if not v.is_zero and v.tail_coeff > 0:
        if not params.p * v.tail_exp + params.k - 1 > params.N - 1:
            raise PotentialDivergenceError(
                f'composed potential infinite: p * tau_out + k - 1 = '
                f'{params.p * v.tail_exp + params.k - 1:.6g} must exceed N - 1'
            )


def composed_trace_operator(
    v: RadialFn, params: ProblemParams, tol: float = DEFAULT_TOL
) -> RadialFn:
    """Boundary trace of the nonlinear term collapsed to one Riesz potential.

    (Tv)(r) = (2 lambda / ((N-2) sigma_N)) C(N,1,k) Int v(z')^p |x'-z'|^{-(k-1)} dz'
    """
    constant = composed_constant(params)
    _check_composed_tail(v, params)
    potential = riesz_potential_radial(v.pow(params.p), params.N - params.k, params.d, tol=tol)
    return potential.scaled(constant)


def composed_trace_at(
    v: RadialFn,
    params: ProblemParams,
    r_samples: Iterable[float],
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """Pointwise values of composed_trace_operator at arbitrary radii."""
    constant = composed_constant(params)
    _check_composed_tail(v, params)
    w = v.pow(params.p)
    alpha = params.N - params.k
    check_riesz_finiteness(w, alpha, params.d)
    return np.array(
        [constant * radial_riesz_at(w, alpha, params.d, float(r), tol=tol) for r in r_samples]
    )


def composition_lhs(
    N: int,
    a: float,
    b: float,
    separation: float,
    method: AngularMethod = 'hypergeometric',
    tol: float = NESTED_TOL,
) -> float:
    """Direct quadrature of Int |x'-y'|^{-(N-1-a)} |y'-z'|^{-b} dy' with |x'-z'| = separation.

    Centred at x' = 0 the integral is Int_0^inf t^{a-1} A_b(separation, t) dt.
    The angular factor comes from the 2F1 closed form or, with
    method='quadrature', from a nested theta quadrature.
    """
    if not separation > 0:
        raise ParameterError(f'separation must be > 0, got {separation}')
    d = N - 1
    if method == 'hypergeometric':
        return radial_profile_potential(
            lambda s: s ** (a - d), d, b, separation, origin_exp=d - a, tol=tol
        )

    def integrand(t: float) -> float:
        if t == 0.0:
            return 0.0
        return t ** (a - 1.0) * angular_kernel(d, b, separation, t, method=method, tol=tol)

    hints = [SingularityHint(location=separation, exponent=0.0)]
    if a < 1:
        hints.append(SingularityHint(location=0.0, exponent=1.0 - a))
    return adaptive_integrate(integrand, 0.0, math.inf, tol=tol, hints=hints).value
