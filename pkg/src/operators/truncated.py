import math
from typing import Iterable

import numpy as np
from scipy import special

from src.core.errors import ParameterError, SingularityError
from src.core.params import ProblemParams
from src.operators.radial_fn import RadialFn
from src.operators.riesz import coupling_constant, radial_profile_potential
from src.quadrature.adaptive import DEFAULT_TOL, NESTED_TOL, adaptive_integrate
from src.quadrature.grid import SingularityHint


def _segment_integral(u_lo: float, u_hi: float, e: float, k: float) -> float:
    """Int_{u_lo}^{u_hi} (u^2 + e^2)^{-k/2} du for 1 < k, e > 0.

    Uses Int_u^inf (t^2 + e^2)^{-k/2} dt = e^{1-k} B(1/2, (k-1)/2) I_x((k-1)/2, 1/2) / 2
    with x = e^2 / (u^2 + e^2), which is free of cancellation for large |u|.
    """
    a = 0.5 * (k - 1.0)
    full = e ** (1.0 - k) * 0.5 * special.beta(0.5, a)

    def upper(u: float) -> float:
        return full * special.betainc(a, 0.5, e * e / (u * u + e * e))

    if u_lo >= 0.0:
        return upper(u_lo) - upper(u_hi)
    if u_hi <= 0.0:
        return upper(-u_hi) - upper(-u_lo)
    return 2.0 * full - upper(-u_lo) - upper(u_hi)


def truncated_kernel_KR(
    r_x: float, r_z: float, R: float, params: ProblemParams, tol: float = NESTED_TOL
) -> float:
    """K_R(x', z') = Int_{|y'| < R} |x' - y'|^{-(N-2)} |y' - z'|^{-k} dy' for N = 3.

    The planar integral is taken in polar coordinates about x' = (r_x, 0), where
    the Jacobian cancels |x' - y'|^{-1}. The radial integral is closed form, the
    angular one adaptive with a hint at the direction of z' = (r_z, 0).

    Args:
        r_x (float): Radius of x', 0 <= r_x <= R.
        r_z (float): Radius of z', r_z != r_x.
        R (float): Truncation radius, R >= 1.
        params (ProblemParams): Needs N = 3 and k > 1.
        tol (float): Angular quadrature tolerance.

    Returns:
        float: K_R(r_x, r_z).
    """
    if params.N != 3:
        raise ParameterError(f'truncated kernel is implemented for N = 3 only, got N={params.N}')
    if params.k <= 1:
        raise ParameterError(f'truncated kernel needs k > 1, got k={params.k}')
    if R < 1:
        raise ParameterError(f'R >= 1 required, got R={R}')
    if not 0 <= r_x <= R or r_z < 0:
        raise ParameterError(f'need 0 <= r_x <= R and r_z >= 0, got r_x={r_x}, r_z={r_z}')
    shift = r_z - r_x
    if shift == 0.0:
        raise SingularityError(f'K_R is infinite on the diagonal r_x = r_z = {r_x}')

    k = params.k

    def inner(phi: float) -> float:
        cos_phi = math.cos(phi)
        reach = -r_x * cos_phi + math.sqrt(r_x * r_x * cos_phi * cos_phi - r_x * r_x + R * R)
        along = shift * cos_phi
        e = abs(shift * math.sin(phi))
        if e == 0.0:
            return 0.0
        return _segment_integral(-along, reach - along, e, k)

    singular_direction = 0.0 if shift > 0 else math.pi
    result = adaptive_integrate(
        inner,
        0.0,
        math.pi,
        tol=tol,
        hints=[SingularityHint(location=singular_direction, exponent=k - 1.0)],
    )
    return 2.0 * result.value


def truncated_trace_at(
    v: RadialFn,
    params: ProblemParams,
    R: float,
    r_samples: Iterable[float],
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """Pointwise K Int_{B'_R} Int_{B'_R} |x'-y'|^{-(N-2)} |y'-z'|^{-k} v(z')^p at given radii.

    The inner |.|^{-k} potential of v^p cut at R is integrated at every grid
    node of v, the outer |.|^{-(N-2)} potential of that profile, again cut
    at R, at each requested radius.
    """
    if params.N != 3:
        raise ParameterError(f'truncated trace is implemented for N = 3 only, got N={params.N}')
    if R < 1:
        raise ParameterError(f'R >= 1 required, got R={R}')
    d = params.d
    nodes = [float(x) for x in v.grid.nodes if x <= R]
    splits = [*nodes, R]

    def cut_density(s: float) -> float:
        if s >= R:
            return 0.0
        return max(v.value_at(s), 0.0) ** params.p

    inner = [
        radial_profile_potential(cut_density, d, params.k, r, breakpoints=splits, tol=tol)
        for r in v.grid.nodes
    ]
    potential = RadialFn.from_values(v.grid, inner, tail_exp=params.k)

    def cut_potential(s: float) -> float:
        return potential.value_at(s) if s < R else 0.0

    constant = coupling_constant(params)
    return np.array(
        [
            constant
            * radial_profile_potential(
                cut_potential, d, float(params.N - 2), float(r), breakpoints=splits, tol=tol
            )
            for r in r_samples
        ]
    )
