import math
from typing import Callable, Literal, Sequence

import numpy as np

from src.core.errors import ParameterError, SingularityError
from src.quadrature.adaptive import DEFAULT_TOL, adaptive_integrate
from src.quadrature.grid import SingularityHint
from src.special.functions import hyp2f1_near_one, sphere_area

AngularMethod = Literal['hypergeometric', 'quadrature']

# theta splits stop once the peak of width |r - s| / max(r, s) spans a panel
PEAK_SPLIT_RATIO = 0.15
PEAK_RESOLUTION = 0.1


def angular_kernel_from_ratio(d: int, beta: float, big, rho, complement=None):
    """Spherical mean of |big e1 - big*rho w|^{-beta} times sigma_d.

    Args:
        d (int): Dimension of the boundary hyperplane.
        beta (float): Kernel exponent.
        big: max(r, s), array-like and > 0.
        rho: min(r, s) / max(r, s), array-like in [0, 1].
        complement: Optional 1 - rho^2 formed without cancellation.

    Returns:
        Array of A_beta values (inf on the diagonal when beta >= d - 1).
    """
    big = np.asarray(big, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if complement is None:
        complement = (1.0 - rho) * (1.0 + rho)
    hyper = hyp2f1_near_one(beta / 2.0, beta / 2.0 - d / 2.0 + 1.0, d / 2.0, complement)
    return sphere_area(d) * big ** (-beta) * hyper


def angular_kernel_array(d: int, beta: float, r, s, height: float = 0.0):
    """Vectorised A_beta(r, s) with optional normal offset height.

    With height h the kernel is |r e1 - s w|^2 + h^2 raised to -beta/2,
    which is the radial reduction of the lifting kernel.
    """
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    if height == 0.0:
        big = np.maximum(r, s)
        small = np.minimum(r, s)
        with np.errstate(divide='ignore', invalid='ignore'):
            safe = np.where(big > 0, big, 1.0)
            rho = np.where(big > 0, small / safe, 0.0)
            complement = np.where(big > 0, (big - small) * (big + small) / (safe * safe), 1.0)
        return angular_kernel_from_ratio(d, beta, big, rho, complement)

    mu = beta / 2.0
    h2 = height * height
    total = r * r + s * s + h2
    complement = ((r - s) ** 2 + h2) * ((r + s) ** 2 + h2) / (total * total)
    hyper = hyp2f1_near_one(mu / 2.0, (mu + 1.0) / 2.0, d / 2.0, complement)
    return sphere_area(d) * total ** (-mu) * hyper


def radial_kernel_function(
    d: int, beta: float, r: float, height: float = 0.0
) -> Callable[[float], float]:
    """Scalar s -> A_beta(r, s) with the constants of (d, beta, r, h) hoisted.

    Used inside scalar quadrature loops. The exact diagonal s == r with a
    divergent kernel evaluates to 0 since a single point carries no mass.
    """
    sigma = sphere_area(d)
    if height == 0.0:
        a1, b1, c1 = beta / 2.0, beta / 2.0 - d / 2.0 + 1.0, d / 2.0
        diagonal_divergent = beta >= d - 1

        def kernel(s: float) -> float:
            big, small = (s, r) if s > r else (r, s)
            if big == 0.0:
                return math.inf
            if small == big and diagonal_divergent:
                return 0.0
            complement = (big - small) * (big + small) / (big * big)
            return sigma * big ** (-beta) * hyp2f1_near_one(a1, b1, c1, complement)

        return kernel

    mu = beta / 2.0
    a1, b1, c1 = mu / 2.0, (mu + 1.0) / 2.0, d / 2.0
    h2 = height * height

    def kernel(s: float) -> float:
        total = r * r + s * s + h2
        complement = ((r - s) ** 2 + h2) * ((r + s) ** 2 + h2) / (total * total)
        return sigma * total ** (-mu) * hyp2f1_near_one(a1, b1, c1, complement)

    return kernel


def _check_arguments(d: int, beta: float, r: float, s: float, height: float) -> None:
    if d < 2:
        raise ParameterError(f'angular_kernel needs d >= 2, got d={d}')
    if r < 0 or s < 0:
        raise ParameterError(f'angular_kernel needs r, s >= 0, got r={r}, s={s}')
    if height < 0:
        raise ParameterError(f'height must be >= 0, got {height}')
    if height == 0.0:
        if r == 0.0 and s == 0.0:
            raise SingularityError('angular_kernel undefined at r = s = 0')
        if r == s and beta >= d - 1:
            raise SingularityError(
                f'divergent diagonal: r = s = {r} with beta={beta} >= d - 1={d - 1}'
            )


def _peak_breakpoints(r: float, s: float, height: float) -> Sequence[float]:
    """Geometric theta splits toward 0 down to the width of the kernel peak."""
    width = math.hypot(r - s, height) / max(r, s)
    stop = PEAK_RESOLUTION * width
    points = []
    theta = math.pi * PEAK_SPLIT_RATIO
    while theta > stop:
        points.append(theta)
        theta *= PEAK_SPLIT_RATIO
    return points


def _angular_by_quadrature(
    d: int, beta: float, r: float, s: float, height: float, tol: float
) -> float:
    gap = (r - s) ** 2 + height * height
    cross = 4.0 * r * s

    def integrand(theta: float) -> float:
        dist2 = gap + cross * math.sin(0.5 * theta) ** 2
        if dist2 <= 0.0:
            raise SingularityError(f'kernel evaluated on its singularity at theta={theta}')
        value = dist2 ** (-beta / 2.0)
        if d > 2:
            value *= math.sin(theta) ** (d - 2)
        return value

    hints = []
    breakpoints: Sequence[float] = ()
    if r > 0.0 and s > 0.0:
        if gap == 0.0:
            hints.append(SingularityHint(location=0.0, exponent=max(beta - d + 2, 0.0)))
        else:
            breakpoints = _peak_breakpoints(r, s, height)
    result = adaptive_integrate(
        integrand, 0.0, math.pi, tol=tol, hints=hints, breakpoints=list(breakpoints)
    )
    weight = 2.0 if d == 2 else sphere_area(d - 1)
    return weight * result.value


def angular_kernel(
    d: int,
    beta: float,
    r: float,
    s: float,
    height: float = 0.0,
    method: AngularMethod = 'hypergeometric',
    tol: float = DEFAULT_TOL,
) -> float:
    """Spherical integral A_beta(r, s) = Int_{S^{d-1}} |r e1 - s w|^{-beta} dsigma(w).

    Args:
        d (int): Dimension of the boundary hyperplane (d >= 2).
        beta (float): Kernel exponent.
        r (float): First radius.
        s (float): Second radius.
        height (float): Normal offset x_N of the lifting kernel.
        method (AngularMethod): Closed form via 2F1 or direct theta quadrature.
        tol (float): Tolerance of the quadrature route.

    Returns:
        float: A_beta(r, s), symmetric in (r, s).
    """
    _check_arguments(d, beta, r, s, height)
    if method == 'quadrature':
        return _angular_by_quadrature(d, beta, r, s, height, tol)
    if method != 'hypergeometric':
        raise ParameterError(f'unknown angular method {method!r}')
    return float(angular_kernel_array(d, beta, r, s, height))
