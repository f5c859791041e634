import math
from functools import lru_cache
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import special

from src.core.errors import ParameterError, SingularityError


def gamma_fn(x: float) -> float:
    """Gamma function on the positive real axis.

    Args:
        x (float): Argument, must be > 0.

    Returns:
        float: Gamma(x).
    """
    if not x > 0:
        raise ParameterError(f'gamma_fn domain error: x > 0 required, got {x}')
    return float(special.gamma(x))


def sphere_area(N: int) -> float:
    """Surface area sigma_N of the unit sphere S^{N-1} in R^N."""
    if N < 2:
        raise ParameterError(f'sphere_area needs N >= 2, got N={N}')
    return 2.0 * math.pi ** (N / 2.0) / gamma_fn(N / 2.0)


UNIT_SWITCH = 1e-6
INTEGER_SWITCH = 1e-10


def hyp2f1_near_one(a: float, b: float, c: float, w):
    """2F1(a, b; c; 1 - w) for w in [0, 1], accurate as w -> 0.

    The complement w is taken as input so callers can form it without
    cancellation. Below UNIT_SWITCH the Gauss connection formula around
    z = 1 replaces the direct series; when c - a - b is an integer only
    the leading singular term is kept, which needs w below INTEGER_SWITCH.

    Args:
        a (float): First numerator parameter, > 0.
        b (float): Second numerator parameter.
        c (float): Denominator parameter, > 0.
        w: 1 - z, scalar or array in [0, 1].

    Returns:
        Values of 2F1, inf where w == 0 and c - a - b <= 0.
    """
    w = np.asarray(w, dtype=float)
    m = c - a - b
    integer_gap = abs(m - round(m)) < 1e-12
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        direct = special.hyp2f1(a, b, c, 1.0 - w)
        switch = INTEGER_SWITCH if integer_gap else UNIT_SWITCH
        near = (w < switch) | ~np.isfinite(direct)
        if not np.any(near):
            return float(direct) if direct.ndim == 0 else direct
        wn = np.where(near, w, 0.5)
        if not integer_gap:
            regular = (
                special.gamma(c) * special.gamma(m) * special.rgamma(c - a) * special.rgamma(c - b)
                * special.hyp2f1(a, b, 1.0 - m, wn)
            )
            singular = (
                special.gamma(c) * special.gamma(-m) * special.rgamma(a) * special.rgamma(b)
                * wn**m * special.hyp2f1(c - a, c - b, 1.0 + m, wn)
            )
            connected = regular + singular
        elif round(m) == 0:
            scale = special.gamma(c) * special.rgamma(a) * special.rgamma(b)
            connected = scale * (
                -np.log(wn) + 2.0 * special.digamma(1.0) - special.digamma(a) - special.digamma(b)
            )
        elif m > 0:
            connected = np.full_like(
                wn, special.gamma(c) * special.gamma(m) * special.rgamma(c - a) * special.rgamma(c - b)
            )
        else:
            connected = special.gamma(c) * special.gamma(-m) * special.rgamma(a) * special.rgamma(b) * wn**m
        value = np.where(near, connected, direct)
    return float(value) if value.ndim == 0 else value


def fundamental_solution_radial(dist, N: int):
    """Fundamental solution of -Laplace in R^N as a function of |x|.

    Args:
        dist: Distance(s) |x|, scalar or array, all > 0.
        N (int): Space dimension, N >= 3.

    Returns:
        Phi = |x|^{2-N} / ((N-2) sigma_N), same shape as dist.
    """
    dist = np.asarray(dist, dtype=float)
    if np.any(dist <= 0):
        raise SingularityError('fundamental solution is singular at x = 0')
    value = dist ** (2 - N) / ((N - 2) * sphere_area(N))
    return float(value) if value.ndim == 0 else value


def fundamental_solution(x: Sequence[float]) -> float:
    """Fundamental solution Phi(x) for a point x in R^N (N = len(x) >= 3)."""
    x = np.asarray(x, dtype=float)
    if x.size < 3:
        raise ParameterError(f'fundamental_solution needs N >= 3, got N={x.size}')
    return fundamental_solution_radial(float(np.linalg.norm(x)), x.size)


def neumann_green(x: Sequence[float], y: Sequence[float]) -> float:
    """Neumann Green function of the half space, G(x,y) = Phi(x-y) + Phi(xbar-y).

    Args:
        x (Sequence[float]): Point of the closed upper half space.
        y (Sequence[float]): Point of the closed upper half space.

    Returns:
        float: G(x, y).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ParameterError('neumann_green needs points of equal dimension')
    if x[-1] < 0 or y[-1] < 0:
        raise ParameterError('neumann_green needs x_N >= 0 and y_N >= 0')

    x_bar = x.copy()
    x_bar[-1] = -x_bar[-1]
    direct = float(np.linalg.norm(x - y))
    reflected = float(np.linalg.norm(x_bar - y))
    if direct == 0.0 or reflected == 0.0:
        raise SingularityError(f'Green function singular at x={x}, y={y}')

    N = x.size
    return fundamental_solution_radial(direct, N) + fundamental_solution_radial(
        reflected, N
    )


class CompositionConstant(BaseModel):
    """Constant C(N, a, b) collapsing two boundary power kernels into one.

    Int_{R^{N-1}} |x'-y'|^{-(N-1-a)} |y'-z'|^{-b} dy' = C(N,a,b) |x'-z'|^{-(b-a)}
    """

    model_config = ConfigDict(frozen=True)

    N: int
    a: float
    b: float
    value: float = Field(..., gt=0)

    @model_validator(mode='after')
    def _check_window(self) -> 'CompositionConstant':
        _check_composition_window(self.N, self.a, self.b)
        if not math.isfinite(self.value):
            raise ParameterError(f'C({self.N},{self.a},{self.b}) is not finite')
        return self


def _check_composition_window(N: int, a: float, b: float) -> None:
    d = N - 1
    if not a > 0:
        raise ParameterError(f'0 < a violated: a={a}')
    if not a < b:
        raise ParameterError(f'a < b violated: a={a}, b={b}')
    if not b < d:
        raise ParameterError(f'b < N - 1 violated: b={b}, N - 1={d}')


@lru_cache(maxsize=512)
def _composition_value(N: int, a: float, b: float) -> float:
    d = N - 1
    numerator = (
        math.pi ** (d / 2.0)
        * gamma_fn(a / 2.0)
        * gamma_fn((d - b) / 2.0)
        * gamma_fn((b - a) / 2.0)
    )
    denominator = (
        gamma_fn((d - a) / 2.0) * gamma_fn(b / 2.0) * gamma_fn((d - b + a) / 2.0)
    )
    return numerator / denominator


def riesz_composition_constant(N: int, a: float, b: float) -> CompositionConstant:
    """Gamma-ratio closed form of the boundary composition constant.

    Args:
        N (int): Space dimension; the boundary has dimension d = N - 1.
        a (float): Order of the Riesz kernel |x'-y'|^{-(d-a)}.
        b (float): Exponent of the power kernel |y'-z'|^{-b}.

    Returns:
        CompositionConstant: Validated constant, memoized per (N, a, b).
    """
    _check_composition_window(N, a, b)
    value = _composition_value(int(N), float(a), float(b))
    return CompositionConstant(N=N, a=a, b=b, value=value)
