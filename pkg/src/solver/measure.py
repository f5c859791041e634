import logging
import math
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.errors import ParameterError
from src.operators.radial_fn import OriginLaw, RadialFn
from src.quadrature.grid import RadialGrid
from src.special.functions import fundamental_solution_radial, sphere_area

logger = logging.getLogger(__name__)

DEFAULT_ANGLES = 65


class SphereMeasure(BaseModel):
    """Uniform surface measure of mass m on the sphere |y - (0', h)| = rho.

    The reflected measure sits on the mirror sphere about (0', -h).
    """

    model_config = ConfigDict(frozen=True)

    N: int = Field(default=3, ge=3, description='Space dimension')
    h: float = Field(default=1.0, gt=0, description='Height of the centre')
    rho: float = Field(default=0.25, gt=0, description='Radius of the sphere')
    m: float = Field(default=1.0, gt=0, description='Total mass')
    reflected: bool = Field(default=False, description='Mirror image below the boundary')

    @model_validator(mode='after')
    def _check_support(self) -> 'SphereMeasure':
        if not self.rho < self.h:
            raise ParameterError(
                f'0 < rho < h violated: rho={self.rho}, h={self.h} '
                '(support must lie in the open upper half space)'
            )
        return self

    @property
    def center_height(self) -> float:
        return -self.h if self.reflected else self.h

    @property
    def inner_constant(self) -> float:
        """Potential inside the sphere, m rho^{2-N} / ((N-2) sigma_N)."""
        return self.m * self.rho ** (2 - self.N) / ((self.N - 2) * sphere_area(self.N))

    def mirrored(self) -> 'SphereMeasure':
        return self.model_copy(update={'reflected': not self.reflected})

    def potential_cylindrical(self, r, x_n):
        """U at points given by in-plane radius r and height x_n (arrays broadcast)."""
        r = np.asarray(r, dtype=float)
        x_n = np.asarray(x_n, dtype=float)
        dist = np.sqrt(r * r + (x_n - self.center_height) ** 2)
        outside = dist >= self.rho
        safe = np.where(outside, dist, self.rho)
        value = np.where(
            outside, self.m * fundamental_solution_radial(safe, self.N), self.inner_constant
        )
        return float(value) if value.ndim == 0 else value


def _as_cylindrical(x: Sequence[float], N: int):
    x = np.asarray(x, dtype=float)
    if x.size != N:
        raise ParameterError(f'point of dimension {x.size} given, N={N}')
    return float(np.linalg.norm(x[:-1])), float(x[-1])


def newtonian_potential_sphere(meas: SphereMeasure, x: Sequence[float]) -> float:
    """Newtonian potential of the sphere measure at a point of R^N.

    Args:
        meas (SphereMeasure): The measure.
        x (Sequence[float]): Point of R^N.

    Returns:
        float: m Phi(x - c) outside the sphere, the constant m rho^{2-N}/((N-2) sigma_N) inside.
    """
    r, x_n = _as_cylindrical(x, meas.N)
    return meas.potential_cylindrical(r, x_n)


def green_potential(meas: SphereMeasure, x: Sequence[float]) -> float:
    """Int G(x, y) dmu(y) = U^mu(x) + U^{mu-bar}(x) for x in the closed upper half space."""
    r, x_n = _as_cylindrical(x, meas.N)
    if x_n < 0:
        raise ParameterError(f'green_potential needs x_N >= 0, got {x_n}')
    return green_potential_cylindrical(meas, r, x_n)


def green_potential_cylindrical(meas: SphereMeasure, r, x_n):
    return meas.potential_cylindrical(r, x_n) + meas.mirrored().potential_cylindrical(r, x_n)


def green_trace(meas: SphereMeasure, grid: RadialGrid) -> RadialFn:
    """Boundary trace U^nu(r, 0) = 2 U^mu(r, 0) on the grid."""
    values = 2.0 * meas.potential_cylindrical(grid.nodes, 0.0)
    origin = OriginLaw.finite(2.0 * meas.potential_cylindrical(0.0, 0.0))
    return RadialFn.from_values(grid, values, tail_exp=float(meas.N - 2), origin_law=origin)


def check_munu_bound(
    meas: SphereMeasure, k: float, grid: RadialGrid, n_angles: int = DEFAULT_ANGLES
) -> float:
    """A = sup of U^mu(x) (1 + |x|)^{k-1} over a polar sweep of R^N.

    Points are x = |x| (sin theta e1, cos theta) for |x| in {0} and the grid
    radii and theta in [0, pi], plus the point of the ball closest to the
    origin where the inner constant is weighted least. Since 2 - N < 1 - k,
    the ratio decays at infinity and the sup is attained at finite radius.

    Args:
        meas (SphereMeasure): The measure.
        k (float): Exponent with 1 < k < N - 1.
        grid (RadialGrid): Radii of the sweep.
        n_angles (int): Number of polar angles.

    Returns:
        float: The constant A.
    """
    if not 1 < k < meas.N - 1:
        raise ParameterError(f'1 < k < N - 1 violated: k={k}, N - 1={meas.N - 1}')
    radii = np.concatenate(([0.0], grid.nodes))
    theta = np.linspace(0.0, math.pi, n_angles)
    big, angle = np.meshgrid(radii, theta, indexing='ij')
    r = big * np.sin(angle)
    x_n = big * np.cos(angle)
    ratios = meas.potential_cylindrical(r, x_n) * (1.0 + big) ** (k - 1.0)

    nearest = meas.h - meas.rho
    closest = meas.inner_constant * (1.0 + nearest) ** (k - 1.0)
    bound = max(float(np.max(ratios)), closest)

    far = float(np.max(ratios[-1]))
    if far >= bound:
        logger.warning('munu ratio still maximal at r_max=%g; sweep too short', grid.r_max)
    logger.debug('munu bound A=%.8g (far-field ratio %.3g)', bound, far)
    return bound
