"""Monte-Carlo oracle for full-dimensional integrals over balls and annuli.

Kept free of any dependency on the deterministic quadrature routines so that
values cross-checked against it are genuinely independent.
"""

import math
from typing import Callable, NamedTuple, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.errors import ParameterError

MIN_SAMPLES = 10_000


class Ball(BaseModel):
    model_config = ConfigDict(frozen=True)

    center: Tuple[float, ...] = Field(..., min_length=1)
    radius: float = Field(..., gt=0)

    @property
    def inner(self) -> float:
        return 0.0

    @property
    def outer(self) -> float:
        return self.radius


class Annulus(BaseModel):
    model_config = ConfigDict(frozen=True)

    center: Tuple[float, ...] = Field(..., min_length=1)
    inner: float = Field(..., ge=0)
    outer: float

    @model_validator(mode='after')
    def _check_radii(self) -> 'Annulus':
        if not self.outer > self.inner:
            raise ParameterError(
                f'annulus needs outer > inner, got {self.inner}, {self.outer}'
            )
        return self


Domain = Union[Ball, Annulus]


class MonteCarloEstimate(NamedTuple):
    estimate: float
    stderr: float


def mc_integral_oracle(
    f: Callable[[np.ndarray], np.ndarray],
    domain: Domain,
    samples: int,
    seed: int,
    radial_exponent: float = 0.0,
) -> MonteCarloEstimate:
    """Estimate Int_domain f(y) dy by radially importance-sampled Monte Carlo.

    Points are drawn with density proportional to |y - center|^{-radial_exponent}
    on the domain; radial_exponent = 0 is plain uniform sampling.

    Args:
        f (Callable[[np.ndarray], np.ndarray]): Vectorised integrand, maps an
            (n, d) array of points to n values.
        domain (Domain): Ball or Annulus in R^d, d = len(center).
        samples (int): Number of samples, at least 10^4.
        seed (int): Seed of numpy's default generator.
        radial_exponent (float): Importance exponent, < d.

    Returns:
        MonteCarloEstimate: estimate and its standard error.
    """
    if samples < MIN_SAMPLES:
        raise ParameterError(f'samples >= {MIN_SAMPLES} required, got {samples}')
    center = np.asarray(domain.center, dtype=float)
    d = center.size
    q = d - radial_exponent
    if not q > 0:
        raise ParameterError(
            f'radial_exponent < d required, got {radial_exponent} with d={d}'
        )
    inner, outer = domain.inner, domain.outer

    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((samples, d))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    uniforms = rng.random(samples)

    low, high = inner**q, outer**q
    radii = (low + uniforms * (high - low)) ** (1.0 / q)
    points = center + radii[:, None] * directions

    sigma_d = 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)
    density = q * radii ** (-radial_exponent) / ((high - low) * sigma_d)
    weights = np.asarray(f(points), dtype=float) / density

    estimate = float(np.mean(weights))
    stderr = float(np.std(weights, ddof=1) / math.sqrt(samples))
    return MonteCarloEstimate(estimate=estimate, stderr=stderr)
