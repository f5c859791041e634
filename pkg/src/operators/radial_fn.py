import bisect
import math
from typing import Callable, Literal, Optional

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PrivateAttr,
    field_validator,
    model_validator,
)

from src.core.errors import (
    ParameterError,
    PotentialDivergenceError,
    SingularityError,
    TailConsistencyError,
)
from src.quadrature.grid import RadialGrid
from src.quadrature.panels import gauss_legendre_panels
from src.special.functions import sphere_area

# Relative band between the tail law and the last two grid values.
TAIL_CONSISTENCY_BAND = 0.2


class OriginLaw(BaseModel):
    """Behaviour of a radial function below r_min."""

    model_config = ConfigDict(frozen=True)

    kind: Literal['finite', 'power']
    value: float = Field(default=0.0, description='Limit at r = 0 (finite law)')
    coeff: float = Field(default=0.0, description='coeff * r^-exponent (power law)')
    exponent: float = Field(default=0.0, ge=0, description='tau_in (power law)')

    @classmethod
    def finite(cls, value: float) -> 'OriginLaw':
        return cls(kind='finite', value=value)

    @classmethod
    def power(cls, coeff: float, exponent: float) -> 'OriginLaw':
        return cls(kind='power', coeff=coeff, exponent=exponent)

    @property
    def singular_exponent(self) -> float:
        return self.exponent if self.kind == 'power' else 0.0

    def powered(self, p: float) -> 'OriginLaw':
        if self.kind == 'finite':
            return OriginLaw.finite(self.value**p)
        return OriginLaw.power(self.coeff**p, self.exponent * p)

    def scaled(self, factor: float) -> 'OriginLaw':
        if self.kind == 'finite':
            return OriginLaw.finite(self.value * factor)
        return OriginLaw.power(self.coeff * factor, self.exponent)


class RadialFn(BaseModel):
    """Nonnegative radial function on the boundary hyperplane.

    Grid values are interpolated log-log (linearly in log r where a value is
    zero); below r_min the origin law applies and above r_max the power tail
    tail_coeff * r^{-tail_exp}.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: RadialGrid
    values: np.ndarray
    tail_coeff: float = Field(..., ge=0)
    tail_exp: float
    origin_law: OriginLaw

    _log_nodes: list = PrivateAttr(default_factory=list)
    _nodes: list = PrivateAttr(default_factory=list)
    _vals: list = PrivateAttr(default_factory=list)
    _log_vals: list = PrivateAttr(default_factory=list)

    @field_validator('values', mode='before')
    @classmethod
    def _as_array(cls, value) -> np.ndarray:
        array = np.array(value, dtype=float)
        array.setflags(write=False)
        return array

    @model_validator(mode='after')
    def _check_values(self) -> 'RadialFn':
        if self.values.shape != (self.grid.n_nodes,):
            raise ParameterError(
                f'values shape {self.values.shape} does not match '
                f'{self.grid.n_nodes} grid nodes'
            )
        if not np.all(np.isfinite(self.values)):
            raise ParameterError('radial function values must be finite')
        if np.any(self.values < 0):
            raise ParameterError('radial function values must be >= 0')
        self._check_tail()
        return self

    def _check_tail(self) -> None:
        nodes = self.grid.nodes
        for i in (-1, -2):
            actual = float(self.values[i])
            law = self.tail_coeff * float(nodes[i]) ** (-self.tail_exp)
            scale = max(actual, law)
            if scale == 0.0:
                continue
            if abs(law - actual) > TAIL_CONSISTENCY_BAND * scale:
                raise TailConsistencyError(
                    f'tail law {self.tail_coeff:.6g} r^-{self.tail_exp:.6g} '
                    f'gives {law:.6g} at r={nodes[i]:.6g}, grid value {actual:.6g}'
                )

    def model_post_init(self, __context) -> None:
        self._nodes = self.grid.nodes.tolist()
        self._log_nodes = self.grid.log_nodes.tolist()
        self._vals = self.values.tolist()
        self._log_vals = [math.log(v) if v > 0 else -math.inf for v in self._vals]

    @classmethod
    def from_values(
        cls,
        grid: RadialGrid,
        values,
        tail_exp: Optional[float] = None,
        origin_law: Optional[OriginLaw] = None,
    ) -> 'RadialFn':
        """Build from grid values, fitting the tail coefficient at r_max.

        Args:
            grid (RadialGrid): Grid of the samples.
            values: Samples at the grid nodes.
            tail_exp (Optional[float]): Analytic tail exponent; fitted from the
                last two samples when omitted.
            origin_law (Optional[OriginLaw]): Law below r_min; defaults to a
                finite limit equal to the first sample.

        Returns:
            RadialFn: Validated function.
        """
        values = np.asarray(values, dtype=float)
        if tail_exp is None:
            tail_exp = _fitted_tail_exponent(grid, values)
        tail_coeff = float(values[-1]) * grid.r_max**tail_exp
        if origin_law is None:
            origin_law = OriginLaw.finite(float(values[0]))
        return cls(
            grid=grid,
            values=values,
            tail_coeff=tail_coeff,
            tail_exp=tail_exp,
            origin_law=origin_law,
        )

    @classmethod
    def from_profile(
        cls,
        profile: Callable[[np.ndarray], np.ndarray],
        grid: RadialGrid,
        tail_exp: float,
        origin_exp: float = 0.0,
    ) -> 'RadialFn':
        """Sample a vectorised profile; a zero origin_exp means a finite limit profile(0)."""
        values = np.asarray(profile(grid.nodes), dtype=float)
        if origin_exp > 0:
            law = OriginLaw.power(float(values[0]) * grid.r_min**origin_exp, origin_exp)
        else:
            law = OriginLaw.finite(float(np.asarray(profile(np.array([0.0])))[0]))
        return cls.from_values(grid, values, tail_exp=tail_exp, origin_law=law)

    @classmethod
    def power(cls, coeff: float, exponent: float, grid: RadialGrid) -> 'RadialFn':
        """Pure power coeff * r^{-exponent}, exact on and off the grid."""
        return cls(
            grid=grid,
            values=coeff * grid.nodes ** (-exponent),
            tail_coeff=coeff,
            tail_exp=exponent,
            origin_law=OriginLaw.power(coeff, exponent),
        )

    @classmethod
    def zeros(cls, grid: RadialGrid, tail_exp: float = 1.0) -> 'RadialFn':
        return cls(
            grid=grid,
            values=np.zeros(grid.n_nodes),
            tail_coeff=0.0,
            tail_exp=tail_exp,
            origin_law=OriginLaw.finite(0.0),
        )

    @property
    def is_zero(self) -> bool:
        law = self.origin_law
        return (
            not np.any(self.values)
            and self.tail_coeff == 0.0
            and law.value == 0.0
            and law.coeff == 0.0
        )

    def value_at(self, r: float) -> float:
        """Scalar evaluation; the hot path of every quadrature integrand."""
        nodes = self._nodes
        if r < nodes[0]:
            law = self.origin_law
            if law.kind == 'power':
                if r == 0.0:
                    if law.exponent == 0.0:
                        return law.coeff
                    raise SingularityError('power origin law evaluated at r = 0')
                return law.coeff * r ** (-law.exponent)
            return law.value + (self._vals[0] - law.value) * (r / nodes[0])
        if r > nodes[-1]:
            return self.tail_coeff * r ** (-self.tail_exp)

        i = min(bisect.bisect_right(nodes, r) - 1, len(nodes) - 2)
        t0, t1 = self._log_nodes[i], self._log_nodes[i + 1]
        theta = (math.log(r) - t0) / (t1 - t0)
        lv0, lv1 = self._log_vals[i], self._log_vals[i + 1]
        if lv0 == -math.inf or lv1 == -math.inf:
            v0, v1 = self._vals[i], self._vals[i + 1]
            return v0 + theta * (v1 - v0)
        return math.exp(lv0 + theta * (lv1 - lv0))

    def __call__(self, r):
        r_array = np.asarray(r, dtype=float)
        out = np.array([self.value_at(float(x)) for x in r_array.ravel()])
        if r_array.ndim == 0:
            return float(out[0])
        return out.reshape(r_array.shape)

    def _derived(
        self, values: np.ndarray, tail_coeff: float, tail_exp: float, origin_law: OriginLaw
    ) -> 'RadialFn':
        return RadialFn(
            grid=self.grid,
            values=values,
            tail_coeff=tail_coeff,
            tail_exp=tail_exp,
            origin_law=origin_law,
        )

    def pow(self, p: float) -> 'RadialFn':
        """Pointwise v^p as exp(p log v), zero mapped to zero."""
        positive = self.values > 0
        safe = np.where(positive, self.values, 1.0)
        values = np.where(positive, np.exp(p * np.log(safe)), 0.0)
        return self._derived(
            values,
            self.tail_coeff**p,
            self.tail_exp * p,
            self.origin_law.powered(p),
        )

    def scaled(self, factor: float) -> 'RadialFn':
        if factor < 0:
            raise ParameterError(f'scale factor must be >= 0, got {factor}')
        return self._derived(
            self.values * factor,
            self.tail_coeff * factor,
            self.tail_exp,
            self.origin_law.scaled(factor),
        )

    def __add__(self, other: 'RadialFn') -> 'RadialFn':
        if other.grid != self.grid:
            raise ParameterError('cannot add radial functions on different grids')
        values = self.values + other.values
        live_tails = [f.tail_exp for f in (self, other) if f.tail_coeff > 0]
        tail_exp = min(live_tails) if live_tails else self.tail_exp
        a, b = self.origin_law, other.origin_law
        if a.kind == 'finite' and b.kind == 'finite':
            law = OriginLaw.finite(a.value + b.value)
        else:
            exponent = max(a.singular_exponent, b.singular_exponent)
            law = OriginLaw.power(float(values[0]) * self.grid.r_min**exponent, exponent)
        return RadialFn.from_values(self.grid, values, tail_exp=tail_exp, origin_law=law)

    def dilated(self, rho: float) -> 'RadialFn':
        """The function r -> v(r / rho) on the same grid."""
        if not rho > 0:
            raise ParameterError(f'dilation factor must be > 0, got {rho}')
        values = self(self.grid.nodes / rho)
        law = self.origin_law
        if law.kind == 'power':
            law = OriginLaw.power(law.coeff * rho**law.exponent, law.exponent)
        return self._derived(
            values, self.tail_coeff * rho**self.tail_exp, self.tail_exp, law
        )

    def radial_integral(self, power: float, d: int, order: int = 8) -> float:
        """sigma_d * Int_0^inf v(r)^power r^{d-1} dr, the integral of v^power over R^d.

        Raises PotentialDivergenceError when an end law is not integrable.
        """
        law = self.origin_law
        if law.kind == 'power' and law.coeff > 0:
            exponent = d - power * law.exponent
            if not exponent > 0:
                raise PotentialDivergenceError(
                    f'integral of v^{power} diverges at the origin: '
                    f'tau_in={law.exponent}, d={d}'
                )
            origin_part = law.coeff**power * self.grid.r_min**exponent / exponent
        else:
            nodes, weights = gauss_legendre_panels(
                np.array([0.0, self.grid.r_min]), order
            )
            r = nodes.ravel()
            origin_part = float(np.sum(weights.ravel() * self(r) ** power * r ** (d - 1)))

        if self.tail_coeff > 0:
            exponent = power * self.tail_exp - d
            if not exponent > 0:
                raise PotentialDivergenceError(
                    f'integral of v^{power} diverges at infinity: '
                    f'tau_out={self.tail_exp}, d={d}'
                )
            tail_part = self.tail_coeff**power * self.grid.r_max ** (-exponent) / exponent
        else:
            tail_part = 0.0

        t_nodes, t_weights = gauss_legendre_panels(self.grid.log_nodes, order)
        r = np.exp(t_nodes.ravel())
        grid_part = float(np.sum(t_weights.ravel() * self(r) ** power * r**d))

        return sphere_area(d) * math.fsum([origin_part, grid_part, tail_part])

    def lp_norm(self, q: float, d: int) -> float:
        """L^q norm over R^d of the radial function."""
        if not q > 0:
            raise ParameterError(f'q > 0 required, got {q}')
        if self.is_zero:
            return 0.0
        return self.radial_integral(q, d) ** (1.0 / q)


def _fitted_tail_exponent(grid: RadialGrid, values: np.ndarray) -> float:
    last, before = float(values[-1]), float(values[-2])
    if last <= 0.0 or before <= 0.0:
        return 1.0
    return -math.log(last / before) / math.log(grid.ratio)
