import math
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.core.errors import ParameterError
from src.quadrature.grid import RadialGrid


class SolverConfig(BaseModel):
    """Settings of the Picard iteration for the boundary trace."""

    model_config = ConfigDict(frozen=True)

    R: float = Field(
        default=math.inf,
        description='Truncation radius of the boundary ball; inf uses the composed operator',
    )
    envelope_factor: float = Field(
        default=2.5, gt=2, description='M = envelope_factor * A when M is not given'
    )
    M: Optional[float] = Field(default=None, gt=0, description='Envelope constant')
    tol: float = Field(default=1e-8, gt=0, description='Sup-relative stopping tolerance')
    max_iter: int = Field(default=200, ge=1, description='Iteration cap')
    blowup_threshold: float = Field(
        default=1e12, gt=0, description='Sup value that certifies divergence'
    )
    monotone_slack: float = Field(
        default=1e-10, ge=0, description='Relative slack of the monotonicity check'
    )
    grid: RadialGrid = Field(default_factory=RadialGrid, description='Trace grid')
    certificate_radii: Tuple[float, ...] = Field(
        default=(0.15, 0.35, 0.7, 1.3, 2.5, 5.0),
        description='Radii of the pointwise fixed point check after convergence',
    )

    @field_validator('R')
    @classmethod
    def _check_radius(cls, value: float) -> float:
        if not value >= 1:
            raise ParameterError(f'R >= 1 violated: R={value}')
        return value

    @property
    def truncated(self) -> bool:
        return math.isfinite(self.R)

    def solver_grid(self) -> RadialGrid:
        """Trace grid, cut at R in truncated mode."""
        if not self.truncated:
            return self.grid
        if not self.grid.r_min < self.R:
            raise ParameterError(f'R={self.R} must exceed grid r_min={self.grid.r_min}')
        return self.grid.truncated(self.R)

    def certificate_points(self) -> Tuple[float, ...]:
        """Certificate radii inside the solver grid."""
        grid = self.solver_grid()
        return tuple(r for r in self.certificate_radii if grid.r_min <= r <= grid.r_max)

    def envelope_constant(self, A: float) -> float:
        """Envelope M of the iteration; M > 2A is required."""
        M = self.M if self.M is not None else self.envelope_factor * A
        if not M > 2.0 * A:
            raise ParameterError(f'M > 2A violated: M={M}, A={A}')
        return M
