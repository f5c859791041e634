import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.errors import ParameterError


class RadialGrid(BaseModel):
    """Geometrically spaced radii r_min = r_0 < ... < r_{n-1} = r_max."""

    model_config = ConfigDict(frozen=True)

    r_min: float = Field(default=1e-3, gt=0, description='First node')
    r_max: float = Field(default=1e3, description='Last node')
    n_nodes: int = Field(default=121, ge=3, description='Number of nodes')
    refinement_level: int = Field(
        default=0, ge=0, description='Number of doublings applied'
    )

    @model_validator(mode='after')
    def _check_bounds(self) -> 'RadialGrid':
        if not self.r_max > self.r_min:
            raise ParameterError(
                f'r_max > r_min violated: r_min={self.r_min}, r_max={self.r_max}'
            )
        return self

    @property
    def nodes(self) -> np.ndarray:
        return np.geomspace(self.r_min, self.r_max, self.n_nodes)

    @property
    def log_nodes(self) -> np.ndarray:
        return np.linspace(
            math.log(self.r_min), math.log(self.r_max), self.n_nodes
        )

    @property
    def ratio(self) -> float:
        return (self.r_max / self.r_min) ** (1.0 / (self.n_nodes - 1))

    def refine(self, times: int = 1) -> 'RadialGrid':
        """Double the number of intervals, keeping every existing node."""
        n_nodes = self.n_nodes
        for _ in range(times):
            n_nodes = 2 * n_nodes - 1
        return RadialGrid(
            r_min=self.r_min,
            r_max=self.r_max,
            n_nodes=n_nodes,
            refinement_level=self.refinement_level + times,
        )

    def truncated(self, r_max: float) -> 'RadialGrid':
        """Grid on [r_min, r_max] keeping roughly the same node density."""
        decades = math.log(r_max / self.r_min)
        n_nodes = max(3, int(round(decades / math.log(self.ratio))) + 1)
        return RadialGrid(
            r_min=self.r_min,
            r_max=r_max,
            n_nodes=n_nodes,
            refinement_level=self.refinement_level,
        )


class SingularityHint(BaseModel):
    """Integrand behaves like |t - location|^{-exponent} near location."""

    model_config = ConfigDict(frozen=True)

    location: float
    exponent: float = Field(
        default=0.0,
        description='Local singularity strength; 0 marks a kink or log',
    )

    @model_validator(mode='after')
    def _check_integrable(self) -> 'SingularityHint':
        if not self.exponent < 1:
            raise ParameterError(
                f'non-integrable singularity at {self.location}: '
                f'exponent {self.exponent} >= 1'
            )
        return self
