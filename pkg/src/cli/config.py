import math
import tomllib
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.core.errors import ConfigError, ParameterError
from src.core.params import ProblemParams
from src.quadrature.grid import RadialGrid
from src.solver.config import SolverConfig
from src.solver.measure import SphereMeasure

Section = ConfigDict(extra='forbid', frozen=True)


class MeasureSection(BaseModel):
    model_config = Section

    h: float = Field(default=1.0, description='Height of the sphere centre')
    rho: float = Field(default=0.25, description='Radius of the sphere')
    m: float = Field(default=1.0, description='Mass of the measure')


class SolverSection(BaseModel):
    model_config = Section

    R: float = Field(default=math.inf, description='Truncation radius, inf for full space')
    envelope_factor: float = Field(default=2.5, description='M = factor * A')
    M: Optional[float] = Field(default=None, description='Explicit envelope constant')
    tol: float = Field(default=1e-8)
    max_iter: int = Field(default=200)
    blowup_threshold: float = Field(default=1e12)


class GridSection(BaseModel):
    model_config = Section

    r_min: float = Field(default=1e-3)
    r_max: float = Field(default=1e3)
    n_nodes: int = Field(default=121)


class SeedsSection(BaseModel):
    model_config = Section

    mc: int = Field(default=0, description='Seed of every Monte-Carlo draw')


class VerifySection(BaseModel):
    model_config = Section

    composition_pairs: List[Tuple[float, float]] = Field(
        default=[(0.5, 1.5), (1.0, 1.5), (1.0, 1.9)]
    )
    composition_separations: List[float] = Field(default=[0.5, 1.0, 2.0])
    composition_method: Literal['hypergeometric', 'quadrature'] = 'hypergeometric'
    angular_triples: int = Field(default=10, description='Random (r, s, beta) spot checks')
    mc_samples: int = Field(default=100_000)
    exact_r_min: float = Field(default=0.1)
    exact_r_max: float = Field(default=10.0)
    exact_samples: int = Field(default=9)
    perturbation: float = Field(default=1.1)
    axis_height: float = Field(default=1.0)
    bubble_t: float = Field(default=1.0)
    bubble_scaled_t: float = Field(default=2.0)
    bubble_r_max: float = Field(default=10.0)
    bubble_samples: int = Field(default=21)
    beta: float = Field(default=4.0, description='Density decay of the first estimate')
    holder_alpha: float = Field(default=1.0)
    holder_q: float = Field(default=4.0)
    holder_center: Tuple[float, float] = Field(default=(1.0, 0.5))
    pack_s: Optional[float] = Field(default=None)
    hls_alpha: float = Field(default=1.0)
    hls_s: float = Field(default=1.5)
    dilations: List[float] = Field(default=[0.5, 2.0])


class LambdaStarSection(BaseModel):
    model_config = Section

    bracket: Tuple[float, float] = Field(default=(1e-4, 1e3))
    rel_width: float = Field(default=1e-2)
    invariance_bound: bool = Field(
        default=False, description='Also report the bound with fitted C1, C2'
    )


class BootstrapSection(BaseModel):
    model_config = Section

    n_max: int = Field(default=64)


class TolerancesSection(BaseModel):
    model_config = Section

    composition: float = Field(default=5e-3)
    angular_stderr: float = Field(default=3.0, description='Allowed Monte-Carlo deviation in stderr')
    residual: float = Field(default=1e-3)
    axis: float = Field(default=1e-3)
    covariance: float = Field(default=1e-6)
    refine: float = Field(default=0.1)
    dilation: float = Field(default=1e-2)


class OutputSection(BaseModel):
    model_config = Section

    dir: Optional[str] = Field(default=None, description='Output directory')


class ExperimentConfig(BaseModel):
    """Validated experiment file; every section but [params] is optional."""

    model_config = ConfigDict(extra='forbid', frozen=True, populate_by_name=True)

    params: ProblemParams
    measure: MeasureSection = Field(default_factory=MeasureSection)
    solver: SolverSection = Field(default_factory=SolverSection)
    grid_section: GridSection = Field(default_factory=GridSection, alias='grid')
    seeds: SeedsSection = Field(default_factory=SeedsSection)
    verify: VerifySection = Field(default_factory=VerifySection)
    lambda_star: LambdaStarSection = Field(default_factory=LambdaStarSection)
    bootstrap: BootstrapSection = Field(default_factory=BootstrapSection)
    tolerances: TolerancesSection = Field(default_factory=TolerancesSection)
    output: OutputSection = Field(default_factory=OutputSection)
    refine: int = Field(default=0, ge=0, description='Grid doublings from --refine')

    @classmethod
    def from_dict(cls, data: dict) -> 'ExperimentConfig':
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            issues = []
            for error in e.errors():
                location = '.'.join(str(part) for part in error['loc'])
                issues.append(f'{location}: {error["msg"]}')
            raise ConfigError(issues) from e

    @classmethod
    def from_toml(cls, path: str) -> 'ExperimentConfig':
        try:
            with open(path, 'rb') as f:
                data = tomllib.load(f)
        except FileNotFoundError:
            raise ConfigError([f'config file not found: {path}'])
        except tomllib.TOMLDecodeError as e:
            raise ConfigError([f'config file is not valid TOML: {e}'])
        return cls.from_dict(data)

    def with_overrides(
        self, seed: Optional[int] = None, refine: Optional[int] = None
    ) -> 'ExperimentConfig':
        update = {}
        if seed is not None:
            update['seeds'] = SeedsSection(mc=seed)
        if refine is not None:
            update['refine'] = refine
        return self.model_copy(update=update)

    def grid(self) -> RadialGrid:
        section = self.grid_section
        grid = RadialGrid(r_min=section.r_min, r_max=section.r_max, n_nodes=section.n_nodes)
        return grid.refine(self.refine) if self.refine else grid

    def measure_model(self) -> SphereMeasure:
        return SphereMeasure(
            N=self.params.N, h=self.measure.h, rho=self.measure.rho, m=self.measure.m
        )

    def solver_config(self) -> SolverConfig:
        section = self.solver
        return SolverConfig(
            R=section.R,
            envelope_factor=section.envelope_factor,
            M=section.M,
            tol=section.tol,
            max_iter=section.max_iter,
            blowup_threshold=section.blowup_threshold,
            grid=self.grid(),
        )


def _collect(issues: List[str], label: str, build) -> None:
    try:
        build()
    except ConfigError as e:
        issues.extend(f'{label}: {issue}' for issue in e.issues)
    except (ParameterError, ValidationError, ValueError) as e:
        issues.append(f'{label}: {e}')


def preflight(config: ExperimentConfig, command: str) -> None:
    """Check every precondition a command relies on and report all violations at once."""
    issues: List[str] = []
    params = config.params

    _collect(issues, 'grid', config.grid)
    if command in ('solve', 'lambda-star'):
        if not 1 < params.k < params.N - 1:
            issues.append(f'params: 1 < k < N - 1 violated: k={params.k}')
        _collect(issues, 'measure', config.measure_model)
        _collect(issues, 'solver', config.solver_config)
        if math.isfinite(config.solver.R) and params.N != 3:
            issues.append(f'solver: finite R needs N = 3, got N={params.N}')
    if command == 'lambda-star':
        lo, hi = config.lambda_star.bracket
        if not 0 < lo < hi:
            issues.append(f'lambda_star: 0 < bracket[0] < bracket[1] violated: {lo}, {hi}')
        if not config.lambda_star.rel_width > 0:
            issues.append('lambda_star: rel_width > 0 violated')
    if command == 'bootstrap':
        if not params.k > 1:
            issues.append(f'params: bootstrap needs k > 1, got k={params.k}')
        if config.bootstrap.n_max < 1:
            issues.append('bootstrap: n_max >= 1 violated')
    if command == 'verify':
        if config.verify.mc_samples < 10_000:
            issues.append('verify: mc_samples >= 10000 violated')

    if issues:
        raise ConfigError(issues)
