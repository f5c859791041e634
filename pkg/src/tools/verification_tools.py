import logging
import math
from abc import abstractmethod
from typing import Any, Dict, List, Literal, Optional, Tuple, Type

import numpy as np
from langchain_core.callbacks import CallbackManagerForToolRun
from langchain_core.tools import BaseTool, BaseToolkit
from pydantic import BaseModel, Field, ValidationError

from src.analysis.estimates import stan6_samples, verify_estimate_stan1, verify_estimate_stan6
from src.analysis.hls import hls_check
from src.analysis.holder import (
    AnalysisConfig,
    solver_pack_holder_check,
    holder_check,
    pair_ladder,
    straddling_pairs,
)
from src.core.errors import LabError, ParameterError, RegimeError
from src.core.params import ProblemParams
from src.operators.radial_fn import RadialFn
from src.operators.riesz import composition_lhs
from src.quadrature.angular import angular_kernel
from src.quadrature.grid import RadialGrid
from src.quadrature.monte_carlo import Ball, mc_integral_oracle
from src.solutions.bubble import BUBBLE_GRID, build_bubble
from src.solutions.exact import build_exact_solution, exact_interior, exact_interior_on_axis
from src.solutions.residual import fixed_point_residual
from src.special.functions import riesz_composition_constant

logger = logging.getLogger(__name__)

VerifyTarget = Literal['composition', 'exact', 'bubble', 'estimates', 'holder', 'hls']


def bump_profile(grid: RadialGrid, decay: float = 3.0) -> RadialFn:
    """The bump (1 + s)^{-decay} sampled on the grid."""
    return RadialFn.from_profile(lambda s: (1.0 + s) ** (-decay), grid, tail_exp=decay)


def _relative_change(first: float, second: float) -> float:
    scale = max(abs(first), abs(second))
    return 0.0 if scale == 0.0 else abs(first - second) / scale


class CompositionInput(BaseModel):
    N: int = Field(default=3, description='Dimension of the half space')
    pairs: List[Tuple[float, float]] = Field(
        default=[(0.5, 1.5), (1.0, 1.5), (1.0, 1.9)],
        description='Pairs (a, b) inside 0 < a < b < N - 1',
    )
    separations: List[float] = Field(default=[0.5, 1.0, 2.0], description="|x' - z'| values")
    method: Literal['hypergeometric', 'quadrature'] = Field(
        default='hypergeometric', description='Angular factor of the direct quadrature'
    )
    rel_tol: float = Field(default=5e-3, description='Allowed relative error')
    seed: int = Field(default=0, description='Seed of the angular Monte-Carlo spot checks')
    angular_triples: int = Field(default=10, ge=0)
    mc_samples: int = Field(default=100_000)
    stderr_factor: float = Field(default=3.0, gt=0)


def angular_spot_checks(
    d: int, triples: int, samples: int, seed: int, stderr_factor: float
) -> List[Dict[str, float]]:
    """Compare A_beta(r, s) with Monte Carlo on random (r, s, beta).

    The sphere integral is d times the ball integral of the degree-zero
    extension y -> |r e1 - s y/|y||^{-beta}.
    """
    rng = np.random.default_rng(seed)
    rows = []
    while len(rows) < triples:
        r, s = rng.uniform(0.25, 2.0, size=2)
        beta = float(rng.uniform(0.25, 1.75))
        if abs(r - s) < 0.2:
            continue
        e1 = np.zeros(d)
        e1[0] = r

        def integrand(y: np.ndarray, s: float = s, beta: float = beta, e1=e1) -> np.ndarray:
            directions = y / np.linalg.norm(y, axis=1, keepdims=True)
            return d * np.linalg.norm(e1 - s * directions, axis=1) ** (-beta)

        estimate = mc_integral_oracle(
            integrand, Ball(center=(0.0,) * d, radius=1.0), samples, seed + len(rows)
        )
        value = angular_kernel(d, beta, float(r), float(s))
        allowed = max(stderr_factor * estimate.stderr, 1e-3 * abs(value))
        rows.append(
            {
                'r': float(r),
                's': float(s),
                'beta': beta,
                'closed_form': value,
                'monte_carlo': estimate.estimate,
                'stderr': estimate.stderr,
                'passed': abs(value - estimate.estimate) <= allowed,
            }
        )
    return rows


class ExactInput(BaseModel):
    params: ProblemParams
    grid: RadialGrid = Field(default_factory=RadialGrid)
    samples: List[float] = Field(
        default_factory=lambda: np.geomspace(0.1, 10.0, 9).tolist(),
        description='Radii of the residual check',
    )
    residual_tol: float = Field(default=1e-3)
    perturbation: float = Field(default=1.1, description='Scale applied to the exact solution to build a non-solution')
    axis_height: float = Field(default=1.0, description='h of the on-axis closed form')
    axis_tol: float = Field(default=1e-3)


class BubbleInput(BaseModel):
    params: ProblemParams
    t: float = Field(default=1.0, gt=0)
    grid: RadialGrid = Field(default=BUBBLE_GRID)
    samples: List[float] = Field(
        default_factory=lambda: [0.0] + np.linspace(0.5, 10.0, 20).tolist(),
        description='Radii of the residual check',
    )
    residual_tol: float = Field(default=1e-3)
    scaled_t: float = Field(default=2.0, gt=0, description='Second scale of the covariance check')
    covariance_tol: float = Field(default=1e-6)


class EstimatesInput(BaseModel):
    N: int
    k: float
    beta: float = Field(default=4.0)
    grid: RadialGrid = Field(default_factory=RadialGrid)
    refine_tol: float = Field(default=0.1, description='Allowed change under one grid doubling')


class HolderInput(BaseModel):
    params: ProblemParams
    alpha: float = Field(default=1.0)
    q: float = Field(default=4.0)
    grid: RadialGrid = Field(default_factory=RadialGrid)
    center: Tuple[float, float] = Field(default=(1.0, 0.5), description='Ladder base point')
    pack_s: Optional[float] = Field(
        default=None, description='s of the solver exponent pack; midpoint when omitted'
    )


class HLSInput(BaseModel):
    N: int
    alpha: float = Field(default=1.0)
    s: float = Field(default=1.5)
    grid: RadialGrid = Field(default_factory=RadialGrid)
    dilations: List[float] = Field(default=[0.5, 2.0])
    dilation_tol: float = Field(default=1e-2)
    refine_tol: float = Field(default=0.1)


def _error_result(target: str, error: Exception, error_type: str) -> Dict[str, Any]:
    return {
        'target': target,
        'error': str(error),
        'error_type': error_type,
        'passed': False,
        'status': 'error',
    }


class VerificationTool(BaseTool):
    """A verification target whose run returns a JSON-ready dict with a 'status' key.

    Subclasses implement _verify on the validated args_schema instance; lab
    errors raised there come back as an 'error' result instead of propagating.
    """

    def _run(
        self,
        run_manager: Optional[CallbackManagerForToolRun] = None,
        **kwargs: Any,
    ) -> Dict[str, Any]:
        try:
            result = self._verify(self.args_schema(**kwargs))
        except LabError as e:
            logger.warning('verification %s aborted: %s', self.name, e)
            return _error_result(self.name, e, type(e).__name__)
        except ValueError as e:
            return _error_result(self.name, e, 'ValidationError')
        result.setdefault('target', self.name)
        result['status'] = 'success' if result['passed'] else 'failed'
        return result

    @abstractmethod
    def _verify(self, args: BaseModel) -> Dict[str, Any]:
        """Metrics, tables and the 'passed' flag of one target."""


def run_verification(tool: BaseTool, payload: Dict[str, Any]) -> Dict[str, Any]:
    """Invoke a verification tool; a payload its schema rejects yields an error result."""
    try:
        return tool.invoke(payload)
    except ValidationError as e:
        return _error_result(tool.name, e, 'ValidationError')


class CompositionTool(VerificationTool):
    name: str = 'composition'
    description: str = (
        'Compare the Gamma closed form of C(N, a, b) with direct quadrature '
        'of the composed kernel at several separations.'
    )
    args_schema: Type[BaseModel] = CompositionInput

    def _verify(self, args: CompositionInput) -> Dict[str, Any]:
        rows = []
        for a, b in args.pairs:
            constant = riesz_composition_constant(args.N, a, b).value
            for separation in args.separations:
                closed = constant * separation ** (a - b)
                oracle = composition_lhs(args.N, a, b, separation, method=args.method)
                rows.append(
                    {
                        'a': a,
                        'b': b,
                        'separation': separation,
                        'closed_form': closed,
                        'oracle': oracle,
                        'rel_err': abs(closed - oracle) / abs(oracle),
                    }
                )
        worst = max(row['rel_err'] for row in rows)
        spot_checks = angular_spot_checks(
            args.N - 1, args.angular_triples, args.mc_samples, args.seed, args.stderr_factor
        )
        return {
            'metrics': {
                'max_rel_err': worst,
                'angular_failures': sum(not row['passed'] for row in spot_checks),
            },
            'table': rows,
            'angular_spot_checks': spot_checks,
            'tolerances': {'rel_tol': args.rel_tol, 'stderr_factor': args.stderr_factor},
            'passed': worst <= args.rel_tol and all(row['passed'] for row in spot_checks),
        }


class ExactSolutionTool(VerificationTool):
    name: str = 'exact'
    description: str = (
        'Build the supercritical power solution and check it as a fixed point, '
        'detect a scaled non-solution and compare the interior with its axis closed form.'
    )
    args_schema: Type[BaseModel] = ExactInput

    def _verify(self, args: ExactInput) -> Dict[str, Any]:
        sol = build_exact_solution(args.params)
        trace = sol.trace(args.grid)
        residual = fixed_point_residual(trace, args.params, args.samples)

        sigma = args.perturbation
        perturbed = fixed_point_residual(trace.scaled(sigma), args.params, args.samples)
        expected = abs(1.0 - sigma ** (args.params.p - 1.0))
        perturbed_err = abs(perturbed.sup_rel_residual - expected) / expected

        axis_closed = exact_interior_on_axis(sol, args.axis_height)
        axis_quad = exact_interior(sol, (0.0, args.axis_height), grid=args.grid)
        axis_err = abs(axis_closed - axis_quad) / axis_closed

        passed = (
            residual.sup_rel_residual <= args.residual_tol
            and perturbed_err <= 0.05
            and axis_err <= args.axis_tol
        )
        return {
            'params': args.params,
            'metrics': {
                'trace_coeff': sol.trace_coeff,
                'trace_exp': sol.trace_exp,
                'interior_coeff': sol.interior_coeff,
                'residual': residual.sup_rel_residual,
                'perturbed_residual': perturbed.sup_rel_residual,
                'perturbed_expected': expected,
                'axis_closed_form': axis_closed,
                'axis_quadrature': axis_quad,
                'axis_rel_err': axis_err,
            },
            'per_point': dict(zip(map(str, args.samples), residual.per_point)),
            'tolerances': {'residual': args.residual_tol, 'axis': args.axis_tol},
            'passed': passed,
        }


class BubbleTool(VerificationTool):
    name: str = 'bubble'
    description: str = (
        'Collocate the critical bubble constant, certify the bubble trace as a '
        'fixed point and check the covariance of the trace under t-scaling.'
    )
    args_schema: Type[BaseModel] = BubbleInput

    def _verify(self, args: BubbleInput) -> Dict[str, Any]:
        bubble = build_bubble(args.params, args.t)
        residual = fixed_point_residual(bubble.trace(args.grid), args.params, args.samples)

        other = build_bubble(args.params, args.scaled_t)
        ratio = args.scaled_t / args.t
        half = 0.5 * (args.params.k - 1.0)
        covariance = max(
            _relative_change(
                other.trace_at(x), bubble.trace_at(x / ratio) * ratio ** (-half)
            )
            for x in args.samples
        )
        passed = (
            residual.sup_rel_residual <= args.residual_tol
            and covariance <= args.covariance_tol
        )
        return {
            'params': args.params,
            'metrics': {
                't': args.t,
                'trace_coeff': bubble.trace_coeff,
                'residual': residual.sup_rel_residual,
                'scaling_covariance': covariance,
            },
            'tolerances': {
                'residual': args.residual_tol,
                'covariance': args.covariance_tol,
            },
            'passed': passed,
        }


class EstimatesTool(VerificationTool):
    name: str = 'estimates'
    description: str = (
        'Sup-ratios of the two weighted kernel estimates on a grid and on its '
        'refinement; they must be finite and stable.'
    )
    args_schema: Type[BaseModel] = EstimatesInput

    def _verify(self, args: EstimatesInput) -> Dict[str, Any]:
        fine = args.grid.refine()
        stan1 = verify_estimate_stan1(args.k, args.beta, args.N, args.grid)
        stan1_fine = verify_estimate_stan1(args.k, args.beta, args.N, fine)
        stan6 = verify_estimate_stan6(args.k, args.N, stan6_samples(args.grid))
        stan6_fine = verify_estimate_stan6(args.k, args.N, stan6_samples(fine))
        change1 = _relative_change(stan1.sup_ratio, stan1_fine.sup_ratio)
        change6 = _relative_change(stan6.sup_ratio, stan6_fine.sup_ratio)
        finite = all(
            math.isfinite(x.sup_ratio) for x in (stan1, stan1_fine, stan6, stan6_fine)
        )
        return {
            'params': {'N': args.N, 'k': args.k, 'beta': args.beta},
            'metrics': {
                'stan1_sup': stan1.sup_ratio,
                'stan1_sup_refined': stan1_fine.sup_ratio,
                'stan1_argmax': stan1.argmax,
                'stan1_change': change1,
                'stan6_sup': stan6.sup_ratio,
                'stan6_sup_refined': stan6_fine.sup_ratio,
                'stan6_argmax': stan6.argmax,
                'stan6_change': change6,
            },
            'tolerances': {'refine': args.refine_tol},
            'passed': finite and change1 <= args.refine_tol and change6 <= args.refine_tol,
        }


class HolderTool(VerificationTool):
    name: str = 'holder'
    description: str = (
        'Empirical Hoelder constant and exponent of the lifting of a bump on '
        'a four-decade pair ladder, across the boundary plane, and for the '
        'solver exponent pack.'
    )
    args_schema: Type[BaseModel] = HolderInput

    def _verify(self, args: HolderInput) -> Dict[str, Any]:
        bump = bump_profile(args.grid)
        ladder = holder_check(bump, args.alpha, args.q, args.params, pair_ladder(args.center))
        across = holder_check(
            bump, args.alpha, args.q, args.params, straddling_pairs(args.center[0])
        )
        lifted = solver_pack_holder_check(
            bump.pow(args.params.p), args.params, pair_ladder(args.center), s=args.pack_s
        )
        pack = AnalysisConfig.solver_pack(args.params, args.pack_s)
        return {
            'params': args.params,
            'metrics': {
                'gamma': ladder.gamma,
                'ladder_const': ladder.emp_const,
                'ladder_exponent': ladder.emp_exponent,
                'boundary_const': across.emp_const,
                'boundary_exponent': across.emp_exponent,
                'pack_s': pack.s,
                'pack_q': pack.q,
                'pack_gamma': lifted.gamma,
                'pack_const': lifted.emp_const,
                'pack_exponent': lifted.emp_exponent,
            },
            'tolerances': {'exponent_slack': 0.05},
            'passed': ladder.passed and across.passed and lifted.passed,
        }


class HLSTool(VerificationTool):
    name: str = 'hls'
    description: str = (
        'Ratio of the HLS inequality for a bump, its invariance under '
        'dilations and its stability under grid refinement.'
    )
    args_schema: Type[BaseModel] = HLSInput

    def _verify(self, args: HLSInput) -> Dict[str, Any]:
        bump = bump_profile(args.grid)
        ratio = hls_check(bump, args.s, args.alpha, args.N)
        dilated = {
            str(rho): hls_check(bump.dilated(rho), args.s, args.alpha, args.N)
            for rho in args.dilations
        }
        refined = hls_check(bump_profile(args.grid.refine()), args.s, args.alpha, args.N)
        worst_dilation = max(
            (_relative_change(ratio, value) for value in dilated.values()), default=0.0
        )
        change = _relative_change(ratio, refined)
        return {
            'params': {'N': args.N, 'alpha': args.alpha, 's': args.s},
            'metrics': {
                'ratio': ratio,
                'q': AnalysisConfig(N=args.N, alpha=args.alpha, s=args.s).q,
                'dilated': dilated,
                'dilation_change': worst_dilation,
                'refined_ratio': refined,
                'refine_change': change,
            },
            'tolerances': {'dilation': args.dilation_tol, 'refine': args.refine_tol},
            'passed': math.isfinite(ratio)
            and worst_dilation <= args.dilation_tol
            and change <= args.refine_tol,
        }


class VerificationToolkit(BaseToolkit):
    enable_composition: bool = Field(default=True)
    enable_exact: bool = Field(default=True)
    enable_bubble: bool = Field(default=True)
    enable_estimates: bool = Field(default=True)
    enable_holder: bool = Field(default=True)
    enable_hls: bool = Field(default=True)

    def get_tools(self) -> List[VerificationTool]:
        tools: List[VerificationTool] = []

        if self.enable_composition:
            tools.append(CompositionTool())
        if self.enable_exact:
            tools.append(ExactSolutionTool())
        if self.enable_bubble:
            tools.append(BubbleTool())
        if self.enable_estimates:
            tools.append(EstimatesTool())
        if self.enable_holder:
            tools.append(HolderTool())
        if self.enable_hls:
            tools.append(HLSTool())

        return tools

    def get_tool(self, name: str) -> VerificationTool:
        for tool in self.get_tools():
            if tool.name == name:
                return tool
        raise ParameterError(f'unknown or disabled verification target {name!r}')


REJECTION_ERRORS = (ParameterError.__name__, RegimeError.__name__, 'ValidationError')
