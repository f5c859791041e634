from enum import Enum
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.errors import ParameterError

# Relative tolerance used to decide p == p* and p == p**.
CRITICAL_RTOL = 1e-12


def is_critical(value: float, critical: float) -> bool:
    """Check whether a power sits on a critical exponent.

    Args:
        value (float): Power p.
        critical (float): Critical exponent to compare against.

    Returns:
        bool: True when |value - critical| <= 1e-12 * critical.
    """
    return abs(value - critical) <= CRITICAL_RTOL * abs(critical)


class ProblemParams(BaseModel):
    """Parameters (N, k, p, lambda) shared by every operator of the lab."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    N: int = Field(..., description='Dimension of the half space R^N_+')
    k: float = Field(..., description='Exponent of the boundary kernel |x-y|^-k')
    p: float = Field(..., description='Power of the nonlinearity u^p')
    lam: float = Field(
        default=1.0,
        alias='lambda',
        description='Coupling constant; 0 is the uncoupled limit',
    )

    @model_validator(mode='after')
    def _check_window(self) -> 'ProblemParams':
        if self.N < 3:
            raise ParameterError(f'N >= 3 violated: N={self.N}')
        if not 0 < self.k < self.N - 1:
            raise ParameterError(
                f'0 < k < N - 1 violated: k={self.k}, N - 1={self.N - 1}'
            )
        if not self.p > 0:
            raise ParameterError(f'p > 0 violated: p={self.p}')
        if not self.lam >= 0:
            raise ParameterError(f'lambda >= 0 violated: lambda={self.lam}')
        return self

    @property
    def d(self) -> int:
        """Dimension of the boundary hyperplane."""
        return self.N - 1

    def with_lambda(self, lam: float) -> 'ProblemParams':
        return ProblemParams(N=self.N, k=self.k, p=self.p, lam=lam)

    def with_p(self, p: float) -> 'ProblemParams':
        return ProblemParams(N=self.N, k=self.k, p=p, lam=self.lam)


class RegimeTag(str, Enum):
    NONEXISTENCE_K_SMALL = 'NonexistenceKSmall'
    NONEXISTENCE_SUBCRITICAL = 'NonexistenceSubcritical'
    CRITICAL_P_STAR_NO_LP_SOLUTION = 'CriticalPStarNoLpSolution'
    EXISTENCE_SUPERCRITICAL = 'ExistenceSupercritical'


class RegularFlag(str, Enum):
    NO_REGULAR = 'NoRegular'
    REGULAR_CRITICAL_BUBBLES = 'RegularCriticalBubbles'
    REGULAR_EXISTS = 'RegularExists'


class Regime(BaseModel):
    """Existence regime of the problem for given (N, k, p).

    The regular flag is reported whenever k > 1. It is marked vacuous when
    the tag says no positive solution exists at all.
    """

    model_config = ConfigDict(frozen=True)

    tag: RegimeTag
    regular: Optional[RegularFlag] = Field(
        default=None, description='Regular-solution status, only when k > 1'
    )
    vacuous: bool = Field(
        default=False,
        description='True when the regular flag speaks about an empty set',
    )

    def label(self) -> str:
        if self.regular is None:
            return self.tag.value
        return f'{self.tag.value}+{self.regular.value}'


def critical_exponents(params: ProblemParams) -> Tuple[float, float]:
    """Compute the critical exponents p* and p**.

    Args:
        params (ProblemParams): Problem parameters with k > 1.

    Returns:
        Tuple[float, float]: (p*, p**) with p* = (N-1)/(k-1), p** = 2p* - 1.
    """
    if params.k <= 1:
        raise ParameterError(
            f'critical exponents need k > 1, got k={params.k}'
        )
    p_star = (params.N - 1) / (params.k - 1)
    return p_star, 2.0 * p_star - 1.0


def classify_regime(params: ProblemParams) -> Regime:
    """Classify (N, k, p) into the existence/nonexistence regimes.

    Args:
        params (ProblemParams): Problem parameters.

    Returns:
        Regime: Tag and regular-solution flag.
    """
    if params.k <= 1:
        return Regime(tag=RegimeTag.NONEXISTENCE_K_SMALL)

    p_star, p_star_star = critical_exponents(params)

    if is_critical(params.p, p_star):
        tag = RegimeTag.CRITICAL_P_STAR_NO_LP_SOLUTION
    elif params.p < p_star:
        tag = RegimeTag.NONEXISTENCE_SUBCRITICAL
    else:
        tag = RegimeTag.EXISTENCE_SUPERCRITICAL

    if is_critical(params.p, p_star_star):
        regular = RegularFlag.REGULAR_CRITICAL_BUBBLES
    elif params.p < p_star_star:
        regular = RegularFlag.NO_REGULAR
    else:
        regular = RegularFlag.REGULAR_EXISTS

    return Regime(
        tag=tag,
        regular=regular,
        vacuous=tag != RegimeTag.EXISTENCE_SUPERCRITICAL,
    )
