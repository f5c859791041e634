"""Lower-bound bootstrap for the boundary trace.

A solution with trace v >= C |x'|^{-gamma_n} at infinity satisfies the same
bound with gamma_{n+1} = p gamma_n + k - N, starting from gamma_0 = k - 1.
Once some gamma_{n+1} <= 0 while gamma_n > 0, the trace cannot be integrable
against the kernel and no positive solution exists.
"""

import logging
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from src.core.errors import ParameterError
from src.core.params import ProblemParams, critical_exponents, is_critical

logger = logging.getLogger(__name__)

DIVERGENCE_THRESHOLD = Fraction(-10**6)
DEFAULT_N_MAX = 64


class VerdictKind(str, Enum):
    CERTIFIED_NONEXISTENCE = 'CertifiedNonexistence'
    NO_CERTIFICATE = 'NoCertificate'
    INCONCLUSIVE = 'Inconclusive'


class LimitKind(str, Enum):
    CONVERGES_TO_LIMIT = 'ConvergesToLimit'
    DIVERGES_TO_MINUS_INFINITY = 'DivergesToMinusInfinity'
    STATIONARY = 'Stationary'
    INCREASING = 'Increasing'
    UNDETERMINED = 'Undetermined'


class BootstrapVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: VerdictKind
    n: Optional[int] = Field(default=None, description='Last positive index of a certificate')

    def label(self) -> str:
        if self.kind == VerdictKind.CERTIFIED_NONEXISTENCE:
            return f'{self.kind.value}({self.n})'
        return self.kind.value


class LimitBehaviour(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: LimitKind
    value: Optional[float] = Field(default=None, description='Finite limit, if any')

    def label(self) -> str:
        if self.value is None:
            return self.kind.value
        return f'{self.kind.value}({self.value:.12g})'


class BootstrapTrace(BaseModel):
    """Recurrence values up to the stopping index plus their classification."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    params: ProblemParams
    gamma_seq: List[Fraction]
    stop_index: Optional[int] = Field(
        default=None, description='Index of the first nonpositive term'
    )
    verdict: BootstrapVerdict
    limit: LimitBehaviour

    def as_floats(self) -> List[float]:
        return [float(g) for g in self.gamma_seq]


def as_rational(value: Union[int, float, Fraction]) -> Fraction:
    """Exact rational for the decimal representation of a parameter."""
    if isinstance(value, Fraction):
        return value
    return Fraction(str(value))


def _limit_behaviour(params: ProblemParams, n_max: int) -> LimitBehaviour:
    N, k, p = params.N, as_rational(params.k), as_rational(params.p)
    p_star, _ = critical_exponents(params)
    if p < 1:
        return LimitBehaviour(
            kind=LimitKind.CONVERGES_TO_LIMIT, value=float((N - k) / (p - 1))
        )
    if is_critical(params.p, p_star):
        return LimitBehaviour(kind=LimitKind.STATIONARY, value=float(k - 1))
    if params.p > p_star:
        return LimitBehaviour(kind=LimitKind.INCREASING)

    # 1 <= p < p*: detected numerically by crossing the divergence threshold.
    gamma = k - 1
    for _ in range(n_max):
        gamma = p * gamma + k - N
        if gamma < DIVERGENCE_THRESHOLD:
            return LimitBehaviour(kind=LimitKind.DIVERGES_TO_MINUS_INFINITY)
    return LimitBehaviour(kind=LimitKind.UNDETERMINED)


def bootstrap_sequence(params: ProblemParams, n_max: int = DEFAULT_N_MAX) -> BootstrapTrace:
    """Run gamma_{n+1} = p gamma_n + k - N in exact rational arithmetic.

    Args:
        params (ProblemParams): Parameters with k > 1.
        n_max (int): Maximal number of recurrence steps.

    Returns:
        BootstrapTrace: Sequence up to the first nonpositive term (or n_max
            steps), verdict and limit behaviour.
    """
    if params.k <= 1:
        raise ParameterError(f'bootstrap needs k > 1, got k={params.k}')
    if n_max < 1:
        raise ParameterError(f'n_max >= 1 required, got {n_max}')

    N, k, p = params.N, as_rational(params.k), as_rational(params.p)
    p_star, _ = critical_exponents(params)

    gammas = [k - 1]
    stop_index = None
    for n in range(n_max):
        following = p * gammas[-1] + k - N
        gammas.append(following)
        if following <= 0 and gammas[n] > 0:
            stop_index = n + 1
            break

    if stop_index is not None:
        verdict = BootstrapVerdict(kind=VerdictKind.CERTIFIED_NONEXISTENCE, n=stop_index - 1)
    elif params.p > p_star or is_critical(params.p, p_star):
        verdict = BootstrapVerdict(kind=VerdictKind.NO_CERTIFICATE)
    else:
        verdict = BootstrapVerdict(kind=VerdictKind.INCONCLUSIVE)

    limit = _limit_behaviour(params, n_max)
    logger.info(
        'bootstrap N=%d k=%s p=%s: %d terms, verdict %s, limit %s',
        N,
        k,
        p,
        len(gammas),
        verdict.label(),
        limit.label(),
    )
    return BootstrapTrace(
        params=params,
        gamma_seq=gammas,
        stop_index=stop_index,
        verdict=verdict,
        limit=limit,
    )
