import logging
import math
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate

from src.core.errors import ParameterError, QuadratureError
from src.quadrature.grid import SingularityHint

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
NESTED_TOL = 1e-6

GRADING_RATIO = 0.15
MAX_GRADING_LEVELS = 40
# Graded panels never get closer to a nonzero singular point than this,
# relative to its location, so nodes stay distinct from it in floating point.
RESOLUTION_FLOOR = 1e-11


class PowerTail(BaseModel):
    """Integrand equals coeff * t^{-exponent} for t >= start."""

    model_config = ConfigDict(frozen=True)

    coeff: float
    exponent: float = Field(..., gt=1)
    start: float = Field(..., gt=0)

    def integral(self) -> float:
        return self.coeff * self.start ** (1.0 - self.exponent) / (
            self.exponent - 1.0
        )


class QuadratureResult(NamedTuple):
    value: float
    err_est: float
    converged: bool
    n_panels: int


def _grading_levels(exponent: float, tol: float, length: float, location: float) -> int:
    strength = max(1.0 - max(exponent, 0.0), 1e-3)
    levels = math.ceil(math.log(tol) / (strength * math.log(GRADING_RATIO)))
    levels = min(max(levels, 4), MAX_GRADING_LEVELS)
    if location != 0.0:
        floor = RESOLUTION_FLOOR * abs(location)
        if length <= floor:
            return 0
        levels = min(levels, int(math.log(floor / length) / math.log(GRADING_RATIO)))
    return max(levels, 0)


def _graded_panels(
    lo: float, hi: float, toward_lo: bool, exponent: float, tol: float
) -> List[Tuple[float, float]]:
    length = hi - lo
    anchor = lo if toward_lo else hi
    levels = _grading_levels(exponent, tol, length, anchor)
    offsets = [length * GRADING_RATIO**j for j in range(levels + 1)]
    if toward_lo:
        cuts = [lo] + [lo + offset for offset in reversed(offsets[1:])] + [hi]
    else:
        cuts = [lo] + [hi - offset for offset in offsets[1:]] + [hi]
    return list(zip(cuts[:-1], cuts[1:]))


def _build_panels(
    points: List[float], singular: Dict[float, float], tol: float
) -> List[Tuple[float, float]]:
    panels: List[Tuple[float, float]] = []
    for lo, hi in zip(points[:-1], points[1:]):
        at_lo = lo in singular
        at_hi = hi in singular
        if at_lo and at_hi:
            mid = 0.5 * (lo + hi)
            panels.extend(_graded_panels(lo, mid, True, singular[lo], tol))
            panels.extend(_graded_panels(mid, hi, False, singular[hi], tol))
        elif at_lo:
            panels.extend(_graded_panels(lo, hi, True, singular[lo], tol))
        elif at_hi:
            panels.extend(_graded_panels(lo, hi, False, singular[hi], tol))
        else:
            panels.append((lo, hi))
    return panels


def _guarded(f: Callable[[float], float]) -> Callable[[float], float]:
    def wrapped(t: float) -> float:
        try:
            value = f(t)
        except (ZeroDivisionError, OverflowError) as exc:
            raise QuadratureError(f'integrand failed at t={t!r}: {exc}') from exc
        if math.isnan(value):
            raise QuadratureError(f'integrand returned NaN at t={t!r}')
        return value

    return wrapped


def _quad_panel(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float,
    abs_tol: float,
    limit: int,
) -> Tuple[float, float, bool]:
    out = integrate.quad(
        f, lo, hi, epsabs=abs_tol, epsrel=tol, limit=limit, full_output=1
    )
    value, err = float(out[0]), float(out[1])
    if not math.isfinite(value):
        raise QuadratureError(f'panel [{lo}, {hi}] produced {value}')
    ok = len(out) == 3 or err <= 10.0 * max(abs_tol, tol * abs(value))
    return value, err, ok


def adaptive_integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = DEFAULT_TOL,
    hints: Iterable[SingularityHint] = (),
    breakpoints: Iterable[float] = (),
    tail: Optional[PowerTail] = None,
    limit: int = 100,
    abs_tol: float = 0.0,
    strict: bool = False,
) -> QuadratureResult:
    """Integrate f over [a, b] with QUADPACK panels graded toward singularities.

    The interval is split at every breakpoint and hinted location; panels
    adjacent to a hint are subdivided geometrically toward it. An infinite
    upper limit is handled either by an analytic power tail or by the map
    t = c (1 + u) / (1 - u) beyond the last split point c. Panel results are
    summed in a fixed order.

    Args:
        f (Callable[[float], float]): Scalar integrand.
        a (float): Lower limit.
        b (float): Upper limit, may be math.inf.
        tol (float): Relative tolerance per panel.
        hints (Iterable[SingularityHint]): Known singular points.
        breakpoints (Iterable[float]): Extra split points (kinks, grid nodes).
        tail (Optional[PowerTail]): Exact power law of f beyond tail.start.
        limit (int): QUADPACK subdivision cap per panel.
        abs_tol (float): Absolute tolerance per panel.
        strict (bool): Raise QuadratureError instead of flagging non-convergence.

    Returns:
        QuadratureResult: value, err_est, converged flag, number of panels.
    """
    if not a < b:
        raise ParameterError(f'adaptive_integrate needs a < b, got a={a}, b={b}')
    if not tol > 0:
        raise ParameterError(f'tol must be positive, got {tol}')

    hints = list(hints)
    breakpoints = [float(x) for x in breakpoints if math.isfinite(x)]
    guarded = _guarded(f)

    if math.isinf(b):
        if tail is not None:
            finite_end = tail.start
        else:
            top = max([a, *breakpoints, *(h.location for h in hints)])
            finite_end = top + max(1.0, abs(top))
    else:
        finite_end = b

    singular: Dict[float, float] = {}
    for hint in hints:
        if a <= hint.location <= finite_end:
            previous = singular.get(hint.location, -math.inf)
            singular[hint.location] = max(previous, hint.exponent)

    points = sorted(
        {a, finite_end}
        | {x for x in breakpoints if a < x < finite_end}
        | {x for x in singular if a < x < finite_end}
    )
    panels = _build_panels(points, singular, tol)

    values: List[float] = []
    errors: List[float] = []
    converged = True
    for lo, hi in panels:
        if hi <= lo:
            continue
        value, err, ok = _quad_panel(guarded, lo, hi, tol, abs_tol, limit)
        values.append(value)
        errors.append(err)
        if not ok:
            converged = False
            logger.debug('panel [%g, %g] did not converge (err=%g)', lo, hi, err)

    if math.isinf(b):
        if tail is not None:
            values.append(tail.integral())
        else:
            c = finite_end

            def mapped(u: float) -> float:
                return guarded(c * (1.0 + u) / (1.0 - u)) * 2.0 * c / (1.0 - u) ** 2

            value, err, ok = _quad_panel(mapped, 0.0, 1.0, tol, abs_tol, limit)
            values.append(value)
            errors.append(err)
            converged = converged and ok

    result = QuadratureResult(
        value=math.fsum(values),
        err_est=math.fsum(errors),
        converged=converged,
        n_panels=len(values),
    )
    if not converged:
        if strict:
            raise QuadratureError(
                f'quadrature on [{a}, {b}] did not converge: '
                f'value={result.value}, err_est={result.err_est}'
            )
        logger.warning(
            'quadrature on [%g, %g] flagged non-converged (err_est=%g)',
            a,
            b,
            result.err_est,
        )
    return result
