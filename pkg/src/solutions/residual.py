import math
from typing import Iterable, List, NamedTuple, Optional

import numpy as np

from src.core.params import ProblemParams
from src.operators.radial_fn import RadialFn
from src.operators.riesz import composed_trace_at
from src.operators.truncated import truncated_trace_at
from src.quadrature.adaptive import DEFAULT_TOL

RESIDUAL_FLOOR = 1e-300


class FixedPointResidual(NamedTuple):
    sup_rel_residual: float
    per_point: List[float]


def fixed_point_residual(
    v: RadialFn,
    params: ProblemParams,
    r_samples: Iterable[float],
    tol: float = DEFAULT_TOL,
    source: Optional[RadialFn] = None,
    R: float = math.inf,
) -> FixedPointResidual:
    """Relative residual |v - Tv| / max(v, floor) of the boundary equation.

    Tv is evaluated pointwise by adaptive quadrature, independently of the
    kernel matrices the Picard iteration runs on.

    Args:
        v (RadialFn): Candidate trace.
        params (ProblemParams): Problem parameters.
        r_samples (Iterable[float]): Radii where the residual is measured.
        tol (float): Quadrature tolerance of each Tv evaluation.
        source (Optional[RadialFn]): Trace of U^nu added to the nonlinear term.
        R (float): Truncation radius of the boundary integrals, inf for none.

    Returns:
        FixedPointResidual: Sup over the samples and the per-point values.
    """
    radii = np.asarray(list(r_samples), dtype=float)
    if math.isinf(R):
        image = composed_trace_at(v, params, radii, tol=tol)
    else:
        image = truncated_trace_at(v, params, R, radii, tol=tol)
    if source is not None:
        image = image + source(radii)
    values = v(radii)
    per_point = np.abs(values - image) / np.maximum(values, RESIDUAL_FLOOR)
    return FixedPointResidual(
        sup_rel_residual=float(np.max(per_point)) if per_point.size else 0.0,
        per_point=per_point.tolist(),
    )
