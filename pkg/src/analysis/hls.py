import logging

from src.analysis.holder import AnalysisConfig
from src.operators.radial_fn import RadialFn
from src.operators.riesz import riesz_potential_radial
from src.quadrature.adaptive import DEFAULT_TOL

logger = logging.getLogger(__name__)


def hls_check(f: RadialFn, s: float, alpha: float, N: int, tol: float = DEFAULT_TOL) -> float:
    """Ratio ||I_alpha f||_q / ||f||_s on R^{N-1}, q = (N-1) s / (N-1-alpha s).

    Args:
        f (RadialFn): Radial data in L^s.
        s (float): Source exponent, 1 < s < (N-1)/alpha.
        alpha (float): Order of the Riesz potential.
        N (int): Dimension of the half space.
        tol (float): Quadrature tolerance of the potential.

    Returns:
        float: The ratio; 0 for zero input.
    """
    pack = AnalysisConfig(N=N, alpha=alpha, s=s)
    if f.is_zero:
        return 0.0
    d = N - 1
    potential = riesz_potential_radial(f, alpha, d, tol=tol)
    ratio = potential.lp_norm(pack.q, d) / f.lp_norm(s, d)
    logger.debug('hls ratio alpha=%g s=%g q=%g: %.8g', alpha, s, pack.q, ratio)
    return ratio
