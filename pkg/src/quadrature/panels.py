from functools import lru_cache
from typing import Tuple

import numpy as np
from numpy.polynomial import legendre

PANEL_ORDER = 16
GRADED_LEVELS = 18
GRADED_RATIO = 0.3


@lru_cache(maxsize=16)
def _reference_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre_panels(edges: np.ndarray, order: int = PANEL_ORDER) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on consecutive panels.

    Args:
        edges (np.ndarray): Panel edges, shape (m + 1,).
        order (int): Points per panel.

    Returns:
        Tuple[np.ndarray, np.ndarray]: nodes and weights, shape (m, order).
    """
    x, w = _reference_rule(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def graded_offsets(
    length: float,
    order: int = PANEL_ORDER,
    levels: int = GRADED_LEVELS,
    ratio: float = GRADED_RATIO,
) -> Tuple[np.ndarray, np.ndarray]:
    """Offsets in (0, length) and weights graded toward offset 0.

    Panels [length*ratio^{j+1}, length*ratio^j] plus the innermost
    [0, length*ratio^levels]; suited to |offset|^{-e} with e < 1.
    """
    cuts = length * ratio ** np.arange(levels, -1, -1, dtype=float)
    edges = np.concatenate(([0.0], cuts))
    nodes, weights = gauss_legendre_panels(edges, order)
    return nodes.ravel(), weights.ravel()
