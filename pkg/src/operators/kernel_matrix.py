"""Precomputed kernel matrices for radial Riesz potentials on a RadialGrid.

Data are represented by hat functions that are linear in log r between grid
nodes, constant below r_min and, in full-space mode, continued as the power
(r / r_max)^{-tail_exp} above r_max. Row i of a matrix integrates the kernel
A_beta(r_i, .) against each basis function, so that I v(r_i) ~ (M @ v)[i].
"""

import logging
import math
from functools import lru_cache
from typing import Optional

import numpy as np

from src.core.errors import ParameterError, PotentialDivergenceError
from src.core.params import ProblemParams
from src.quadrature.angular import angular_kernel_array, angular_kernel_from_ratio
from src.quadrature.grid import RadialGrid
from src.quadrature.panels import gauss_legendre_panels, graded_offsets

logger = logging.getLogger(__name__)

TAIL_DECAY_SPAN = 60.0
TAIL_GROWTH = 1.25


def _tail_edges(step: float, decay: float) -> np.ndarray:
    span = TAIL_DECAY_SPAN / decay
    widths = [step]
    while sum(widths) < span:
        widths.append(widths[-1] * TAIL_GROWTH)
    return np.concatenate(([0.0], np.cumsum(widths)))


def _build_rows(
    grid: RadialGrid, d: int, beta: float, tail_exp: Optional[float]
) -> np.ndarray:
    nodes = grid.nodes
    n = grid.n_nodes
    step = math.log(grid.ratio)
    matrix = np.zeros((n, n))

    x_plain, w_plain = gauss_legendre_panels(np.array([0.0, step]))
    x_plain, w_plain = x_plain.ravel(), w_plain.ravel()
    x_graded, w_graded = graded_offsets(step)

    x_origin, w_origin = gauss_legendre_panels(np.array([0.0, 1.0]))
    x_origin, w_origin = x_origin.ravel(), w_origin.ravel()
    f_graded, wf_graded = graded_offsets(1.0)

    if tail_exp is not None:
        decay = tail_exp + beta - d
        x_tail, w_tail = gauss_legendre_panels(_tail_edges(step, decay))
        x_tail, w_tail = x_tail.ravel(), w_tail.ravel()

    for i in range(n):
        r_i = nodes[i]
        row = matrix[i]

        for j in range(n - 1):
            if j == i:
                # singular node at the left end of the panel
                s = r_i * np.exp(x_graded)
                kernel = angular_kernel_from_ratio(
                    d, beta, s, np.exp(-x_graded), -np.expm1(-2.0 * x_graded)
                )
                theta = x_graded / step
                g = w_graded * s**d * kernel
            elif j == i - 1:
                # singular node at the right end of the panel
                s = r_i * np.exp(-x_graded)
                kernel = angular_kernel_from_ratio(
                    d, beta, r_i, np.exp(-x_graded), -np.expm1(-2.0 * x_graded)
                )
                theta = 1.0 - x_graded / step
                g = w_graded * s**d * kernel
            else:
                s = nodes[j] * np.exp(x_plain)
                kernel = angular_kernel_array(d, beta, r_i, s)
                theta = x_plain / step
                g = w_plain * s**d * kernel
            row[j] += float(np.sum(g * (1.0 - theta)))
            row[j + 1] += float(np.sum(g * theta))

        r0 = nodes[0]
        if i == 0:
            s = r0 * (1.0 - f_graded)
            kernel = angular_kernel_from_ratio(
                d, beta, r0, 1.0 - f_graded, f_graded * (2.0 - f_graded)
            )
            row[0] += float(np.sum(wf_graded * r0 * s ** (d - 1) * kernel))
        else:
            s = r0 * x_origin
            kernel = angular_kernel_array(d, beta, r_i, s)
            row[0] += float(np.sum(w_origin * r0 * s ** (d - 1) * kernel))

        if tail_exp is not None:
            r_last = nodes[-1]
            if i == n - 1:
                x = np.concatenate((x_graded, x_tail[x_tail > step]))
                w = np.concatenate((w_graded, w_tail[x_tail > step]))
            else:
                x, w = x_tail, w_tail
            s = r_last * np.exp(x)
            if i == n - 1:
                kernel = angular_kernel_from_ratio(d, beta, s, np.exp(-x), -np.expm1(-2.0 * x))
            else:
                kernel = angular_kernel_array(d, beta, r_i, s)
            row[-1] += float(np.sum(w * np.exp(-tail_exp * x) * s**d * kernel))

    return matrix


@lru_cache(maxsize=32)
def radial_kernel_matrix(
    grid: RadialGrid, d: int, beta: float, tail_exp: Optional[float] = None
) -> np.ndarray:
    """Matrix of the radial potential with kernel |x' - y'|^{-beta} on R^d.

    Args:
        grid (RadialGrid): Nodes of data and output.
        d (int): Dimension of the hyperplane.
        beta (float): Kernel exponent, 0 < beta < d.
        tail_exp (Optional[float]): Tail of the data beyond r_max; None
            truncates the integral at r_max.

    Returns:
        np.ndarray: Read-only (n, n) matrix.
    """
    if not 0 < beta < d:
        raise ParameterError(f'0 < beta < d violated: beta={beta}, d={d}')
    if tail_exp is not None and not tail_exp > d - beta:
        raise PotentialDivergenceError(
            f'potential infinite: data tail exponent {tail_exp:.6g} must exceed '
            f'alpha = {d - beta:.6g}'
        )
    logger.info(
        'assembling %dx%d kernel matrix (d=%d, beta=%g, %s)',
        grid.n_nodes,
        grid.n_nodes,
        d,
        beta,
        'truncated' if tail_exp is None else f'tail {tail_exp:g}',
    )
    matrix = _build_rows(grid, d, beta, tail_exp)
    matrix.setflags(write=False)
    return matrix


def composed_kernel_matrix(params: ProblemParams, grid: RadialGrid) -> np.ndarray:
    """Full-space matrix of Int w(z') |x' - z'|^{-(k-1)} dz', data tail p (k - 1)."""
    return radial_kernel_matrix(
        grid, params.d, params.k - 1.0, params.p * (params.k - 1.0)
    )


def truncated_double_kernel_matrix(
    params: ProblemParams, grid: RadialGrid
) -> np.ndarray:
    """Discrete K_R: the |.|^{-k} potential followed by the |.|^{-(N-2)} one, both on B'_R."""
    if params.N != 3:
        raise ParameterError(
            f'truncated double kernel is implemented for N = 3 only, got N={params.N}'
        )
    inner = radial_kernel_matrix(grid, params.d, params.k, None)
    outer = radial_kernel_matrix(grid, params.d, float(params.N - 2), None)
    product = outer @ inner
    product.setflags(write=False)
    return product
