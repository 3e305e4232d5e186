"""Pointwise Schrodinger residual |psi''/psi - V + E| on a grid."""

import numpy as np

NODE_EXCLUSION_SPACINGS = 10


class AllPointsExcluded(ValueError):
    """Every grid point fell inside a node-exclusion zone."""


def second_derivative(psi, x, step):
    """Centered 5-point second derivative of callable ``psi`` at ``x``."""
    return (
        -psi(x - 2 * step) + 16 * psi(x - step) - 30 * psi(x)
        + 16 * psi(x + step) - psi(x + 2 * step)
    ) / (12 * step * step)


def node_mask(values, spacings=NODE_EXCLUSION_SPACINGS):
    """Boolean mask of points at least ``spacings`` indices away from a node (sign change or exact zero)."""
    values = np.asarray(values)
    keep = values != 0
    sign = np.sign(values)
    changes = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    idx = np.arange(values.size)
    for i in changes:
        # node lies between i and i+1
        keep &= (idx < i - spacings + 1) | (idx > i + spacings)
    for i in np.nonzero(values == 0)[0]:
        keep &= np.abs(idx - i) > spacings
    return keep


def residual_profile(psi, potential, energy, grid):
    """Return (x, residual) on the node-free part of a uniform grid."""
    grid = np.asarray(grid, dtype=float)
    if grid.size < 3:
        raise ValueError("residual grid needs at least 3 points")
    step = float(np.median(np.diff(grid)))
    values = psi(grid)
    keep = node_mask(values)
    if not keep.any():
        raise AllPointsExcluded("all grid points fall in node-exclusion zones")
    x = grid[keep]
    ratio = second_derivative(psi, x, step) / psi(x)
    return x, np.abs(ratio - potential(x) + energy)


def max_residual(psi, potential, energy, grid):
    return float(np.max(residual_profile(psi, potential, energy, grid)[1]))
