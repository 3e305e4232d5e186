"""Orthogonal polynomials evaluated by three-term recurrence."""

import numpy as np


def hermite(n, x):
    """Physicists' Hermite polynomial H_n(x).

    Works elementwise on arrays. Uses H_{k+1} = 2x H_k - 2k H_{k-1}.
    """
    if n < 0:
        raise ValueError(f"hermite order must be non-negative, got {n}")
    x = np.asarray(x, dtype=float) if not np.iscomplexobj(x) else np.asarray(x)
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = 2.0 * x
    for k in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return h if h.ndim else float(h)


def laguerre(n, alpha, x):
    """Generalized Laguerre polynomial L_n^(alpha)(x), alpha > -1."""
    if n < 0:
        raise ValueError(f"laguerre order must be non-negative, got {n}")
    if alpha <= -1:
        raise ValueError(f"laguerre alpha must exceed -1, got {alpha}")
    x = np.asarray(x, dtype=float)
    l_prev = np.ones_like(x)
    if n == 0:
        return l_prev if l_prev.ndim else float(l_prev)
    l = 1.0 + alpha - x
    for k in range(1, n):
        l_prev, l = l, ((2 * k + 1 + alpha - x) * l - (k + alpha) * l_prev) / (k + 1)
    return l if l.ndim else float(l)
