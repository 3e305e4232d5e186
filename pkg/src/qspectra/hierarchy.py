"""Perturbation-hierarchy eigenvalues for 1-D even polynomial oscillators.

The moderating factor h(x) = exp(-sum_N j_N x^(2N+2)/(2N+2)) is generated
order by order from the recurrence

    j_0 = a
    j_N = (sum_{k<N} j_k j_{N-1-k} - mu d_{N1} - sigma d_{N2} - eta d_{N3})
          / (2N + 2n + alpha_n)

and the scale a is fixed by an order-N closure condition. The level
energy is (2n + 1) a*, with a* the largest positive root of the closure.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from qspectra.potential import PolynomialPotential
from qspectra.special import hermite

MAX_ORDER = 40
ROOT_RTOL = 1e-12
DEDUP_RTOL = 1e-9
REFINE_DEPTH = 6
REFINE_SAMPLES = 33

_MODE_ALIASES = {
    "top": "top",
    "top-order": "top",
    "jn": "jn",
    "jN-zero": "jn",
    "jn-zero": "jn",
}


class HierarchyError(RuntimeError):
    """Numerical failure inside the hierarchy (non-finite closure values)."""


class NoRootError(HierarchyError):
    """The closure has no sign change inside the scan window."""


def _mode(mode):
    try:
        return _MODE_ALIASES[mode]
    except KeyError:
        raise ValueError(f"unknown closure mode {mode!r}; use 'top' or 'jn'") from None


def _check_potential(potential):
    if potential.radial:
        raise ValueError("the hierarchy handles 1-D potentials only (ell must be None)")


def alpha(n):
    """State constant: alpha_0 = 1, alpha_n = (n - 1) + alpha_{n-1}."""
    if n < 0:
        raise ValueError(f"level index must be non-negative, got {n}")
    value = 1
    for m in range(1, n + 1):
        value += m - 1
    return value


def _table(potential, n, a, order):
    """j_0..j_order as a list of arrays broadcast over ``a``."""
    if order < 0 or order > MAX_ORDER:
        raise ValueError(f"order must lie in [0, {MAX_ORDER}], got {order}")
    forcing = (0.0,) + potential.power_coefficients()
    base = 2 * n + alpha(n)
    j = [np.asarray(a, dtype=float)]
    for m in range(1, order + 1):
        acc = sum(j[k] * j[m - 1 - k] for k in range(m))
        if m <= 3:
            acc = acc - forcing[m]
        j.append(acc / (2 * m + base))
    return j


def coefficients(potential, n, a, order):
    """Hierarchy coefficients j_0..j_order at trial scale ``a`` (scalar)."""
    _check_potential(potential)
    if not a > 0:
        raise ValueError(f"trial scale a must be positive, got {a}")
    return np.array([float(c) for c in _table(potential, n, float(a), order)])


def _closure(potential, n, a, order, mode):
    if mode == "jn":
        return _table(potential, n, a, order)[order]
    j = _table(potential, n, a, order)
    total = sum(j[k] * j[order - k] for k in range(order + 1))
    if order == 1:
        total = total - potential.sigma
    elif order == 2:
        total = total - potential.eta
    return total


def closure_value(potential, n, a, order, mode="top"):
    """Order-N eigenvalue condition evaluated at trial scale ``a``.

    ``top``: sum_{k=0}^{N} j_k j_{N-k} - sigma d_{N1} - eta d_{N2}.
    ``jn``: j_N itself.
    """
    _check_potential(potential)
    if order < 1:
        raise ValueError("closure needs order >= 1")
    a_arr = np.asarray(a, dtype=float)
    if np.any(a_arr <= 0):
        raise ValueError("trial scale a must be positive")
    value = _closure(potential, n, a_arr, order, _mode(mode))
    return float(value) if np.ndim(value) == 0 else value


def default_scan(potential, n):
    """(a_lo, a_hi, samples) wide enough to hold the upper root."""
    mu, sigma, eta = potential.power_coefficients()
    growth = 1.0 + np.sqrt(abs(mu)) + max(sigma, 0.0) ** (1 / 3) + eta**0.25
    return (0.01, max(5.0, 2.0 * growth * (n + 1)), 1024)


def _refine_dips(potential, n, order, mode, grid, values, depth=REFINE_DEPTH):
    """Resample around sign changes and around dips of |closure|.

    Roots closer than the sample spacing hide from a sign-change scan: an
    even number leaves only a dip in |closure|, an odd number more than one
    leaves a single sign change. Both kinds of interval are rescanned more
    finely, ``depth`` times.
    """
    for _ in range(depth):
        mag = np.abs(values)
        sign = np.sign(values)
        dips = np.nonzero(
            (mag[1:-1] < mag[:-2])
            & (mag[1:-1] < mag[2:])
            & (sign[:-2] == sign[1:-1])
            & (sign[2:] == sign[1:-1])
        )[0] + 1
        changes = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
        spans = [(grid[i - 1], grid[i + 1]) for i in dips] + [(grid[i], grid[i + 1]) for i in changes]
        if not spans:
            break
        extra = np.concatenate([np.linspace(lo, hi, REFINE_SAMPLES)[1:-1] for lo, hi in spans])
        with np.errstate(over="ignore", invalid="ignore"):
            extra_values = _closure(potential, n, extra, order, mode)
        grid = np.concatenate([grid, extra])
        values = np.concatenate([values, extra_values])
        order_idx = np.argsort(grid, kind="stable")
        grid, values = grid[order_idx], values[order_idx]
        keep = np.concatenate([[True], np.diff(grid) > 0])
        grid, values = grid[keep], values[keep]
    return grid, values


def order_roots(potential, n, order, mode="top", scan=None):
    """Sorted positive roots of the closure inside the scan window.

    Roots are bracketed by sign changes on a uniform sample of the window
    (locally resampled around sign changes and dips of |closure|) and
    refined by bisection to relative width 1e-12.
    """
    _check_potential(potential)
    mode = _mode(mode)
    a_lo, a_hi, samples = scan if scan is not None else default_scan(potential, n)
    if not 0 < a_lo < a_hi:
        raise ValueError(f"scan window must satisfy 0 < a_lo < a_hi, got ({a_lo}, {a_hi})")
    if samples < 64:
        raise ValueError("scan needs at least 64 samples")
    grid = np.linspace(a_lo, a_hi, int(samples))
    with np.errstate(over="ignore", invalid="ignore"):
        values = _closure(potential, n, grid, order, mode)
    if not np.all(np.isfinite(values)):
        raise HierarchyError(f"closure not finite on scan window at order {order}")
    grid, values = _refine_dips(potential, n, order, mode, grid, values)

    exact = grid[values == 0.0]
    sign = np.sign(values)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    lo, hi = grid[idx], grid[idx + 1]
    f_lo = values[idx]
    while lo.size and np.any(hi - lo > ROOT_RTOL * hi):
        mid = 0.5 * (lo + hi)
        f_mid = _closure(potential, n, mid, order, mode)
        left = np.sign(f_mid) == np.sign(f_lo)
        lo = np.where(left, mid, lo)
        f_lo = np.where(left, f_mid, f_lo)
        hi = np.where(left, hi, mid)

    roots = np.sort(np.concatenate([exact, 0.5 * (lo + hi)]))
    if roots.size == 0:
        raise NoRootError(
            f"no root in scan window ({a_lo}, {a_hi}) for n={n}, order={order}, mode={mode}"
        )
    kept = [roots[0]]
    for r in roots[1:]:
        if r - kept[-1] > DEDUP_RTOL * r:
            kept.append(r)
    return [float(r) for r in kept]


@dataclass(frozen=True)
class HierarchyState:
    potential: PolynomialPotential
    n: int
    order: int
    alpha_n: int
    coefficients: tuple
    root: float
    energy: float
    mode: str = "top"


def solve_state(potential, n, order, mode="top", scan=None):
    """Upper-root solution of the order-N closure as a :class:`HierarchyState`."""
    mode = _mode(mode)
    root = order_roots(potential, n, order, mode, scan)[-1]
    coeffs = coefficients(potential, n, root, order)
    return HierarchyState(
        potential=potential,
        n=n,
        order=order,
        alpha_n=alpha(n),
        coefficients=tuple(float(c) for c in coeffs),
        root=root,
        energy=(2 * n + 1) * root,
        mode=mode,
    )


def energy_at_order(potential, n, order, mode="top", scan=None):
    """E(N, n) = (2n + 1) a* with a* the upper closure root."""
    return solve_state(potential, n, order, mode, scan).energy


@dataclass
class ConvergenceTrace:
    """Per-order estimates of one level and their oscillation diagnostics.

    ``deltas[i]`` is |E(N_i+1) - E(N_i)| for consecutive orders that both
    produced a root (nan otherwise); ``signs[i]`` is the sign of that
    difference.
    """

    orders: list
    estimates: list
    deltas: list
    signs: list
    best_order: int
    best_energy: float
    stable_window: Optional[tuple]
    missing: list = field(default_factory=list)

    def as_pairs(self):
        return list(zip(self.orders, self.estimates))


def sweep(potential, n, n_max, mode="top", scan=None, threshold=1e-3):
    """Estimates for N = 1..n_max and the minimal-oscillation best order.

    ``threshold`` is relative: orders whose delta is below
    threshold * |E| form the stable window (longest contiguous run).
    """
    if n_max < 3:
        raise ValueError("sweep needs n_max >= 3")
    orders = list(range(1, n_max + 1))
    estimates, missing = [], []
    for order in orders:
        try:
            estimates.append(energy_at_order(potential, n, order, mode, scan))
        except NoRootError:
            estimates.append(float("nan"))
            missing.append(order)
    if len(missing) == len(orders):
        raise NoRootError(f"no order in 1..{n_max} produced a root for n={n}")

    est = np.array(estimates)
    diff = np.diff(est)
    deltas = np.abs(diff)
    signs = np.sign(diff)
    if np.all(np.isnan(deltas)):
        best = int(np.nanargmax(est))
        best_order = orders[best]
    else:
        best = int(np.nanargmin(deltas))
        best_order = orders[best]

    stable = deltas < threshold * np.abs(est[1:])
    window, run_start, longest = None, None, 0
    for i, ok in enumerate(list(stable) + [False]):
        if ok and run_start is None:
            run_start = i
        elif not ok and run_start is not None:
            if i - run_start > longest:
                longest = i - run_start
                window = (orders[run_start], orders[i])
            run_start = None

    return ConvergenceTrace(
        orders=orders,
        estimates=[float(e) for e in est],
        deltas=[float(d) for d in deltas],
        signs=[float(s) for s in signs],
        best_order=best_order,
        best_energy=float(est[best]),
        stable_window=window,
        missing=missing,
    )


def moderating_log(state, x):
    """log h(x) = -sum_{N>=1} j_N x^(2N+2) / (2N+2); accepts complex x."""
    x = np.asarray(x)
    total = np.zeros_like(x, dtype=complex if np.iscomplexobj(x) else float)
    for k, j_k in enumerate(state.coefficients[1:], start=1):
        total = total - j_k * x ** (2 * k + 2) / (2 * k + 2)
    return total


def delta_q(state, x):
    """Series form of the Q-correction: -(2/g') sum_{N>=1} j_N x^(2N+1)."""
    x = np.asarray(x, dtype=float)
    series = sum(j_k * x ** (2 * k + 1) for k, j_k in enumerate(state.coefficients[1:], start=1))
    return -2.0 / np.sqrt(state.root) * series


def ground_wavefunction(potential, state, x):
    """Unnormalized psi = f F(g) h with g = sqrt(a*) x, for n = 0 or 1."""
    if state.n > 1:
        raise ValueError("hierarchy wavefunctions are only available for n = 0 and n = 1")
    if state.potential != potential:
        raise ValueError("state was solved for a different potential")
    x = np.asarray(x, dtype=float)
    g = np.sqrt(state.root) * x
    special = np.exp(-0.5 * g * g) * hermite(state.n, g)
    with np.errstate(over="ignore"):
        # truncated series may blow up far outside the well; inf is the honest value
        h = np.exp(moderating_log(state, x))
    return state.root**-0.25 * special * h


def susy_bridge_residual(state, grid, step=1e-20):
    """max |dQ + 2 dW / g'| with dW = -(log h)' taken numerically.

    The log-derivative uses a complex step, so it carries no subtractive
    cancellation and is independent of the closed series for dQ.
    """
    x = np.asarray(grid, dtype=float)
    d_w = -np.imag(moderating_log(state, x + 1j * step)) / step
    g_prime = np.sqrt(state.root)
    return float(np.max(np.abs(delta_q(state, x) + 2.0 * d_w / g_prime)))
