"""Method-independent numerical eigenvalues for checking everything else.

Two solvers share one discretization record:

* Numerov shooting: O(h^4) integration, node-count bisection on E to
  isolate a level, then Brent refinement of the log-derivative mismatch
  between outward and inward solutions at the outer turning point.
* Finite differences: 3-point Hamiltonian, Sturm-sequence bisection for
  eigenvalues, inverse iteration for node counts.

Both Richardson-extrapolate over spacings (h, h/2). A damped fixed-point
wrapper solves the nonlinear energy-dependent problems on top of Numerov.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded
from scipy.optimize import brentq

from qspectra import _kernels
from qspectra.residual import max_residual

log = logging.getLogger(__name__)

BC_CODES = {
    "dirichlet": _kernels.BC_DIRICHLET,
    "even-parity": _kernels.BC_EVEN,
    "odd-parity": _kernels.BC_ODD,
}
RADIAL_X_MIN = 0.0
TAIL_ACTION = 25.0
STURM_TOL = 1e-12
GRID_WARN = 1e-5


class NotConverged(RuntimeError):
    """A bracket or an iteration could not be established."""


class GridWarning(UserWarning):
    """Richardson correction larger than the accuracy target."""


@dataclass(frozen=True)
class Discretization:
    """Uniform grid on [x_min, x_max] with ``points`` nodes (boundaries included)."""

    x_min: float
    x_max: float
    points: int
    bc_left: str = "dirichlet"
    bc_right: str = "dirichlet"

    def __post_init__(self):
        if self.points < 201:
            raise ValueError(f"need at least 201 grid points, got {self.points}")
        if self.bc_left not in BC_CODES:
            raise ValueError(f"bc_left must be one of {sorted(BC_CODES)}")
        if self.bc_right != "dirichlet":
            raise ValueError("only a Dirichlet right boundary is supported")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.bc_left != "dirichlet" and self.x_min != 0:
            raise ValueError("parity boundary conditions sit at x = 0")

    @classmethod
    def radial(cls, x_max, points=2001, x_min=RADIAL_X_MIN):
        return cls(x_min, x_max, points, "dirichlet")

    @classmethod
    def half_line(cls, x_max, points=2001, parity="even"):
        return cls(0.0, x_max, points, f"{parity}-parity")

    @property
    def step(self):
        return (self.x_max - self.x_min) / (self.points - 1)

    def grid(self):
        return np.linspace(self.x_min, self.x_max, self.points)

    def refined(self, factor=2):
        return Discretization(
            self.x_min, self.x_max, factor * (self.points - 1) + 1, self.bc_left, self.bc_right
        )

    def with_x_max(self, x_max):
        return Discretization(self.x_min, x_max, self.points, self.bc_left, self.bc_right)


@dataclass
class OracleResult:
    """Lowest eigenvalues with their (h, h/2) grid history and node counts."""

    eigenvalues: np.ndarray
    grid_convergence: dict
    node_counts: list = field(default_factory=list)


def _potential_on(V, disc):
    x = disc.grid()
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.asarray(V(x), dtype=float)
    if disc.bc_left != "dirichlet" and not np.isfinite(v[0]):
        raise ValueError("potential is singular at x = 0; use a radial (Dirichlet) grid")
    if not np.isfinite(v[0]):
        # the Dirichlet end node is never used by either solver
        v[0] = v[1]
    return v


# ---------------------------------------------------------------------------
# Numerov shooting
# ---------------------------------------------------------------------------


def _regular_start(V, disc):
    """Frobenius data (s, c, d) of the regular solution at x = 0.

    Near the origin x^2 V(x) ~ L + c x + d x^2 with s(s - 1) = L; the three
    coefficients are fitted from samples at x = 1e-3, 2e-3, 3e-3. Grids
    that do not start at the origin get a plain Dirichlet start instead.
    """
    if disc.bc_left != "dirichlet":
        return np.array([1.0, 0.0, 0.0])
    if disc.x_min > 0:
        return np.array([-1.0, 0.0, 0.0])
    x1 = 1e-3
    pts = x1 * np.arange(1.0, 4.0)
    u = pts * pts * np.asarray(V(pts), dtype=float)
    d = (u[0] - 2 * u[1] + u[2]) / (2 * x1 * x1)
    c = (u[1] - u[0]) / x1 - 3 * d * x1
    L = max(u[0] - c * x1 - d * x1 * x1, 0.0)
    power = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * L))
    return np.array([power, c, d])


def _numerov_level(V, disc, k, guess=None):
    x = disc.grid()
    v = _potential_on(V, disc)
    h = disc.step
    bc = BC_CODES[disc.bc_left]
    frob = _regular_start(V, disc)

    def count(e):
        return _kernels.numerov_shoot(x, v, e, h, bc, frob)[1]

    def defect(e):
        return _kernels.numerov_shoot(x, v, e, h, bc, frob)[0]

    floor = float(np.min(v))
    if guess is not None:
        delta = 1e-3 * (1.0 + abs(guess))
        lo, hi = guess - delta, guess + delta
        if count(lo) > k:
            lo = floor
    else:
        lo, hi = floor, floor + 1.0
    if count(lo) > k:
        raise NotConverged(f"level {k} lies below the potential floor")
    for _ in range(200):
        if count(hi) > k:
            break
        lo, hi = hi, hi + 2.0 * (hi - lo)
    else:
        raise NotConverged(f"could not bracket level {k} from above")

    for _ in range(200):
        if count(lo) == k and count(hi) == k + 1:
            break
        mid = 0.5 * (lo + hi)
        if count(mid) > k:
            hi = mid
        else:
            lo = mid
    else:
        raise NotConverged(f"node-count bisection stalled for level {k}")

    # refine on the turning-point mismatch, which is smooth in E
    mid = 0.5 * (lo + hi)
    allowed = np.nonzero(v < mid)[0]
    m = int(allowed[-1]) if allowed.size else int(np.argmin(v))
    m = min(max(m, 4), v.size - 4)

    def mismatch(e):
        return _kernels.numerov_match(x, v, e, h, bc, frob, m)

    f_lo, f_hi = mismatch(lo), mismatch(hi)
    if f_lo > 0 > f_hi:
        return brentq(mismatch, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)

    f_lo, f_hi = defect(lo), defect(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if f_lo * f_hi > 0:
        raise NotConverged(f"end-point defect does not change sign for level {k}")
    return brentq(defect, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def numerov_eigenvalue(V, disc, k, guess=None, extrapolate=True):
    """k-th eigenvalue (0-based, within ``disc``'s boundary condition).

    With ``extrapolate`` the (h, h/2) pair is combined as
    E_{h/2} + (E_{h/2} - E_h) / 15.
    """
    coarse = _numerov_level(V, disc, k, guess)
    if not extrapolate:
        return coarse
    fine = _numerov_level(V, disc.refined(), k, coarse)
    return fine + (fine - coarse) / 15.0


def numerov_wavefunction(V, disc, energy):
    """Outward Numerov solution at ``energy`` on ``disc``'s grid, scaled to max 1."""
    frob = _regular_start(V, disc)
    x = disc.grid()
    psi = _kernels.numerov_profile(
        x, _potential_on(V, disc), energy, disc.step, BC_CODES[disc.bc_left], frob
    )
    return x, psi


# ---------------------------------------------------------------------------
# Finite differences + Sturm bisection
# ---------------------------------------------------------------------------


def _fd_matrix(V, disc):
    """Symmetric tridiagonal (diag, off) for -d2/dx2 + V on the free nodes."""
    h = disc.step
    x = disc.grid()
    inv = 1.0 / (h * h)
    if disc.bc_left == "even-parity":
        nodes = x[:-1]
    else:
        nodes = x[1:-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = 2.0 * inv + np.asarray(V(nodes), dtype=float)
    off = np.full(nodes.size - 1, -inv)
    if disc.bc_left == "even-parity":
        # ghost psi_{-1} = psi_1, symmetrized by scaling the x=0 unknown
        off[0] = -math.sqrt(2.0) * inv
    if not np.all(np.isfinite(diag)):
        raise ValueError("potential is not finite on the grid nodes")
    return nodes, diag, off


def _fd_eigs(V, disc, count):
    _, diag, off = _fd_matrix(V, disc)
    return _kernels.sturm_lowest(diag, off, count, STURM_TOL)


def _inverse_iteration(diag, off, shift, iterations=3):
    n = diag.size
    ab = np.zeros((3, n))
    ab[0, 1:] = off
    ab[1] = diag - shift
    ab[2, :-1] = off
    vec = np.ones(n) / math.sqrt(n)
    for _ in range(iterations):
        vec = solve_banded((1, 1), ab, vec)
        vec /= np.linalg.norm(vec)
    return vec


def count_nodes(values, rel_floor=1e-10):
    """Sign changes, ignoring entries below ``rel_floor`` * max|values|."""
    values = np.asarray(values)
    significant = values[np.abs(values) > rel_floor * np.max(np.abs(values))]
    return int(np.sum(significant[:-1] * significant[1:] < 0))


def fd_spectrum(V, disc, count):
    """Lowest ``count`` eigenvalues under ``disc``'s boundary conditions.

    Eigenvalues come from Sturm bisection on grids with spacing h and h/2,
    combined as (4 E_{h/2} - E_h) / 3. Node counts are taken from the
    h/2 eigenvectors (inverse iteration).
    """
    if count < 1 or count > disc.points // 10:
        raise ValueError(f"count must be in [1, points/10], got {count}")
    coarse = _fd_eigs(V, disc, count)
    fine_disc = disc.refined()
    nodes, diag, off = _fd_matrix(V, fine_disc)
    fine = _kernels.sturm_lowest(diag, off, count, STURM_TOL)
    extrapolated = (4.0 * fine - coarse) / 3.0
    change = float(np.max(np.abs(extrapolated - fine)))
    if change > GRID_WARN:
        import warnings

        warnings.warn(
            f"Richardson correction {change:.2e} exceeds {GRID_WARN:g}; refine the grid",
            GridWarning,
            stacklevel=2,
        )
    node_counts = []
    gaps = np.diff(fine)
    for i, e in enumerate(fine):
        gap = min(gaps[i - 1] if i > 0 else np.inf, gaps[i] if i < count - 1 else np.inf)
        shift = e - 1e-6 * (gap if np.isfinite(gap) else 1.0)
        node_counts.append(count_nodes(_inverse_iteration(diag, off, shift)))
    return OracleResult(
        eigenvalues=extrapolated,
        grid_convergence={
            "h": disc.step,
            "coarse": coarse,
            "fine": fine,
            "extrapolated": extrapolated,
            "max_change": change,
        },
        node_counts=node_counts,
    )


def observed_order(V, disc, count):
    """Observed convergence order of the raw (unextrapolated) FD eigenvalues."""
    e1 = _fd_eigs(V, disc, count)
    e2 = _fd_eigs(V, disc.refined(), count)
    e3 = _fd_eigs(V, disc.refined(4), count)
    return np.log2(np.abs(e1 - e2) / np.abs(e2 - e3))


# ---------------------------------------------------------------------------
# Domain selection and full-line / radial conveniences
# ---------------------------------------------------------------------------


def tail_action(V, energy, x_max, x_start=0.0, samples=4001):
    """Integral of sqrt(max(V - E, 0)) from the outer turning point to x_max.

    When E lies below the whole potential the integral starts at the minimum.
    """
    x = np.linspace(max(x_start, 1e-12), x_max, samples)
    with np.errstate(divide="ignore", invalid="ignore"):
        excess = np.asarray(V(x), dtype=float) - energy
    allowed = np.nonzero(excess <= 0)[0]
    if allowed.size:
        first = allowed[-1]
    elif excess[-1] < excess[-2]:
        # still descending towards a well beyond the box
        return 0.0
    else:
        # E below the floor: measure from the bottom of the well
        first = int(np.nanargmin(excess))
    root = np.sqrt(np.clip(excess[first:], 0.0, None))
    return float(np.trapezoid(root, x[first:]))


def outer_boundary(V, energy, x_start=0.0, action=TAIL_ACTION, x_init=1.0):
    """Smallest tried x_max whose tail action beyond the turning point reaches ``action``."""
    x_max = max(x_init, 2 * x_start + 1e-3)
    for _ in range(200):
        if tail_action(V, energy, x_max, x_start) >= action:
            return x_max
        x_max *= 1.15
    raise NotConverged(f"could not find an outer boundary for E = {energy}")


def spectrum_1d(V, count, points=4001, x_max=None, method="fd"):
    """Lowest ``count`` levels of a symmetric 1-D potential, both parities interleaved."""
    levels = np.empty(count)
    nodes = []
    energy_guess = None
    if x_max is None:
        x_max = _auto_x_max(V, count, points, 0.0, "even-parity")
    for parity, start in (("even", 0), ("odd", 1)):
        wanted = len(range(start, count, 2))
        if not wanted:
            continue
        disc = Discretization.half_line(x_max, points, parity)
        if method == "fd":
            res = fd_spectrum(V, disc, wanted)
            levels[start::2] = res.eigenvalues
            nodes.extend((start + 2 * i, 2 * c + start) for i, c in enumerate(res.node_counts))
        else:
            for i in range(wanted):
                energy_guess = numerov_eigenvalue(V, disc, i)
                levels[start + 2 * i] = energy_guess
    nodes.sort()
    return OracleResult(
        eigenvalues=levels,
        grid_convergence={"x_max": x_max, "points": points},
        node_counts=[c for _, c in nodes],
    )


def spectrum_radial(V, count, points=4001, x_max=None, x_min=RADIAL_X_MIN, method="fd"):
    """Lowest ``count`` radial levels; ``V`` must include the centrifugal term."""
    if x_max is None:
        x_max = _auto_x_max(V, count, points, x_min, "dirichlet")
    disc = Discretization.radial(x_max, points, x_min)
    if method == "fd":
        res = fd_spectrum(V, disc, count)
        res.grid_convergence.update(x_max=x_max, points=points)
        return res
    levels = np.array([numerov_eigenvalue(V, disc, k) for k in range(count)])
    return OracleResult(levels, {"x_max": x_max, "points": points}, list(range(count)))


def _auto_x_max(V, count, points, x_min, bc):
    """Grow the box until the top wanted level has the required tail action."""
    x_max = 2.0
    for _ in range(40):
        disc = Discretization(x_min, x_max, points, bc)
        top = count - 1 if bc == "dirichlet" else (count - 1) // 2
        energy = _fd_eigs(V, disc, top + 1)[-1]
        needed = outer_boundary(V, energy, x_min, x_init=x_max)
        if needed <= x_max:
            return x_max
        x_max = needed
    raise NotConverged("outer boundary search did not settle")


# ---------------------------------------------------------------------------
# Energy-dependent potentials
# ---------------------------------------------------------------------------


def _edp_potential(spec, energy):
    return spec.potential(energy)


def _edp_admissible(spec, energy):
    scale = 1.0 + spec.gamma * energy
    return scale > 0


@dataclass
class FixedPointTrace:
    energies: list
    thetas: list
    defects: list


class MaxIterExceeded(NotConverged):
    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


def edp_selfconsistent(spec, tol=1e-10, max_iter=500, theta=0.5, points=4001, return_trace=False):
    """Self-consistent level of an energy-dependent potential.

    Damped fixed point E <- (1 - theta) E + theta * eig(V(., E)), started
    from the energy-independent value. The damping is halved whenever a
    step would leave the binding domain (1 + gamma E > 0) or overshoot the
    fixed point, which keeps the trace monotone. Converged when
    |eig(V(., E)) - E| < tol.
    """
    start = spec.es_family().energy
    while not _edp_admissible(spec, start):
        start *= 0.5

    def grid_for(energy):
        V = _edp_potential(spec, energy)
        x_max = outer_boundary(V, energy, RADIAL_X_MIN, x_init=2.0)
        return Discretization.radial(x_max, points)

    disc = grid_for(start)

    def eig(energy, guess):
        return numerov_eigenvalue(_edp_potential(spec, energy), disc, spec.n, guess=guess)

    trace = FixedPointTrace([start], [], [])
    energy = start
    image = eig(energy, None)
    last_step = 0.0
    for _ in range(max_iter):
        defect = image - energy
        trace.defects.append(defect)
        if abs(defect) < tol:
            # make sure the box was large enough at the converged energy
            wider = grid_for(energy)
            if wider.x_max > disc.x_max * 1.0001:
                disc = wider.with_x_max(wider.x_max * 1.2)
                image = eig(energy, image)
                continue
            return (energy, trace) if return_trace else energy
        step_theta = theta
        while True:
            candidate = energy + step_theta * defect
            if _edp_admissible(spec, candidate):
                cand_image = eig(candidate, image)
                overshoot = np.sign(cand_image - candidate) * np.sign(defect) < 0
                if not overshoot or step_theta < 1e-6:
                    break
            step_theta *= 0.5
            if step_theta < 1e-12:
                raise NotConverged("damping collapsed in EDP fixed-point iteration")
        last_step = candidate - energy
        energy, image = candidate, cand_image
        trace.energies.append(energy)
        trace.thetas.append(step_theta)
    raise MaxIterExceeded(
        f"EDP fixed point not converged after {max_iter} iterations (last step {last_step:.3e})",
        trace,
    )


def schrodinger_residual(psi, V, E, grid):
    """max |psi''/psi - V + E| on ``grid`` with automatic node exclusion."""
    return max_residual(psi, V, E, grid)
