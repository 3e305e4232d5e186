"""Compiled inner loops for the numerical oracle."""

import numpy as np
from numba import njit

BC_DIRICHLET = 0
BC_EVEN = 1
BC_ODD = 2

_BIG = 1e150


@njit(cache=True)
def numerov_start(x, v, energy, h, bc_left, frob):
    """First index and two starting values of the outward integration.

    Parity conditions start at x = 0. A Dirichlet end at x = 0 starts from
    the regular Frobenius solution x^s (1 + a1 x + a2 x^2) at the first node
    where the recurrence is stable (h^2 |v - E| / 12 <= 0.1); ``frob`` holds
    (s, c, d) from x^2 V(x) ~ s(s-1) + c x + d x^2. A negative s requests a
    plain Dirichlet start at x[0] > 0.
    """
    c = h * h / 12.0
    if bc_left == BC_EVEN:
        return 0, 1.0, (1.0 + 5.0 * c * (v[0] - energy)) / (1.0 - c * (v[1] - energy))
    if bc_left == BC_ODD:
        return 0, 0.0, h
    # x = 0 itself is skipped: V psi has a finite limit there that the
    # recurrence cannot see when V is singular
    if frob[0] < 0:
        # literal Dirichlet condition at x[0] > 0
        return 0, 0.0, h
    # x = 0 itself is skipped: V psi has a finite limit there that the
    # recurrence cannot see when V is singular
    i0 = 1 if x[0] == 0.0 else 0
    while i0 < x.size - 3 and c * abs(v[i0] - energy) > 0.1:
        i0 += 1
    s, lin, quad = frob[0], frob[1], frob[2]
    a1 = lin / (2.0 * s)
    a2 = (lin * a1 + quad - energy) / (2.0 * (2.0 * s + 1.0))
    p0 = x[i0] ** s * (1.0 + x[i0] * (a1 + a2 * x[i0]))
    p1 = x[i0 + 1] ** s * (1.0 + x[i0 + 1] * (a1 + a2 * x[i0 + 1]))
    return i0, p0, p1


@njit(cache=True)
def numerov_shoot(x, v, energy, h, bc_left, frob):
    """Integrate psi'' = (v - E) psi outward to the right boundary.

    Returns (psi_end / max|psi|, sign changes of psi after the start). The
    right boundary is Dirichlet, so psi_end = 0 is the eigenvalue condition.
    """
    m = v.size
    c = h * h / 12.0
    i0, p_prev, p_cur = numerov_start(x, v, energy, h, bc_left, frob)
    k_prev = v[i0] - energy
    k_cur = v[i0 + 1] - energy
    peak = max(abs(p_prev), abs(p_cur))
    nodes = 0
    for i in range(i0 + 1, m - 1):
        k_next = v[i + 1] - energy
        p_next = (2.0 * (1.0 + 5.0 * c * k_cur) * p_cur - (1.0 - c * k_prev) * p_prev) / (1.0 - c * k_next)
        if p_next * p_cur < 0.0:
            nodes += 1
        a = abs(p_next)
        if a > peak:
            peak = a
        if peak > _BIG:
            p_next /= _BIG
            p_cur /= _BIG
            peak /= _BIG
        p_prev, p_cur = p_cur, p_next
        k_prev, k_cur = k_cur, k_next
    return p_cur / peak, nodes


@njit(cache=True)
def numerov_match(x, v, energy, h, bc_left, frob, m):
    """Log-derivative mismatch at node ``m`` of outward and inward solutions.

    Decreases strictly with E between poles and vanishes at eigenvalues,
    independently of the choice of m.
    """
    size = v.size
    c = h * h / 12.0
    i0, p_prev, p_cur = numerov_start(x, v, energy, h, bc_left, frob)
    for i in range(i0 + 1, m + 1):
        p_next = (2.0 * (1.0 + 5.0 * c * (v[i] - energy)) * p_cur
                  - (1.0 - c * (v[i - 1] - energy)) * p_prev) / (1.0 - c * (v[i + 1] - energy))
        if abs(p_next) > _BIG:
            p_next /= _BIG
            p_cur /= _BIG
        p_prev, p_cur = p_cur, p_next
    # p_prev = psi[m], p_cur = psi[m + 1]; one more value on the left is needed
    o_mid, o_right = p_prev, p_cur
    o_left = (2.0 * (1.0 + 5.0 * c * (v[m] - energy)) * o_mid
              - (1.0 - c * (v[m + 1] - energy)) * o_right) / (1.0 - c * (v[m - 1] - energy))

    q_next, q_cur = 0.0, 1e-30
    for i in range(size - 2, m, -1):
        q_prev = (2.0 * (1.0 + 5.0 * c * (v[i] - energy)) * q_cur
                  - (1.0 - c * (v[i + 1] - energy)) * q_next) / (1.0 - c * (v[i - 1] - energy))
        if abs(q_prev) > _BIG:
            q_prev /= _BIG
            q_cur /= _BIG
        q_next, q_cur = q_cur, q_prev
    # q_cur = psi[m], q_next = psi[m + 1]
    i_mid, i_right = q_cur, q_next
    i_left = (2.0 * (1.0 + 5.0 * c * (v[m] - energy)) * i_mid
              - (1.0 - c * (v[m + 1] - energy)) * i_right) / (1.0 - c * (v[m - 1] - energy))
    return ((o_right - o_left) / o_mid - (i_right - i_left) / i_mid) / (2.0 * h)


@njit(cache=True)
def numerov_profile(x, v, energy, h, bc_left, frob):
    """Full outward solution (zeros before the start index), scaled to max 1."""
    m = v.size
    c = h * h / 12.0
    psi = np.zeros(m)
    i0, p0, p1 = numerov_start(x, v, energy, h, bc_left, frob)
    psi[i0] = p0
    psi[i0 + 1] = p1
    for i in range(i0 + 1, m - 1):
        k_prev = v[i - 1] - energy
        k_cur = v[i] - energy
        k_next = v[i + 1] - energy
        psi[i + 1] = (2.0 * (1.0 + 5.0 * c * k_cur) * psi[i] - (1.0 - c * k_prev) * psi[i - 1]) / (1.0 - c * k_next)
        if abs(psi[i + 1]) > _BIG:
            for j in range(i + 2):
                psi[j] /= _BIG
    return psi / np.max(np.abs(psi))


@njit(cache=True)
def sturm_count(diag, off, shift):
    """Number of eigenvalues of the symmetric tridiagonal matrix below ``shift``."""
    count = 0
    q = diag[0] - shift
    if q < 0.0:
        count += 1
    for i in range(1, diag.size):
        if q == 0.0:
            q = 1e-300
        q = diag[i] - shift - off[i - 1] * off[i - 1] / q
        if q < 0.0:
            count += 1
    return count


@njit(cache=True)
def sturm_bisect(diag, off, index, lo, hi, tol):
    """The ``index``-th (0-based) eigenvalue inside the Gershgorin bracket [lo, hi]."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if sturm_count(diag, off, mid) > index:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@njit(cache=True)
def sturm_lowest(diag, off, count, tol):
    out = np.empty(count)
    radius = np.zeros(diag.size)
    for i in range(diag.size):
        r = 0.0
        if i > 0:
            r += abs(off[i - 1])
        if i < diag.size - 1:
            r += abs(off[i])
        radius[i] = r
    lo = np.min(diag - radius)
    hi = np.max(diag + radius)
    for k in range(count):
        start = lo if k == 0 else out[k - 1]
        out[k] = sturm_bisect(diag, off, k, start, hi, tol)
    return out
