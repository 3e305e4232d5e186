"""Quasi-exactly solvable sextic oscillator: closed-form levels for M = 0, 1.

The radial potential

    V(x) = l(l+1)/x^2 + (a^2 - 4b(s + 1/2 + M)) x^2 + 2ab x^4 + b^2 x^6,

with s = l/2 + 3/4, has its lowest M + 1 levels in closed form. The
wavefunction is x^(l+1) exp(-b x^4/4 - a x^2/2) times a polynomial in x^2
of degree n <= M.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from qspectra.potential import PolynomialPotential
from qspectra.residual import max_residual


@dataclass(frozen=True)
class QESSextic:
    """Parameters (a, b, s, M); ``ell`` = 2s - 3/2 must be a non-negative integer."""

    a: float
    b: float
    s: float
    M: int = 0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"a must be positive, got {self.a}")
        if self.b < 0:
            raise ValueError(f"b must be non-negative, got {self.b}")
        ell = 2 * self.s - 1.5
        if ell < -1e-12 or abs(ell - round(ell)) > 1e-12:
            raise ValueError(f"s must equal l/2 + 3/4 for integer l >= 0, got {self.s}")
        if self.M not in (0, 1):
            raise ValueError(f"only M = 0 and M = 1 are supported, got {self.M}")

    @classmethod
    def from_ell(cls, a, b, ell, M=0):
        return cls(a, b, ell / 2.0 + 0.75, M)

    @property
    def ell(self):
        return int(round(2 * self.s - 1.5))

    @property
    def centrifugal(self):
        return (2 * self.s - 0.5) * (2 * self.s - 1.5)

    def power_coefficients(self):
        """Coefficients of x^2, x^4, x^6."""
        a, b, s = self.a, self.b, self.s
        return (a * a - 4 * b * (s + 0.5 + self.M), 2 * a * b, b * b)


@dataclass(frozen=True)
class QESLevel:
    n: int
    lam: Optional[float]
    energy: float
    psi: Callable

    def __post_init__(self):
        if self.n not in (0, 1):
            raise ValueError(f"QES level index must be 0 or 1, got {self.n}")


def qes_potential(spec):
    """Radial :class:`PolynomialPotential` whose closed-form levels ``spec`` describes."""
    mu, sigma, eta = spec.power_coefficients()
    return PolynomialPotential(mu, sigma, eta, ell=spec.ell)


def lambda_roots(a, b, s):
    """(lam_minus, lam_plus) = (a -/+ sqrt(a^2 + 8bs)) / 2."""
    disc = a * a + 8 * b * s
    if disc < 0:
        raise ValueError(f"negative discriminant a^2 + 8bs = {disc}")
    root = math.sqrt(disc)
    return 0.5 * (a - root), 0.5 * (a + root)


def qes_solve(spec, n=0):
    """Closed-form level ``n`` (0 <= n <= M) of the sextic family."""
    if n < 0 or n > spec.M:
        raise ValueError(f"level n={n} is not available for M={spec.M}")
    a, b, s, ell = spec.a, spec.b, spec.s, spec.ell

    def gaussian_part(x):
        x = np.asarray(x, dtype=float)
        x2 = x * x
        return x ** (ell + 1) * np.exp(-0.25 * b * x2 * x2 - 0.5 * a * x2)

    if spec.M == 0:
        return QESLevel(n=0, lam=None, energy=4 * a * s, psi=gaussian_part)

    # lam_minus belongs to the ground state, lam_plus to the excited one
    lam = lambda_roots(a, b, s)[n]

    def psi(x):
        x = np.asarray(x, dtype=float)
        return (1.0 - lam * x * x / (2 * s)) * gaussian_part(x)

    return QESLevel(n=n, lam=lam, energy=4 * (a * s + lam), psi=psi)


def qes_residual(spec, level, step=1e-3, x_min=0.1, barrier=25.0):
    """Schrodinger residual of a closed-form level on [x_min, x_max).

    x_max is where V - E first exceeds ``barrier``; beyond it the stencil
    error of the 5-point derivative grows with the sextic term.
    """
    potential = qes_potential(spec)
    x_max = 1.0
    while potential(x_max) - level.energy < barrier:
        x_max *= 1.1
    return max_residual(level.psi, potential, level.energy, np.arange(x_min, x_max, step))
