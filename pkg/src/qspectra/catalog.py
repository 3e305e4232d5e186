"""Exactly solvable base problems and their wavefunction factorization.

Each family supplies the internal variable g(x), the prefactor f(x), the
special-function factor F(g) and the coefficient functions Q(g), R(g) of
the second-order equation F satisfies. The wavefunction is the product
psi = f * F(g) * h with h = 1 for these unperturbed problems.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from qspectra.residual import max_residual
from qspectra.special import hermite, laguerre

KINDS = ("oscillator-1d", "oscillator-radial", "coulomb-radial")


def _one(x):
    return np.ones_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class ESFamily:
    """An exactly solvable problem in a definite state.

    ``param`` is the oscillator scale a = w/2 for both oscillator kinds and
    the (negative) Coulomb strength lambda for ``coulomb-radial``.
    """

    kind: str
    param: float
    n: int = 0
    ell: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}; expected one of {KINDS}")
        if self.n < 0 or int(self.n) != self.n:
            raise ValueError(f"n must be a non-negative integer, got {self.n}")
        if self.kind == "oscillator-1d":
            if self.ell is not None:
                raise ValueError("oscillator-1d takes no angular momentum")
        elif self.ell is None or self.ell < 0 or int(self.ell) != self.ell:
            raise ValueError(f"{self.kind} needs a non-negative integer ell")
        if self.kind.startswith("oscillator") and not self.param > 0:
            raise ValueError(f"oscillator scale a must be positive, got {self.param}")
        if self.kind == "coulomb-radial" and not self.param < 0:
            raise ValueError(f"Coulomb strength must be negative, got {self.param}")

    @classmethod
    def oscillator_1d(cls, a, n=0):
        return cls("oscillator-1d", a, n)

    @classmethod
    def oscillator_radial(cls, w, n=0, ell=0):
        return cls("oscillator-radial", w / 2.0, n, ell)

    @classmethod
    def coulomb(cls, lam, n=0, ell=0):
        return cls("coulomb-radial", lam, n, ell)

    @property
    def radial(self):
        return self.kind != "oscillator-1d"

    @property
    def energy(self):
        n, p = self.n, self.param
        if self.kind == "oscillator-1d":
            return 2.0 * p * (n + 0.5)
        if self.kind == "oscillator-radial":
            return (2 * n + self.ell + 1.5) * 2.0 * p
        return -p * p / (4.0 * (n + self.ell + 1) ** 2)

    def potential(self, x):
        """V_ES(x), centrifugal barrier included for radial kinds."""
        x = np.asarray(x, dtype=float)
        if self.kind == "coulomb-radial":
            v = self.param / x
        else:
            v = self.param**2 * x * x
        if self.radial and self.ell:
            v = v + self.ell * (self.ell + 1) / (x * x)
        return v


@dataclass(frozen=True)
class WavefunctionFactors:
    """psi(x) = f(x) * F(g(x)) * h(x), plus the data F's equation is built from.

    ``g1, g2, g3`` are the first three x-derivatives of g; ``Q``, ``dQ``, ``R``
    are functions of g.
    """

    g: Callable
    f: Callable
    F: Callable
    h: Callable
    g1: Callable
    g2: Callable
    g3: Callable
    Q: Callable
    dQ: Callable
    R: Callable

    def psi(self, x):
        x = np.asarray(x, dtype=float)
        return self.f(x) * self.F(self.g(x)) * self.h(x)

    __call__ = psi


def _oscillator_1d(a, n):
    root = np.sqrt(a)
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return WavefunctionFactors(
        g=lambda x: root * np.asarray(x, dtype=float),
        f=lambda x: a ** -0.25 * _one(x),
        F=lambda g: np.exp(-0.5 * g * g) * hermite(n, g),
        h=_one,
        g1=lambda x: root * _one(x),
        g2=zero,
        g3=zero,
        Q=lambda g: np.zeros_like(g),
        dQ=lambda g: np.zeros_like(g),
        R=lambda g: 2 * n + 1 - g * g,
    )


def _oscillator_radial(a, n, ell):
    order = ell + 0.5
    return WavefunctionFactors(
        g=lambda x: a * np.asarray(x, dtype=float) ** 2,
        f=lambda x: (4 * a) ** -0.25 * (a * np.asarray(x, dtype=float) ** 2) ** ((ell + 1) / 2.0)
        * np.exp(-0.5 * a * np.asarray(x, dtype=float) ** 2),
        F=lambda g: laguerre(n, order, g),
        h=_one,
        g1=lambda x: 2 * a * np.asarray(x, dtype=float),
        g2=lambda x: 2 * a * _one(x),
        g3=lambda x: 0.0 * _one(x),
        Q=lambda g: (ell + 1.5 - g) / g,
        dQ=lambda g: -(ell + 1.5) / (g * g),
        R=lambda g: n / g,
    )


def _coulomb(lam, n, ell):
    n_p = n + ell + 1
    k = -lam / n_p
    return WavefunctionFactors(
        g=lambda x: k * np.asarray(x, dtype=float),
        f=lambda x: k ** -0.5 * _one(x),
        F=lambda g: g ** (ell + 1) * np.exp(-0.5 * g) * laguerre(n, 2 * ell + 1, g),
        h=_one,
        g1=lambda x: k * _one(x),
        g2=lambda x: 0.0 * _one(x),
        g3=lambda x: 0.0 * _one(x),
        Q=lambda g: np.zeros_like(g),
        dQ=lambda g: np.zeros_like(g),
        R=lambda g: n_p / g - ell * (ell + 1) / (g * g) - 0.25,
    )


def es_solution(family):
    """Closed-form energy and unnormalized wavefunction factors of ``family``."""
    if family.kind == "oscillator-1d":
        factors = _oscillator_1d(family.param, family.n)
    elif family.kind == "oscillator-radial":
        factors = _oscillator_radial(family.param, family.n, family.ell)
    else:
        factors = _coulomb(family.param, family.n, family.ell)
    return family.energy, factors


def es_residual(family, grid):
    """Max |psi''/psi - V + E| over the node-free part of ``grid``."""
    energy, factors = es_solution(family)
    return max_residual(factors.psi, family.potential, energy, grid)


def construction_residual(family, x):
    """|E - V - rhs| where rhs rebuilds E - V from g, Q and R alone.

    rhs = g'''/(2g') - 3/4 (g''/g')^2 + g'^2 (R - Q'/2 - Q^2/4)
    """
    energy, fac = es_solution(family)
    x = np.asarray(x, dtype=float)
    g = fac.g(x)
    g1, g2, g3 = fac.g1(x), fac.g2(x), fac.g3(x)
    q = fac.Q(g)
    rhs = g3 / (2 * g1) - 0.75 * (g2 / g1) ** 2 + g1**2 * (fac.R(g) - 0.5 * fac.dQ(g) - 0.25 * q * q)
    return np.abs(energy - family.potential(x) - rhs)


def l2_normalize(psi, x):
    """Return a callable psi / ||psi|| with the norm from trapezoid quadrature on ``x``."""
    x = np.asarray(x, dtype=float)
    norm = np.sqrt(np.trapezoid(np.abs(psi(x)) ** 2, x))
    return lambda y: psi(y) / norm


def default_grid(family, points=601, r_min=0.05):
    """Grid covering the classically relevant region of ``family``.

    1-D: |x| <= x_max with V(x_max) - E >= 25. Radial: [r_min, x_max],
    with the Coulomb tail cut at 25 decay lengths.
    """
    energy = family.energy
    if family.kind == "coulomb-radial":
        # V -> 0 at infinity; cut where exp(-kappa x) has dropped by e^-25
        x_max = 25.0 / np.sqrt(-energy)
    else:
        x_max = 1.0
        while family.potential(x_max) - energy < 25.0:
            x_max *= 1.1
    if family.radial:
        return np.linspace(r_min, x_max, points)
    return np.linspace(-x_max, x_max, points)
