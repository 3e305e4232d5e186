"""Linearly energy-dependent oscillator and Coulomb potentials.

Harmonic:  V(x, E) = (w^2 x^2 / 4)(1 + gamma E) + l(l+1)/x^2
Coulomb:   V(x, E) = (lambda / x)(1 + gamma E) + l(l+1)/x^2

Both reduce to a quadratic in E once the energy-independent spectrum is
rescaled by the (1 + gamma E) factor. Quantum numbers are radial:
n = 0, 1, 2, ... with principal number n_p = n + l + 1.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from qspectra.catalog import ESFamily, es_solution
from qspectra.special import laguerre

FAMILIES = ("harmonic", "coulomb")
DELTA_RTOL = 1e-10


class SpectrumBreakdown(ValueError):
    """1 + gamma E <= 0: the dressed potential no longer binds."""


@dataclass(frozen=True)
class EDPSpec:
    """An energy-dependent problem in a definite radial state.

    Physical coherence needs gamma <= 0 for the oscillator and gamma >= 0
    for Coulomb; ``allow_noncoherent`` lifts that check.
    """

    family: str
    gamma: float
    n: int = 0
    ell: int = 0
    w: float = 2.0
    lam: float = -1.0
    allow_noncoherent: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        for name in ("n", "ell"):
            value = getattr(self, name)
            if value < 0 or int(value) != value:
                raise ValueError(f"{name} must be a non-negative integer, got {value}")
        if self.family == "harmonic":
            if not self.w > 0:
                raise ValueError(f"w must be positive, got {self.w}")
            if self.gamma > 0 and not self.allow_noncoherent:
                raise ValueError("harmonic coupling needs gamma <= 0 (pass allow_noncoherent to override)")
        else:
            if not self.lam < 0:
                raise ValueError(f"Coulomb strength must be negative, got {self.lam}")
            if self.gamma < 0 and not self.allow_noncoherent:
                raise ValueError("Coulomb coupling needs gamma >= 0 (pass allow_noncoherent to override)")

    @property
    def coherent(self):
        if self.family == "harmonic":
            return self.gamma <= 0
        return self.gamma >= 0

    @property
    def principal(self):
        return self.n + self.ell + 1

    @property
    def shell(self):
        """c = 2n + l + 3/2, so that E_ES = c w for the oscillator."""
        return 2 * self.n + self.ell + 1.5

    def es_family(self):
        if self.family == "harmonic":
            return ESFamily.oscillator_radial(self.w, self.n, self.ell)
        return ESFamily.coulomb(self.lam, self.n, self.ell)

    def potential(self, energy):
        """V(., E) as a callable of x, centrifugal barrier included."""
        scale = 1.0 + self.gamma * energy
        barrier = self.ell * (self.ell + 1)
        if self.family == "harmonic":
            strength = 0.25 * self.w**2 * scale

            def V(x):
                x = np.asarray(x, dtype=float)
                return strength * x * x + barrier / (x * x)

        else:
            strength = self.lam * scale

            def V(x):
                x = np.asarray(x, dtype=float)
                return strength / x + barrier / (x * x)

        return V


@dataclass(frozen=True)
class EDPResult:
    spec: EDPSpec
    energy_plus: float
    energy_minus: float
    delta_E: float
    h: Callable
    psi: Callable
    g_effective: Callable
    regime: str = "coherent"


def delta_energy(spec, energy):
    """Energy shift E - E_ES implied by the dressed spectrum at ``energy``."""
    g = spec.gamma
    if spec.family == "harmonic":
        scale = 1.0 + g * energy
        if scale <= 0:
            raise SpectrumBreakdown(f"1 + gamma E = {scale:.6g} <= 0")
        return (math.sqrt(scale) - 1.0) * spec.shell * spec.w
    n_p = spec.principal
    return -spec.lam**2 * g * energy / (2 * n_p**2) * (1.0 + 0.5 * g * energy)


def _harmonic_roots(spec):
    cw = spec.shell * spec.w
    g = spec.gamma
    root = cw * math.sqrt(cw * cw * g * g + 4.0)
    lead = cw * cw * g
    if g > 0:
        plus = 0.5 * (lead + root)
        minus = -cw * cw / plus
    else:
        minus = 0.5 * (lead - root)
        plus = -cw * cw / minus
    return plus, minus


def coulomb_energy_quadratic(spec):
    """E+ from the textbook quadratic formula (reference form, loses digits as gamma -> 0)."""
    g = spec.gamma
    A = spec.lam**2 / (4.0 * spec.principal**2)
    if g == 0:
        return -A
    return (-(2 * A * g + 1.0) + math.sqrt(1.0 + 4 * A * g)) / (2 * A * g * g)


def _coulomb_roots(spec):
    g, n_p, lam2 = spec.gamma, spec.principal, spec.lam**2
    plus = -1.0 / (g + (2.0 / lam2) * n_p * (n_p + math.sqrt(n_p * n_p + g * lam2)))
    minus = 1.0 / (g * g * plus) if g != 0 else -math.inf
    return plus, minus


def edp_energy(spec):
    """Both roots of the self-consistent quadratic and the dressed wavefunction."""
    if spec.family == "harmonic":
        plus, minus = _harmonic_roots(spec)
    else:
        if 1.0 + spec.gamma * spec.lam**2 / spec.principal**2 < 0:
            raise SpectrumBreakdown("no real Coulomb level: n_p^2 + gamma lambda^2 < 0")
        plus, minus = _coulomb_roots(spec)
    scale = 1.0 + spec.gamma * plus
    if scale <= 0:
        raise SpectrumBreakdown(f"1 + gamma E = {scale:.6g} <= 0")

    e_es = spec.es_family().energy
    delta = delta_energy(spec, plus)
    if abs(plus - e_es - delta) > DELTA_RTOL * max(abs(plus), abs(e_es)):
        raise ArithmeticError(
            f"energy shift mismatch: E+ - E_ES = {plus - e_es:.12g}, shift formula {delta:.12g}"
        )

    h, g_eff, psi = _dressed_wavefunction(spec, plus)
    return EDPResult(
        spec=spec,
        energy_plus=plus,
        energy_minus=minus,
        delta_E=delta,
        h=h,
        psi=psi,
        g_effective=g_eff,
        regime="coherent" if spec.coherent else "non-coherent",
    )


def _dressed_wavefunction(spec, energy):
    _, base = es_solution(spec.es_family())
    scale = 1.0 + spec.gamma * energy
    n, ell = spec.n, spec.ell
    if spec.family == "harmonic":
        root = math.sqrt(scale)
        quarter = 0.25 * spec.w

        def g_eff(x):
            x = np.asarray(x, dtype=float)
            return 2 * quarter * x * x * root

        def h(x):
            x = np.asarray(x, dtype=float)
            return np.exp(-quarter * x * x * (root - 1.0))

        def psi(x):
            x = np.asarray(x, dtype=float)
            return base.f(x) * laguerre(n, ell + 0.5, g_eff(x)) * h(x)

    else:
        k = -spec.lam / spec.principal

        def g_eff(x):
            return k * scale * np.asarray(x, dtype=float)

        def h(x):
            # exp(lambda gamma E x / (2 n_p))
            return np.exp(-0.5 * k * spec.gamma * energy * np.asarray(x, dtype=float))

        def psi(x):
            x = np.asarray(x, dtype=float)
            g = k * x
            return base.f(x) * g ** (ell + 1) * np.exp(-0.5 * g) * laguerre(n, 2 * ell + 1, g_eff(x)) * h(x)

    return h, g_eff, psi


def edp_wavefunction(spec, result, x):
    """Unnormalized dressed wavefunction at radial points ``x`` > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("radial wavefunction needs x > 0")
    return result.psi(x)


def self_consistency_residual(spec, energy):
    """|E - c w sqrt(1 + gamma E)| (oscillator) or |E - E_ES - shift(E)| (Coulomb)."""
    if spec.family == "harmonic":
        scale = 1.0 + spec.gamma * energy
        if scale <= 0:
            raise SpectrumBreakdown(f"1 + gamma E = {scale:.6g} <= 0")
        return abs(energy - spec.shell * spec.w * math.sqrt(scale))
    return abs(energy - spec.es_family().energy - delta_energy(spec, energy))
