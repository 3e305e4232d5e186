import numpy as np
import pytest

from qspectra.catalog import (
    ESFamily,
    construction_residual,
    default_grid,
    es_residual,
    es_solution,
    l2_normalize,
)
from qspectra.residual import AllPointsExcluded, max_residual


@pytest.mark.parametrize(
    "family, energy",
    [
        (ESFamily.oscillator_1d(1.0, 0), 1.0),
        (ESFamily.oscillator_radial(2.0, 1, 0), 7.0),
        (ESFamily.coulomb(-1.0, 0, 0), -0.25),
    ],
)
def test_closed_form_energies(family, energy):
    assert es_solution(family)[0] == pytest.approx(energy, rel=1e-15)


@pytest.mark.parametrize(
    "family, grid",
    [
        (ESFamily.oscillator_1d(1.0, 0), np.linspace(-3, 3, 601)),
        (ESFamily.coulomb(-1.0, 1, 0), np.linspace(0.1, 20, 2000)[1:]),
        (ESFamily.oscillator_radial(2.0, 0, 1), np.linspace(0.1, 6, 5901)[1:]),
    ],
)
def test_residual_examples(family, grid):
    assert es_residual(family, grid) < 1e-6


def _fine_grid(family):
    grid = default_grid(family, points=3)
    lo, hi = grid[0], grid[-1]
    # Coulomb wavelengths grow with n + l + 1; a finer absolute step only
    # amplifies rounding near the nodes
    step = 5e-4 * (family.n + family.ell + 1) if family.kind == "coulomb-radial" else 1e-3
    if family.radial:
        lo = 0.1
    return np.arange(lo, hi, step)


@pytest.mark.parametrize("n", range(5))
@pytest.mark.parametrize("ell", range(4))
@pytest.mark.parametrize("kind", ["oscillator-radial", "coulomb-radial"])
def test_radial_residuals_whole_catalog(kind, n, ell):
    family = ESFamily(kind, 1.0 if kind == "oscillator-radial" else -1.0, n, ell)
    assert es_residual(family, _fine_grid(family)) < 1e-6


@pytest.mark.parametrize("n", range(5))
def test_line_residuals_whole_catalog(n):
    family = ESFamily.oscillator_1d(1.0, n)
    assert es_residual(family, _fine_grid(family)) < 1e-6


@pytest.mark.parametrize(
    "family",
    [ESFamily.oscillator_1d(0.7, 3), ESFamily.oscillator_radial(1.3, 2, 1), ESFamily.coulomb(-2.0, 2, 2)],
)
def test_energy_rebuilt_from_g_q_r(family):
    x = np.linspace(0.2, 5, 50)
    assert np.max(construction_residual(family, x)) < 1e-10


def test_factorization_and_trivial_moderator():
    family = ESFamily.oscillator_radial(2.0, 2, 1)
    _, fac = es_solution(family)
    x = np.linspace(0.1, 4, 40)
    assert np.array_equal(fac.h(x), np.ones_like(x))
    assert np.allclose(fac.psi(x), fac.f(x) * fac.F(fac.g(x)) * fac.h(x), rtol=0, atol=0)


def test_radial_prefactor_shape():
    # f is proportional to g^((l+1)/2) exp(-g/2)
    a, ell = 1.5, 2
    _, fac = es_solution(ESFamily("oscillator-radial", a, 0, ell))
    x = np.linspace(0.2, 3, 30)
    g = a * x**2
    ratio = fac.f(x) / (g ** ((ell + 1) / 2) * np.exp(-g / 2))
    assert np.allclose(ratio, ratio[0], rtol=1e-13)


def test_line_oscillator_orthogonality():
    x = np.linspace(-12, 12, 20001)
    psi0 = l2_normalize(es_solution(ESFamily.oscillator_1d(1.0, 0))[1].psi, x)
    psi1 = l2_normalize(es_solution(ESFamily.oscillator_1d(1.0, 1))[1].psi, x)
    assert abs(np.trapezoid(psi0(x) * psi1(x), x)) < 1e-8
    assert np.trapezoid(psi0(x) ** 2, x) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize(
    "kind, param, ell",
    [("oscillator-radial", 0.0, 0), ("oscillator-1d", -1.0, None), ("coulomb-radial", 1.0, 0), ("coulomb-radial", -1.0, None)],
)
def test_inadmissible_families(kind, param, ell):
    with pytest.raises(ValueError):
        ESFamily(kind, param, 0, ell)


def test_residual_signals_when_every_point_is_excluded():
    _, fac = es_solution(ESFamily.oscillator_1d(1.0, 1))
    grid = np.linspace(-0.005, 0.005, 11)
    with pytest.raises(AllPointsExcluded):
        max_residual(fac.psi, lambda x: x * x, 3.0, grid)
