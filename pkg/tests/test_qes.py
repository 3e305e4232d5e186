import itertools
import math

import numpy as np
import pytest

from qspectra.catalog import ESFamily, es_solution
from qspectra.oracle import spectrum_radial
from qspectra.qes import QESLevel, QESSextic, lambda_roots, qes_potential, qes_residual, qes_solve

LATTICE = list(itertools.product((0.5, 1.0, 2.0), (0.5, 1.0, 2.0), (0, 1, 2)))


@pytest.mark.parametrize(
    "spec, coeffs, centrifugal",
    [
        (QESSextic(1, 1, 0.75, 0), (-4, 2, 1), 0),
        (QESSextic(1, 0, 0.75, 0), (1, 0, 0), 0),
        (QESSextic(1, 1, 0.75, 1), (-8, 2, 1), 0),
        (QESSextic.from_ell(1, 1, 2), (1 - 4 * 2.25, 2, 1), 6),
    ],
)
def test_potential_examples(spec, coeffs, centrifugal):
    pot = qes_potential(spec)
    assert pot.power_coefficients() == pytest.approx(coeffs, abs=1e-15)
    assert pot.centrifugal == centrifugal
    assert spec.centrifugal == pytest.approx(centrifugal, abs=1e-15)


@pytest.mark.parametrize(
    "args, expected",
    [
        ((1, 0, 0.75), (0, 1)),
        ((1, 1, 0.75), (-0.822876, 1.822876)),
        ((2, 1, 0.75), (-0.581139, 2.581139)),
    ],
)
def test_lambda_roots_examples(args, expected):
    lo, hi = lambda_roots(*args)
    assert (lo, hi) == pytest.approx(expected, abs=1e-6)
    assert lo <= hi


def test_lambda_roots_negative_discriminant():
    with pytest.raises(ValueError):
        lambda_roots(1.0, -1.0, 0.75)


@pytest.mark.parametrize(
    "spec, n, energy",
    [
        (QESSextic(1, 1, 0.75, 0), 0, 3.0),
        (QESSextic(1, 1, 0.75, 1), 1, 10.291503),
        (QESSextic(1, 0, 0.75, 1), 1, 7.0),
    ],
)
def test_energy_examples(spec, n, energy):
    assert qes_solve(spec, n).energy == pytest.approx(energy, abs=1e-6)


def test_level_structure():
    ground = qes_solve(QESSextic(1, 1, 0.75, 0))
    assert ground.lam is None
    excited = qes_solve(QESSextic(1, 1, 0.75, 1), 1)
    assert excited.lam == pytest.approx(0.5 * (1 + math.sqrt(7)))
    with pytest.raises(ValueError):
        qes_solve(QESSextic(1, 1, 0.75, 0), 1)
    with pytest.raises(ValueError):
        QESLevel(2, None, 0.0, lambda x: x)


@pytest.mark.parametrize(
    "kwargs",
    [dict(a=0, b=1, s=0.75), dict(a=1, b=-1, s=0.75), dict(a=1, b=1, s=1.0), dict(a=1, b=1, s=0.75, M=2)],
)
def test_invalid_parameters(kwargs):
    with pytest.raises(ValueError):
        QESSextic(**kwargs)


@pytest.mark.parametrize("a, b, ell", LATTICE)
@pytest.mark.parametrize("M", [0, 1])
def test_residual_identity(a, b, ell, M):
    spec = QESSextic.from_ell(a, b, ell, M)
    for n in range(M + 1):
        assert qes_residual(spec, qes_solve(spec, n)) < 1e-7


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("ell", [0, 1, 2])
@pytest.mark.parametrize("M", [0, 1])
def test_b_zero_reduction(a, ell, M):
    spec = QESSextic.from_ell(a, 0.0, ell, M)
    x = np.linspace(0.2, 3.0, 50)
    for n in range(M + 1):
        level = qes_solve(spec, n)
        energy, factors = es_solution(ESFamily.oscillator_radial(2 * a, n, ell))
        assert level.energy == pytest.approx(energy, rel=1e-12)
        ratio = level.psi(x) / factors.psi(x)
        assert np.ptp(ratio) <= 1e-12 * np.max(np.abs(ratio))


@pytest.mark.parametrize("a, b, ell", LATTICE[:9])
def test_m_mismatch(a, b, ell):
    p0 = qes_potential(QESSextic.from_ell(a, b, ell, 0)).power_coefficients()
    p1 = qes_potential(QESSextic.from_ell(a, b, ell, 1)).power_coefficients()
    assert p0[0] - p1[0] == pytest.approx(4 * b, rel=1e-14)
    assert p0[1:] == p1[1:]


@pytest.mark.parametrize("a, b, ell", LATTICE)
def test_m1_ordering(a, b, ell):
    spec = QESSextic.from_ell(a, b, ell, 1)
    assert qes_solve(spec, 0).energy < qes_solve(spec, 1).energy


@pytest.mark.parametrize("a, b, ell", LATTICE)
@pytest.mark.parametrize("M", [0, 1])
def test_oracle_agreement(a, b, ell, M):
    spec = QESSextic.from_ell(a, b, ell, M)
    levels = spectrum_radial(qes_potential(spec), M + 1).eigenvalues
    closed = [qes_solve(spec, n).energy for n in range(M + 1)]
    assert levels == pytest.approx(closed, abs=1e-5)
