import warnings

import numpy as np
import pytest

from qspectra.catalog import ESFamily, es_solution
from qspectra.edp import EDPSpec, edp_energy
from qspectra.hierarchy import ground_wavefunction, solve_state
from qspectra.oracle import (
    Discretization,
    GridWarning,
    MaxIterExceeded,
    edp_selfconsistent,
    fd_spectrum,
    numerov_eigenvalue,
    numerov_wavefunction,
    observed_order,
    outer_boundary,
    schrodinger_residual,
    spectrum_1d,
    spectrum_radial,
    tail_action,
)
from qspectra.potential import PolynomialPotential
from qspectra.qes import QESSextic, qes_potential, qes_solve
from qspectra.residual import AllPointsExcluded
from qspectra.tables import TABLE2_POTENTIAL

HARMONIC = PolynomialPotential(1.0)
SHARED = [
    PolynomialPotential(1.0),
    PolynomialPotential(1.0, 0.0, 0.1),
    PolynomialPotential(0.0, 0.0, 1.0),
    PolynomialPotential(1.0, 1.0),
    PolynomialPotential(2.0, ell=1),
    qes_potential(QESSextic(1, 1, 0.75, 1)),
]


def test_discretization_validation():
    with pytest.raises(ValueError):
        Discretization(0.0, 5.0, 200)
    with pytest.raises(ValueError):
        Discretization(0.0, 5.0, 401, bc_left="periodic")
    with pytest.raises(ValueError):
        Discretization(0.0, 5.0, 401, bc_right="even-parity")
    with pytest.raises(ValueError):
        Discretization(1.0, 1.0, 401)
    with pytest.raises(ValueError):
        Discretization(0.5, 5.0, 401, bc_left="even-parity")
    disc = Discretization.half_line(6.0, 401)
    assert disc.refined().points == 801
    assert disc.refined().step == pytest.approx(disc.step / 2)


def test_numerov_harmonic_ground():
    disc = Discretization.half_line(8.0, 2001)
    assert numerov_eigenvalue(HARMONIC, disc, 0) == pytest.approx(1.0, abs=1e-7)


@pytest.mark.parametrize(
    "potential, k, energy",
    [(PolynomialPotential(1.0, 0.0, 0.1), 0, 1.109087), (PolynomialPotential(0.0, 0.0, 1.0), 1, 4.338599)],
)
def test_numerov_examples(potential, k, energy):
    levels = spectrum_1d(potential, k + 1, method="numerov").eigenvalues
    assert levels[k] == pytest.approx(energy, abs=1e-5)


def test_fd_harmonic_levels():
    result = spectrum_1d(HARMONIC, 4)
    assert result.eigenvalues == pytest.approx([1, 3, 5, 7], abs=1e-6)
    assert result.node_counts == [0, 1, 2, 3]


def test_fd_table2_ground():
    mu, sigma, eta = TABLE2_POTENTIAL
    levels = spectrum_1d(PolynomialPotential(mu, sigma, eta), 4).eigenvalues
    assert levels[0] == pytest.approx(7.3569, abs=5e-4)


def test_fd_qes_pair():
    spec = QESSextic(1, 1, 0.75, 1)
    levels = spectrum_radial(qes_potential(spec), 2).eigenvalues
    assert levels == pytest.approx([-0.291503, 10.291503], abs=1e-4)
    assert levels == pytest.approx([qes_solve(spec, n).energy for n in (0, 1)], abs=1e-5)


def test_fd_count_limit():
    disc = Discretization.half_line(6.0, 401)
    with pytest.raises(ValueError):
        fd_spectrum(HARMONIC, disc, 41)
    with pytest.raises(ValueError):
        fd_spectrum(HARMONIC, disc, 0)


def test_coarse_grid_warns():
    with pytest.warns(GridWarning):
        fd_spectrum(HARMONIC, Discretization.half_line(8.0, 201), 3)


@pytest.mark.parametrize("potential", SHARED, ids=repr)
def test_numerov_matches_fd(potential):
    count = 4 if potential.radial and potential.sigma == 0 and potential.eta == 0 else 3
    if potential.radial:
        fd = spectrum_radial(potential, count)
        disc = Discretization.radial(fd.grid_convergence["x_max"], 4001)
        numerov = [numerov_eigenvalue(potential, disc, k) for k in range(count)]
    else:
        fd = spectrum_1d(potential, count)
        numerov = spectrum_1d(potential, count, x_max=fd.grid_convergence["x_max"], method="numerov").eigenvalues
    assert np.asarray(numerov) == pytest.approx(fd.eigenvalues, abs=1e-5)
    assert np.all(np.diff(fd.eigenvalues) > 0)


def test_radial_oscillator_levels():
    # w = 2, l = 1: E = 2(2n + 5/2)
    levels = spectrum_radial(PolynomialPotential(1.0, ell=1), 3).eigenvalues
    assert levels == pytest.approx([5, 9, 13], abs=1e-6)


def test_node_counts_radial():
    result = spectrum_radial(PolynomialPotential(1.0, 0.5, ell=2), 5)
    assert result.node_counts == list(range(5))


@pytest.mark.parametrize("parity", ["even", "odd"])
def test_node_counts_half_line(parity):
    # level k of either parity has k nodes on x > 0
    result = fd_spectrum(PolynomialPotential(1.0, 1.0), Discretization.half_line(6.0, 4001, parity), 4)
    assert result.node_counts == [0, 1, 2, 3]


def test_node_counts_full_line():
    assert spectrum_1d(PolynomialPotential(1.0, 1.0), 6).node_counts == list(range(6))


def test_numerov_wavefunction_nodes():
    disc = Discretization.radial(7.0, 2001)
    potential = PolynomialPotential(1.0, ell=0)
    for k in range(4):
        energy = numerov_eigenvalue(potential, disc, k)
        x, psi = numerov_wavefunction(potential, disc, energy)
        inner = psi[(x > 0) & (x < 5.0)]
        assert np.sum(inner[:-1] * inner[1:] < 0) == k


def test_monotone_in_box_size():
    step = 0.01
    previous = None
    for x_max in (2.0, 2.5, 3.0, 4.0, 5.0, 6.0):
        disc = Discretization.half_line(x_max, int(round(x_max / step)) + 1)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", GridWarning)
            levels = fd_spectrum(PolynomialPotential(1.0, 0.2), disc, 3).grid_convergence["fine"]
        if previous is not None:
            assert np.all(levels <= previous + 1e-12)
        previous = levels


def test_observed_order():
    disc = Discretization.half_line(7.0, 401)
    assert np.all(observed_order(HARMONIC, disc, 3) >= 1.9)


def test_tail_action_and_boundary():
    # V = x^2, E = 1: integral of sqrt(x^2 - 1) from 1 to X
    X = 3.0
    exact = 0.5 * (X * np.sqrt(X * X - 1) - np.log(X + np.sqrt(X * X - 1)))
    assert tail_action(HARMONIC, 1.0, X, samples=20001) == pytest.approx(exact, rel=1e-4)
    x_max = outer_boundary(HARMONIC, 1.0)
    assert tail_action(HARMONIC, 1.0, x_max) >= 25.0
    assert tail_action(HARMONIC, 1.0, x_max / 1.15) < 25.0


@pytest.mark.parametrize(
    "spec, energy",
    [
        (EDPSpec("harmonic", -0.1), 2.583562),
        (EDPSpec("coulomb", 1.0), -0.171573),
    ],
)
def test_edp_selfconsistent_examples(spec, energy):
    assert edp_selfconsistent(spec) == pytest.approx(energy, abs=1e-6)
    assert edp_selfconsistent(spec) == pytest.approx(edp_energy(spec).energy_plus, abs=1e-6)


def test_edp_gamma_zero_one_iteration():
    energy, trace = edp_selfconsistent(EDPSpec("harmonic", 0.0), return_trace=True)
    assert energy == pytest.approx(3.0, abs=1e-9)
    assert len(trace.energies) == 1
    assert len(trace.defects) == 1


# states whose energy-independent level lies inside the binding domain
# 1 + gamma E > 0, so the iteration can start from it
ADMISSIBLE_STARTS = [
    (g, n, ell)
    for g in (-0.05, -0.1, -0.2)
    for n in range(3)
    for ell in range(3)
    if 1 + g * 2 * (2 * n + ell + 1.5) > 0
]


@pytest.mark.parametrize("gamma, n, ell", ADMISSIBLE_STARTS)
def test_edp_fixed_point_monotone(gamma, n, ell):
    spec = EDPSpec("harmonic", gamma, n, ell)
    energy, trace = edp_selfconsistent(spec, return_trace=True)
    assert trace.energies[0] == spec.es_family().energy
    assert np.all(np.diff(trace.energies) < 0)
    assert energy == pytest.approx(edp_energy(spec).energy_plus, abs=1e-6)


def test_edp_max_iter():
    with pytest.raises(MaxIterExceeded) as info:
        edp_selfconsistent(EDPSpec("harmonic", -0.1), max_iter=2)
    assert len(info.value.trace.energies) == 3


def test_residual_examples():
    family = ESFamily.oscillator_1d(1.0, 0)
    energy, factors = es_solution(family)
    grid = np.linspace(-3, 3, 601)
    assert schrodinger_residual(factors.psi, HARMONIC, energy, grid) < 1e-6

    spec = QESSextic(1, 1, 0.75, 1)
    level = qes_solve(spec, 1)
    grid = np.arange(0.1, 2.2, 1e-3)
    assert level.energy == pytest.approx(10.291503, abs=1e-6)
    assert schrodinger_residual(level.psi, qes_potential(spec), level.energy, grid) < 1e-7

    potential = PolynomialPotential(1.0, 0.0, 0.1)
    state = solve_state(potential, 0, 12)
    psi = lambda x: ground_wavefunction(potential, state, x)  # noqa: E731
    grid = np.linspace(-2, 2, 801)
    assert schrodinger_residual(psi, potential, state.energy, grid) < 1e-2


def test_residual_all_points_excluded():
    with pytest.raises(AllPointsExcluded):
        schrodinger_residual(np.sin, HARMONIC, 1.0, np.linspace(-0.01, 0.01, 11))
