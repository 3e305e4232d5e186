"""Eigenvalue toolkit for anharmonic, quasi-exactly solvable and
energy-dependent Schrodinger problems."""

from qspectra.potential import PolynomialPotential
from qspectra.special import hermite, laguerre
from qspectra.catalog import ESFamily, WavefunctionFactors, es_solution, es_residual
from qspectra.hierarchy import (
    ConvergenceTrace,
    HierarchyState,
    NoRootError,
    alpha,
    closure_value,
    coefficients,
    energy_at_order,
    ground_wavefunction,
    order_roots,
    solve_state,
    susy_bridge_residual,
    sweep,
)
from qspectra.qes import QESLevel, QESSextic, lambda_roots, qes_potential, qes_residual, qes_solve
from qspectra.edp import EDPResult, EDPSpec, edp_energy, edp_wavefunction, self_consistency_residual
from qspectra.oracle import (
    Discretization,
    OracleResult,
    edp_selfconsistent,
    fd_spectrum,
    numerov_eigenvalue,
    schrodinger_residual,
)

__version__ = "0.1.0"
