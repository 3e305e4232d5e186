"""Command-line front end: ``solve <subcommand> [flags]``.

Exit status is 0 on success, 2 for configuration errors and 3 for
numerical failures (no closure root, no convergence, spectrum breakdown).
"""

import argparse
import json
import logging
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import List, Optional

import numpy as np

from qspectra import tables
from qspectra.edp import EDPSpec, SpectrumBreakdown, edp_energy, self_consistency_residual
from qspectra.hierarchy import HierarchyError, NoRootError, default_scan, solve_state, sweep
from qspectra.oracle import NotConverged, edp_selfconsistent, spectrum_1d, spectrum_radial
from qspectra.potential import PolynomialPotential
from qspectra.qes import QESSextic, qes_potential, qes_residual, qes_solve
from qspectra.report import ReportRow, write_report

log = logging.getLogger("qspectra")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

METHODS = ("hierarchy", "qes", "edp", "oracle", "compare", "table1", "table2", "sweep")
NUMERICAL_ERRORS = (HierarchyError, NotConverged, SpectrumBreakdown, ArithmeticError)


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass
class RunConfig:
    """Everything a run needs; serializes one-to-one to the JSON config file."""

    method: str
    mu: Optional[float] = None
    sigma: Optional[float] = None
    eta: Optional[float] = None
    beta: Optional[float] = None
    levels: List[int] = field(default_factory=lambda: [0])
    orders: Optional[List[int]] = None
    n_max: Optional[int] = None
    closure: str = "top"
    scan_lo: Optional[float] = None
    scan_hi: Optional[float] = None
    samples: Optional[int] = None
    format: str = "csv"
    out: Optional[str] = None
    jobs: int = 1
    timing: bool = False
    family: Optional[str] = None
    w: float = 2.0
    lam: float = -1.0
    gamma: Optional[float] = None
    n: int = 0
    l: Optional[int] = None
    allow_noncoherent: bool = False
    a: Optional[float] = None
    b: Optional[float] = None
    s: Optional[float] = None
    M: int = 0
    level: Optional[int] = None

    def validate(self):
        if self.method not in METHODS:
            raise ConfigError(f"method: unknown value {self.method!r}")
        if self.closure not in ("top", "jn"):
            raise ConfigError(f"closure: expected 'top' or 'jn', got {self.closure!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format: expected 'csv' or 'json', got {self.format!r}")
        if self.jobs < 1:
            raise ConfigError("jobs: must be at least 1")
        if any(k < 0 for k in self.levels):
            raise ConfigError("levels: level indices must be non-negative")
        if self.orders is not None and any(k < 1 for k in self.orders):
            raise ConfigError("orders: orders must be >= 1")
        if self.n_max is not None and self.n_max < 3:
            raise ConfigError("n_max: must be at least 3")
        if self.method in ("hierarchy", "sweep") and self.kind() != "polynomial":
            raise ConfigError(f"{self.method}: needs a polynomial potential (mu/sigma/eta/beta)")
        return self

    def kind(self):
        """Problem class selected by the parameters present."""
        if self.family is not None:
            return "edp"
        if self.a is not None:
            return "qes"
        return "polynomial"

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(unknown)}")
        if "method" not in data:
            raise ConfigError("method: missing")
        return cls(**data)

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# Parameter helpers
# ---------------------------------------------------------------------------


def parse_index_list(text):
    """'0..3' -> [0, 1, 2, 3]; '4,8,12' -> [4, 8, 12]."""
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = text.split("..")
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a..b' or a comma list, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError(f"empty index list {text!r}")
    return values


def polynomial(cfg, ell=None):
    if cfg.beta is not None:
        if cfg.sigma is not None:
            raise ConfigError("beta: conflicts with sigma (beta is the x^4 coupling of x^2 + beta x^4)")
        mu = 1.0 if cfg.mu is None else cfg.mu
        return PolynomialPotential(mu, cfg.beta, cfg.eta or 0.0, ell)
    if cfg.mu is None and cfg.sigma is None and cfg.eta is None:
        raise ConfigError("mu/sigma/eta: at least one potential coefficient is required")
    try:
        return PolynomialPotential(cfg.mu or 0.0, cfg.sigma or 0.0, cfg.eta or 0.0, ell)
    except ValueError as exc:
        raise ConfigError(f"potential: {exc}") from None


def scan_window(cfg, potential, n):
    if cfg.scan_lo is None and cfg.scan_hi is None and cfg.samples is None:
        return None
    lo, hi, samples = default_scan(potential, n)
    return (
        lo if cfg.scan_lo is None else cfg.scan_lo,
        hi if cfg.scan_hi is None else cfg.scan_hi,
        samples if cfg.samples is None else cfg.samples,
    )


def qes_spec(cfg):
    if cfg.b is None:
        raise ConfigError("b: required for the QES sextic family")
    s = cfg.s
    if s is None:
        if cfg.l is None:
            raise ConfigError("s: required (or give l, with s = l/2 + 3/4)")
        s = cfg.l / 2.0 + 0.75
    try:
        return QESSextic(cfg.a, cfg.b, s, cfg.M)
    except ValueError as exc:
        raise ConfigError(f"qes: {exc}") from None


def qes_levels(cfg, spec):
    if cfg.level is not None:
        if cfg.level > spec.M:
            raise ConfigError(f"level: {cfg.level} exceeds M = {spec.M}")
        return [cfg.level]
    return list(range(spec.M + 1))


def edp_spec(cfg):
    if cfg.gamma is None:
        raise ConfigError("gamma: required for the energy-dependent families")
    try:
        return EDPSpec(
            family=cfg.family,
            gamma=cfg.gamma,
            n=cfg.n,
            ell=0 if cfg.l is None else cfg.l,
            w=cfg.w,
            lam=cfg.lam,
            allow_noncoherent=cfg.allow_noncoherent,
        )
    except ValueError as exc:
        raise ConfigError(f"edp: {exc}") from None


def _echo_potential(p):
    return dict(mu=p.mu, sigma=p.sigma, eta=p.eta, l=p.ell)


def _echo_qes(spec):
    mu, sigma, eta = spec.power_coefficients()
    return dict(mu=mu, sigma=sigma, eta=eta, s=spec.s, b=spec.b, M=spec.M, l=spec.ell)


def _echo_edp(spec):
    if spec.family == "harmonic":
        return dict(gamma=spec.gamma, w=spec.w, n=spec.n, l=spec.ell)
    return dict(gamma=spec.gamma, lam=spec.lam, n=spec.n, l=spec.ell)


def _pmap(func, items, jobs):
    """Ordered map, optionally over worker processes."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


# ---------------------------------------------------------------------------
# Cells (top-level so that worker processes can import them)
# ---------------------------------------------------------------------------


def _hierarchy_cell(args):
    potential, n, order, mode, scan = args
    start = time.perf_counter()
    try:
        state = solve_state(potential, n, order, mode, scan)
        return state.energy, None, time.perf_counter() - start
    except NoRootError as exc:
        return None, str(exc), time.perf_counter() - start


def _sweep_cell(args):
    potential, n, n_max, mode, scan = args
    start = time.perf_counter()
    trace = sweep(potential, n, n_max, mode, scan)
    return trace, time.perf_counter() - start


def _oracle_polynomial(potential, count):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if potential.radial:
            return spectrum_radial(potential, count).eigenvalues
        return spectrum_1d(potential, count).eigenvalues


def _oracle_cell(args):
    potential, count = args
    start = time.perf_counter()
    return _oracle_polynomial(potential, count), time.perf_counter() - start


def _edp_oracle_cell(spec):
    start = time.perf_counter()
    return edp_selfconsistent(spec), time.perf_counter() - start


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


class RunOutcome:
    def __init__(self, rows, failed=False):
        self.rows = rows
        self.failed = failed


def _seconds(cfg, value):
    return value if cfg.timing else None


def run_hierarchy(cfg):
    potential = polynomial(cfg)
    orders = cfg.orders or list(tables.TABLE1_ORDERS)
    cells = [
        (potential, n, order, cfg.closure, scan_window(cfg, potential, n))
        for n in cfg.levels
        for order in orders
    ]
    rows, failed = [], False
    for (p, n, order, _, _), (energy, error, seconds) in zip(cells, _pmap(_hierarchy_cell, cells, cfg.jobs)):
        if error:
            log.error(error)
            failed = True
        rows.append(ReportRow("hierarchy", **_echo_potential(p), n=n, N=order, energy=energy,
                              seconds=_seconds(cfg, seconds)))
    return RunOutcome(rows, failed)


def run_sweep(cfg):
    potential = polynomial(cfg)
    n_max = cfg.n_max or 25
    cells = [(potential, n, n_max, cfg.closure, scan_window(cfg, potential, n)) for n in cfg.levels]
    rows = []
    for (p, n, *_), (trace, seconds) in zip(cells, _pmap(_sweep_cell, cells, cfg.jobs)):
        echo = _echo_potential(p)
        for i, (order, energy) in enumerate(trace.as_pairs()):
            delta = trace.deltas[i] if i < len(trace.deltas) else None
            rows.append(ReportRow("sweep", **echo, n=n, N=order, energy=energy, abs_dev=delta))
        rows.append(ReportRow("sweep-best", **echo, n=n, N=trace.best_order, energy=trace.best_energy,
                              seconds=_seconds(cfg, seconds)))
    return RunOutcome(rows)


def run_qes(cfg):
    spec = qes_spec(cfg)
    rows = []
    for n in qes_levels(cfg, spec):
        start = time.perf_counter()
        level = qes_solve(spec, n)
        residual = qes_residual(spec, level)
        rows.append(ReportRow("qes", **_echo_qes(spec), n=n, energy=level.energy, residual=residual,
                              seconds=_seconds(cfg, time.perf_counter() - start)))
    return RunOutcome(rows)


def run_edp(cfg):
    spec = edp_spec(cfg)
    start = time.perf_counter()
    result = edp_energy(spec)
    residual = self_consistency_residual(spec, result.energy_plus)
    if result.regime != "coherent":
        log.warning("gamma outside the coherent regime; result is exploratory")
    row = ReportRow("edp", **_echo_edp(spec), energy=result.energy_plus, residual=residual,
                    seconds=_seconds(cfg, time.perf_counter() - start))
    return RunOutcome([row])


def run_oracle(cfg):
    kind = cfg.kind()
    if kind == "edp":
        spec = edp_spec(cfg)
        energy, seconds = _edp_oracle_cell(spec)
        return RunOutcome([ReportRow("oracle", **_echo_edp(spec), energy=energy,
                                     seconds=_seconds(cfg, seconds))])
    if kind == "qes":
        spec = qes_spec(cfg)
        levels = qes_levels(cfg, spec) if cfg.level is not None else cfg.levels
        echo = _echo_qes(spec)
        potential = qes_potential(spec)
    else:
        potential = polynomial(cfg, cfg.l)
        levels = cfg.levels
        echo = _echo_potential(potential)
    values, seconds = _oracle_cell((potential, max(levels) + 1))
    rows = [ReportRow("oracle", **echo, n=n, energy=values[n]) for n in levels]
    rows[-1].seconds = _seconds(cfg, seconds)
    return RunOutcome(rows)


def run_compare(cfg):
    kind = cfg.kind()
    if kind == "edp":
        spec = edp_spec(cfg)
        result = edp_energy(spec)
        oracle, seconds = _edp_oracle_cell(spec)
        row = ReportRow("edp", **_echo_edp(spec), energy=result.energy_plus, oracle=oracle,
                        residual=self_consistency_residual(spec, result.energy_plus),
                        seconds=_seconds(cfg, seconds))
        return RunOutcome([row])
    if kind == "qes":
        spec = qes_spec(cfg)
        levels = qes_levels(cfg, spec)
        values, seconds = _oracle_cell((qes_potential(spec), max(levels) + 1))
        rows = []
        for n in levels:
            level = qes_solve(spec, n)
            rows.append(ReportRow("qes", **_echo_qes(spec), n=n, energy=level.energy, oracle=values[n],
                                  residual=qes_residual(spec, level)))
        rows[-1].seconds = _seconds(cfg, seconds)
        return RunOutcome(rows)

    potential = polynomial(cfg)
    values, oracle_seconds = _oracle_cell((potential, max(cfg.levels) + 1))
    echo = _echo_potential(potential)
    rows, failed = [], False
    if cfg.orders:
        cells = [
            (potential, n, order, cfg.closure, scan_window(cfg, potential, n))
            for n in cfg.levels
            for order in cfg.orders
        ]
        for (_, n, order, _, _), (energy, error, seconds) in zip(cells, _pmap(_hierarchy_cell, cells, cfg.jobs)):
            if error:
                log.error(error)
                failed = True
            rows.append(ReportRow("hierarchy", **echo, n=n, N=order, energy=energy, oracle=values[n],
                                  seconds=_seconds(cfg, seconds)))
    else:
        n_max = cfg.n_max or tables.TABLE2_N_MAX
        cells = [(potential, n, n_max, cfg.closure, scan_window(cfg, potential, n)) for n in cfg.levels]
        for (_, n, *_), (trace, seconds) in zip(cells, _pmap(_sweep_cell, cells, cfg.jobs)):
            rows.append(ReportRow("hierarchy", **echo, n=n, N=trace.best_order, energy=trace.best_energy,
                                  oracle=values[n], seconds=_seconds(cfg, seconds)))
    return RunOutcome(rows, failed)


def _status(value, reference, tol):
    if value is None:
        return "FAIL(no-root)"
    return "PASS" if abs(value - reference) <= tol else "FAIL"


def run_table1(cfg):
    blocks = list(tables.TABLE1.items())
    oracle_cells = [(PolynomialPotential(mu=mu, eta=eta), 4) for (mu, eta), _ in blocks]
    oracle_values = [v for v, _ in _pmap(_oracle_cell, oracle_cells, cfg.jobs)]
    cells = [
        (PolynomialPotential(mu=mu, eta=eta), n, order, cfg.closure, None)
        for (mu, eta), _ in blocks
        for n in range(4)
        for order in tables.TABLE1_ORDERS
    ]
    results = iter(_pmap(_hierarchy_cell, cells, cfg.jobs))
    rows, failed = [], False
    for ((mu, eta), block), oracle in zip(blocks, oracle_values):
        echo = _echo_potential(PolynomialPotential(mu=mu, eta=eta))
        for n, printed in enumerate(block):
            for order, reference in zip(tables.TABLE1_ORDERS, printed[:3]):
                energy, error, seconds = next(results)
                if error:
                    log.error(error)
                    failed = True
                rows.append(ReportRow("hierarchy", **echo, n=n, N=order, energy=energy, oracle=oracle[n],
                                      seconds=_seconds(cfg, seconds), reference=reference,
                                      status=_status(energy, reference, tables.TABLE1_METHOD_TOL)))
            rows.append(ReportRow("oracle", **echo, n=n, energy=oracle[n], reference=printed[3],
                                  status=_status(oracle[n], printed[3], tables.TABLE1_EXACT_TOL)))
    return RunOutcome(rows, failed)


def run_table2(cfg):
    potential = PolynomialPotential(*tables.TABLE2_POTENTIAL)
    echo = _echo_potential(potential)
    oracle, _ = _oracle_cell((potential, 4))
    cells = [(potential, n, tables.TABLE2_N_MAX, cfg.closure, None) for n in range(4)]
    rows = []
    for n, (trace, seconds) in enumerate(_pmap(_sweep_cell, cells, cfg.jobs)):
        energy = trace.best_energy
        status = _status(energy, tables.TABLE2_PRESENT[n], tables.TABLE2_PRESENT_TOL)
        if abs(energy - oracle[n]) > tables.TABLE2_HILL_TOL:
            status += ";FLAG(oracle)"
        rows.append(ReportRow("hierarchy", **echo, n=n, N=trace.best_order, energy=energy, oracle=oracle[n],
                              seconds=_seconds(cfg, seconds), reference=tables.TABLE2_PRESENT[n],
                              status=status))
    for n in range(4):
        rows.append(ReportRow("oracle", **echo, n=n, energy=oracle[n], reference=tables.TABLE2_HILL[n],
                              status=_status(oracle[n], tables.TABLE2_HILL[n], tables.TABLE2_HILL_TOL)))
    return RunOutcome(rows)


COMMANDS = {
    "hierarchy": run_hierarchy,
    "sweep": run_sweep,
    "qes": run_qes,
    "edp": run_edp,
    "oracle": run_oracle,
    "compare": run_compare,
    "table1": run_table1,
    "table2": run_table2,
}


def run(cfg, stream=None):
    """Execute ``cfg`` and write its report. Returns the exit status."""
    cfg.validate()
    outcome = COMMANDS[cfg.method](cfg)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            write_report(outcome.rows, fh, cfg.format)
    else:
        write_report(outcome.rows, stream or sys.stdout, cfg.format)
    return EXIT_NUMERIC if outcome.failed else EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

# flag dest -> RunConfig field, for flags whose names differ
_RENAMES = {"lambda_": "lam"}


def build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    g = shared.add_argument_group("potential and hierarchy")
    g.add_argument("--mu", type=float)
    g.add_argument("--sigma", type=float)
    g.add_argument("--eta", type=float)
    g.add_argument("--beta", type=float, help="quartic coupling of x^2 + beta x^4")
    g.add_argument("--levels", type=parse_index_list, help="'0..3' or '0,2'")
    g.add_argument("--orders", type=parse_index_list, help="'4,8,12' or '1..25'")
    g.add_argument("--n-max", type=int)
    g.add_argument("--closure", choices=("jn", "top"))
    g.add_argument("--scan-lo", type=float)
    g.add_argument("--scan-hi", type=float)
    g.add_argument("--samples", type=int)
    o = shared.add_argument_group("output")
    o.add_argument("--format", choices=("csv", "json"))
    o.add_argument("--out", metavar="PATH")
    o.add_argument("--config", metavar="PATH", help="JSON run config; flags override its fields")
    o.add_argument("--dump-config", metavar="PATH", help="write the resolved config as JSON")
    o.add_argument("--jobs", type=int, metavar="K")
    o.add_argument("--timing", action="store_const", const=True, help="fill the seconds column")
    e = shared.add_argument_group("energy-dependent potentials")
    e.add_argument("--family", choices=("harmonic", "coulomb"))
    e.add_argument("--w", type=float)
    e.add_argument("--lambda", dest="lambda_", type=float)
    e.add_argument("--gamma", type=float)
    e.add_argument("--n", type=int)
    e.add_argument("--l", type=int)
    e.add_argument("--allow-noncoherent", action="store_const", const=True)
    q = shared.add_argument_group("QES sextic")
    q.add_argument("--a", type=float)
    q.add_argument("--b", type=float)
    q.add_argument("--s", type=float)
    q.add_argument("--M", type=int)
    q.add_argument("--level", type=int)
    o.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="solve", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="method", required=True)
    helps = {
        "hierarchy": "hierarchy energies at fixed orders",
        "sweep": "estimates over N = 1..n_max with the best order",
        "qes": "closed-form QES sextic levels",
        "edp": "closed-form energy-dependent levels",
        "oracle": "numerical eigenvalues",
        "compare": "method values against the numerical oracle",
        "table1": "regenerate the sextic benchmark table",
        "table2": "regenerate the quartic-sextic benchmark table",
    }
    for name in METHODS:
        sub.add_parser(name, parents=[shared], help=helps[name])
    return parser


def config_from_args(ns):
    data = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: cannot read {ns.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config: expected a JSON object")
    data["method"] = ns.method
    names = {f.name for f in fields(RunConfig)}
    for key, value in vars(ns).items():
        key = _RENAMES.get(key, key)
        if key in names and key != "method" and value is not None:
            data[key] = value
    return RunConfig.from_dict(data)


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if ns.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = config_from_args(ns).validate()
        if ns.dump_config:
            with open(ns.dump_config, "w") as fh:
                fh.write(cfg.to_json() + "\n")
        return run(cfg)
    except NUMERICAL_ERRORS as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    except (ConfigError, ValueError, TypeError) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
