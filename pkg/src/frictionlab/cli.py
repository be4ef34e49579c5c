"""Command-line interface: run scenarios, sweep grids, compare roll models, query the oracle.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
Set ``FRICTIONLAB_LOG`` to a logging level name (DEBUG, INFO, ...) for more output.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from typing import Iterable, List, Sequence

import numpy as np

from . import scenarios
from .config import ConfigError, ScenarioConfig, grid_values, load
from .dynamics import NumericalError, TimeSeries
from .oracles import classify_sphere_incline

log = logging.getLogger("frictionlab")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def fmt(value) -> str:
    """CSV cell: floats with 17 significant digits, everything else via str."""
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


@contextmanager
def _sink(path: str):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with _sink(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_series(path: str, series: TimeSeries) -> None:
    write_csv(path, series.columns, series.data)


# -- run ---------------------------------------------------------------------

def cmd_run(cfg: ScenarioConfig, args) -> int:
    setup = cfg.build()
    series = setup.run()
    write_series(args.out, series)
    log.info("%s: %d rows, t_end = %.6g s", cfg.scenario, len(series), series["t"][-1])
    return EXIT_OK


# -- sweep -------------------------------------------------------------------

def _phase_cell(cfg: ScenarioConfig, alpha_deg: float, eta_r: float):
    setup = cfg.build(alpha_deg=alpha_deg, friction={"eta_r": eta_r})
    row = scenarios.classify_incline_run(setup)
    return alpha_deg, eta_r, row.simulated.value, row.oracle.value


def _stack_row(cfg: ScenarioConfig, eta_r: float, lo: float, hi: float, tol: float):
    kwargs = dict(cfg.params)
    kwargs.pop("m_top", None)
    kwargs.pop("eta_r", None)
    common = dict(dt=cfg.dt, duration=cfg.duration, every=cfg.output_every,
                  friction=cfg.friction, **kwargs)
    m_hold, m_fail = scenarios.critical_top_mass(eta_r, lo, hi, tol, **common)
    setup = scenarios.stacking(m_top=m_fail, eta_r=eta_r, **common)
    outcome = scenarios.stacking_outcome(setup, setup.run())
    return (eta_r, m_hold, m_fail, outcome.ground_slide_mode.value,
            outcome.ground_roll_mode.value)


def _pool_map(fn, tasks: List[tuple], workers: int) -> list:
    if workers <= 1:
        return [fn(*task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, *task) for task in tasks]
        return [f.result() for f in futures]  # grid order, independent of completion order


def cmd_sweep(cfg: ScenarioConfig, args) -> int:
    sweep = cfg.sweep
    if cfg.scenario == "sphere_incline":
        alphas = grid_values(sweep.get("alpha_deg", {"start": 2.0, "stop": 30.0, "count": 10}),
                             "alpha_deg")
        etas = grid_values(sweep.get("eta_r", {"start": 0.2, "stop": 0.5, "count": 7}), "eta_r")
        tasks = [(cfg, a, e) for a in alphas for e in etas]
        results = _pool_map(_phase_cell, tasks, args.workers)
        oracle = np.array([r[3] for r in results], dtype=object).reshape(len(alphas), len(etas))
        edge = scenarios.boundary_cells(oracle).ravel()
        rows = [(a, e, sim, orc, sim == orc, bool(b))
                for (a, e, sim, orc), b in zip(results, edge)]
        write_csv(args.out, ["alpha_deg", "eta_r", "simulated", "oracle", "agree", "boundary"],
                  rows)
        agree = sum(r[4] for r in rows)
        log.info("phase map: %d/%d cells agree", agree, len(rows))
        return EXIT_OK
    if cfg.scenario == "stacking":
        etas = grid_values(sweep.get("eta_r", [0.16, 0.23, 0.35]), "eta_r")
        lo = float(sweep.get("lo", 0.1))
        hi = float(sweep.get("hi", 4.0))
        tol = float(sweep.get("tol", 0.01))
        tasks = [(cfg, e, lo, hi, tol) for e in etas]
        try:
            rows = _pool_map(_stack_row, tasks, args.workers)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        write_csv(args.out, ["eta_r", "m_top_holds", "m_top_collapses", "ground_slide_mode",
                             "ground_roll_mode"], rows)
        return EXIT_OK
    raise ConfigError(f"sweep supports sphere_incline and stacking, not {cfg.scenario}")


# -- roll model comparison ---------------------------------------------------

def cmd_compare(cfg: ScenarioConfig, args) -> int:
    if cfg.scenario not in ("disk_rolling", "sphere_incline"):
        raise ConfigError("compare-roll-models needs a disk_rolling or sphere_incline config")
    legacy = dict(roll_model="legacy", mu_r=cfg.compare.get("mu_r", cfg.friction.get("mu_r", 0.1)),
                  legacy_guard=cfg.compare.get("legacy_guard", False))
    hist = cfg.build(friction={"roll_model": "history"}).run()
    leg = cfg.build(friction=legacy).run()
    header = ["t"] + [f"history.{c}" for c in hist.columns[1:]] \
        + [f"legacy.{c}" for c in leg.columns[1:]]
    data = np.hstack([hist.data, leg.data[:, 1:]])
    write_csv(args.out, header, data)
    return EXIT_OK


# -- oracle ------------------------------------------------------------------

def cmd_oracle(args) -> int:
    alpha, mu_s, mu_k, eta_r = args.alpha_deg, args.mu_s, args.mu_k, args.eta_r
    if args.config:
        cfg = load(args.config)
        params = cfg.build().world.contacts[0].friction
        alpha = cfg.params.get("alpha_deg", 35.0) if alpha is None else alpha
        mu_s = params.mu_s if mu_s is None else mu_s
        mu_k = params.mu_k if mu_k is None else mu_k
        eta_r = params.eta_r if eta_r is None else eta_r
    missing = [n for n, v in (("--alpha-deg", alpha), ("--mu-s", mu_s), ("--mu-k", mu_k),
                              ("--eta-r", eta_r)) if v is None]
    if missing:
        raise ConfigError(f"oracle needs {', '.join(missing)} (or a --config)")
    try:
        state = classify_sphere_incline(math.radians(alpha), mu_s, mu_k, eta_r)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(state.value)
    return EXIT_OK


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frictionlab", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario TOML file")
    common.add_argument("--out", default="-", help="CSV output path ('-' for stdout)")
    common.add_argument("--workers", type=int, default=1, help="parallel simulations (sweep)")
    common.add_argument("--seedless", action="store_true",
                        help="no effect; every run is deterministic")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="simulate one scenario to CSV")
    sub.add_parser("sweep", parents=[common], help="phase map or stacking critical-mass table")
    sub.add_parser("compare-roll-models", parents=[common],
                   help="history vs constant-torque roll model, paired CSV")
    oracle = sub.add_parser("oracle", parents=[common],
                            help="analytic steady state of a sphere on a slope")
    oracle.add_argument("--alpha-deg", type=float)
    oracle.add_argument("--mu-s", type=float)
    oracle.add_argument("--mu-k", type=float)
    oracle.add_argument("--eta-r", type=float)
    return parser


def _configure_logging() -> None:
    level = os.environ.get("FRICTIONLAB_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv: Sequence[str] = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.command == "oracle":
            return cmd_oracle(args)
        if not args.config:
            raise ConfigError(f"{args.command} needs --config")
        if args.workers < 1:
            raise ConfigError("--workers must be at least 1")
        cfg = load(args.config)
        handler = {"run": cmd_run, "sweep": cmd_sweep, "compare-roll-models": cmd_compare}
        return handler[args.command](cfg, args)
    except ConfigError as exc:
        print(f"frictionlab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"frictionlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
