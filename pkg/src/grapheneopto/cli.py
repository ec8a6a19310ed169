"""Command-line front end.

Subcommands write their table (CSV, or JSON with ``--format json``) and a
``<table>_manifest.json`` holding the fully resolved configuration, the
derived parameters, package versions and timings. Feeding the manifest's
``config`` block back through ``--config`` reproduces the run.

Exit codes: 0 ok, 2 configuration error, 3 numerical error, 4 validity
guard failure (including failed ``validate`` checks).
"""
import argparse
import json
import logging
import math
import platform
import sys
import time
import warnings
from importlib import metadata
from pathlib import Path

import numpy as np
import scipy

from . import sweep as sw
from .cavity import PROFILE_COLUMNS
from .config import parse_config
from .errors import (
    ConfigError, ConvergenceError, DomainError, InstabilityError, SingularityError, ValidityWarning,
    WeakCouplingError,
)
from .langevin import linearize, optical_spring, phonon_number_analytic, spectrum_oracle
from .validation import run_all

log = logging.getLogger("grapheneopto")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_GUARD = 0, 2, 3, 4
SUBCOMMANDS = ("coupling", "damping", "phonon-map", "optimal", "spectrum", "validate")
SPECTRUM_COLUMNS = ("omega_rad_s", "S_nm")


def _version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def _write_table(out_dir, stem, columns, rows, fmt, comment):
    if fmt == "json":
        path = out_dir / f"{stem}.json"
        path.write_text(json.dumps(_jsonable({"comment": comment, "columns": list(columns),
                                              "rows": [list(r) for r in rows]}), indent=1))
    else:
        path = out_dir / f"{stem}.csv"
        sw.write_csv(path, columns, rows, comment)
    return path


def _write_manifest(out_dir, stem, cfg, args, timings, outputs, extra=None):
    manifest = {
        "subcommand": args.command,
        "convention": sw.CONVENTION,
        "config": cfg.resolved,
        "derived": {"coupling_mode": cfg.coupling_mode, "x0_m": cfg.x0, "parameters": cfg.params.as_dict()},
        "flags": {"threads": cfg.sweep.threads, "format": cfg.output_format, "seed": args.seed},
        "versions": {"artifact": _version(), "python": platform.python_version(),
                     "numpy": np.__version__, "scipy": scipy.__version__},
        "timings_s": timings,
        "outputs": [str(p.name) for p in outputs],
    }
    if extra:
        manifest.update(extra)
    path = out_dir / f"{stem}_manifest.json"
    path.write_text(json.dumps(_jsonable(manifest), indent=2))
    return path


def _cmd_coupling(cfg):
    rows = sw.coupling_scan(cfg.membrane, cfg.cavity, cfg.x0_axis, cfg.diameters)
    return "fig2", ("diameter_m",) + PROFILE_COLUMNS, rows, None, EXIT_OK


def _cmd_damping(cfg):
    scan = sw.detuning_scan(cfg.sweep)
    extra = {"summary": {"cooling_peak_rad_s": sw.cooling_peak(scan), "power_w": cfg.sweep.scan_power}}
    return "fig3", sw.FIG3_COLUMNS, sw.fig3_rows(scan), extra, EXIT_OK


def _cmd_phonon_map(cfg):
    pm = sw.phonon_map(cfg.sweep)
    valid = np.where(pm.valid, pm.n_ss, np.inf)
    summary = {"cells": int(pm.n_ss.size), "valid_cells": int(pm.valid.sum()),
               "ground_state_cells": int(pm.ground_state.sum()),
               "min_valid_n_ss": float(valid.min()) if pm.valid.any() else None}
    return "fig4", sw.FIG4_COLUMNS, sw.fig4_rows(pm), {"summary": summary}, EXIT_OK


def _cmd_optimal(cfg):
    recs = sw.optimal_cooling(cfg.sweep)
    return "fig5", sw.FIG5_COLUMNS, sw.fig5_rows(recs), None, EXIT_OK


def _cmd_spectrum(cfg):
    sysm = linearize(cfg.params, cfg.power, cfg.detuning, cfg.sweep.weak_coupling_threshold)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ValidityWarning)
        spring = optical_spring(sysm)
    res = spectrum_oracle(sysm, cfg.spectrum, spring)
    analytic = phonon_number_analytic(sysm, spring, cfg.sweep.square, check=False)
    if not sysm.weak_coupling:
        log.warning("weak-coupling guard fails here; the analytic occupancy is indicative only")
    summary = {
        "integrated_n": res.integrated_n, "previous_n": res.previous_n, "n_points": res.n_points,
        "refinements": res.refinements, "n_th": cfg.params.n_th,
        "analytic": {"n_ss": analytic.n_ss, "term_thermal": analytic.term_thermal,
                     "term_sigma_noise": analytic.term_sigma_noise, "term_light_noise": analytic.term_light_noise},
        "weak_coupling": sysm.weak_coupling,
        "G": sysm.G, "G_e": sysm.G_e, "omega_o": spring.omega_o, "gamma_o": spring.gamma_o,
        "correlators": res.correlators,
        "warnings": [str(w.message) for w in caught],
    }
    rows = list(zip(res.omega, res.S_nm))
    return "spectrum", SPECTRUM_COLUMNS, rows, {"summary": summary}, EXIT_OK


def _cmd_validate(cfg):
    results = run_all(threads=cfg.sweep.threads)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    rows = [(r.name, int(r.passed), r.detail, r.seconds) for r in results]
    return ("validate", ("check", "passed", "detail", "seconds"), rows, None,
            EXIT_GUARD if failed else EXIT_OK)


COMMANDS = {
    "coupling": _cmd_coupling, "damping": _cmd_damping, "phonon-map": _cmd_phonon_map,
    "optimal": _cmd_optimal, "spectrum": _cmd_spectrum, "validate": _cmd_validate,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="grapheneopto",
                                     description="Dissipative optomechanics of a graphene membrane in a cavity.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=None, help="JSON run configuration")
        p.add_argument("--out", type=Path, default=None, help="output directory (overrides the config)")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--seed", type=int, default=None, help="reserved; all computation is deterministic")
    return parser


def _apply_flags(cfg, args):
    from dataclasses import replace
    if args.out is not None:
        cfg.output_dir = args.out
        cfg.resolved["output"]["directory"] = str(args.out)
    if args.format is not None:
        cfg.output_format = args.format
        cfg.resolved["output"]["format"] = args.format
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError("--threads must be a positive integer")
        cfg.sweep = replace(cfg.sweep, threads=args.threads)
        cfg.resolved["sweep"]["threads"] = args.threads
    return cfg


def run(args):
    """Execute one parsed command line; returns the exit status."""
    start = time.perf_counter()
    try:
        cfg = _apply_flags(parse_config(args.config), args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SingularityError as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    t_config = time.perf_counter() - start
    try:
        t0 = time.perf_counter()
        stem, columns, rows, extra, status = COMMANDS[args.command](cfg)
        t_compute = time.perf_counter() - t0
    except (WeakCouplingError, InstabilityError) as exc:
        print(f"validity guard: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ConvergenceError, SingularityError, DomainError, FloatingPointError) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    table = _write_table(cfg.output_dir, stem, columns, rows, cfg.output_format, sw.CONVENTION)
    timings = {"config": t_config, "compute": t_compute, "total": time.perf_counter() - start}
    manifest = _write_manifest(cfg.output_dir, stem, cfg, args, timings, [table], extra)
    log.info("wrote %s and %s", table, manifest)
    return status


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
