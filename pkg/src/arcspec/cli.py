"""
Command-line driver::

    arcspec <subcommand> --config <path> [--out <dir>] [--threads N] [--seed S] [--strict]

Subcommands: ``curve``, ``spectrum-1d``, ``spectrum-3d``, ``count``,
``asymptotics``. Exit codes: 0 ok, 2 configuration error, 3 solver
failure, 4 failed acceptance checks (``asymptotics --strict``). Errors
are also reported as one JSON record on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import asymptotics as asy
from .birman_schwinger import BSAssembler, BSError, default_quadrature, solve_kappa, write_eigenpairs_csv
from .curves import (
    CurveError,
    build_curve,
    frenet_serret_residuals,
    injectivity_check,
)
from .io import ConfigError, ExperimentConfig, Table, load_config, write_csv, write_json, write_report
from .operator1d import BC, extended_rescaled_spectrum, spectrum_1d, write_spectrum_csv

__all__ = ["SUBCOMMANDS", "run", "main", "RunResult", "EXIT_OK", "EXIT_CONFIG", "EXIT_SOLVER", "EXIT_CHECK"]

log = logging.getLogger("arcspec")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_CHECK = 0, 2, 3, 4

DECAY_BAND = (0.5, 1.5)


class RunResult:
    def __init__(self, status: int, paths, checks=None):
        self.status = status
        self.paths = list(paths)
        self.checks = checks or {}


def _curve(cfg: ExperimentConfig, out: Path, threads: int):
    curve = build_curve(cfg.curve)
    s = curve.sample_grid(cfg.samples)
    pos = curve.position(s)
    g, tau, beta = curve.curvature(s), curve.torsion(s), curve.tang_angle(s)
    inner = s[(s > 1e-3 * curve.length) & (s < curve.length * (1 - 1e-3))]
    fs = frenet_serret_residuals(curve, inner)
    rows = [[*map(float, (si, *p, gi, ti, bi))] for si, p, gi, ti, bi in zip(s, pos, g, tau, beta)]
    paths = [write_csv(out / "curve.csv", ["s", "x", "y", "z", "curvature", "torsion", "tang_angle"], rows)]
    widths = sorted({cfg.curve.d0} | {asy.tube_width(a) for a in cfg.alpha_list}, reverse=True)
    inj = [asdict(injectivity_check(curve, d)) for d in widths if d > 0]
    summary = {
        "kind": cfg.curve.kind,
        "L": curve.length,
        "max_curvature": curve.max_curvature(),
        "frenet_serret_max_residual": max(fs),
        "injectivity": inj,
    }
    paths.append(write_json(out / "curve.json", summary))
    return paths, {}


def _spectrum_1d(cfg: ExperimentConfig, out: Path, threads: int):
    curve = build_curve(cfg.curve)
    spectra = [spectrum_1d(curve, cfg.k, cfg.n, bc) for bc in (BC.DIRICHLET, BC.NEUMANN)]
    path = out / "spectrum_1d.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    write_spectrum_csv(spectra, path, curve.length)
    paths = [path]
    if cfg.d_list:
        rows = []
        for d in cfg.d_list:
            ex, til = extended_rescaled_spectrum(curve, d, cfg.n, cfg.k)
            for j in range(cfg.k):
                rows.append([d, j + 1, float(ex[j]), float(til[j]), float(spectra[0][j])])
        paths.append(write_csv(out / "extended_1d.csv",
                               ["d", "j", "lambda_ex", "lambda_rescaled", "lambda_S"], rows))
    return paths, {}


def _spectrum_3d(cfg: ExperimentConfig, out: Path, threads: int):
    curve = build_curve(cfg.curve)
    pairs = []
    for alpha in cfg.alpha_list:
        z = asy.zeta_alpha(alpha)
        quad = default_quadrature(curve, math.sqrt(z**2 + 0.25 * curve.max_curvature() ** 2),
                                  panels_per_decay=max(cfg.resolutions))
        if quad.size > cfg.n_q:
            raise BSError(f"alpha={alpha}: rule needs {quad.size} nodes, above the cap n_q={cfg.n_q}")
        asm = BSAssembler(curve, quad)
        for j in range(1, cfg.j_max + 1):
            pairs.append(solve_kappa(curve, alpha, j, tol=cfg.tol, assembler=asm))
    path = out / "eigenpairs.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    write_eigenpairs_csv(pairs, path)
    return [path], {}


def _count(cfg: ExperimentConfig, out: Path, threads: int):
    curve = build_curve(cfg.curve)
    rows = asy.counting_report(curve, cfg.alpha_list, refine=cfg.count_refine, threads=threads)
    table = Table(list(asy.COUNT_COLUMNS),
                  [[r.alpha, r.N, r.predicted, r.rel_deviation, "" if r.N_refined is None else r.N_refined]
                   for r in rows])
    return write_report(table, out, "counting", formats=("csv",)), {}


def _asymptotics(cfg: ExperimentConfig, out: Path, threads: int):
    curve = build_curve(cfg.curve)
    rep = asy.expansion_report(curve, cfg.alpha_list, cfg.j_max, cfg.resolutions, n_1d=cfg.n,
                               tol=cfg.tol, eps_frac=cfg.eps_frac, threads=threads,
                               curve_id=cfg.curve.kind, n_q_cap=cfg.n_q)
    checks = {
        "brackets": rep.brackets_ok,
        "residual_monotone": all(rep.monotone.values()),
        "no_failed_rows": all("solver-failure" not in r.flags for r in rep.rows),
    }
    fit = rep.fit_for(1)
    if fit is not None:
        checks["decay_exponent_in_band"] = DECAY_BAND[0] <= fit.exponent <= DECAY_BAND[1]

    class _Rep:
        table = rep.table

        @staticmethod
        def summary():
            return {**rep.summary(), "checks": checks, "passed": all(checks.values()),
                    "decay_band_in_pi": list(DECAY_BAND)}

    paths = write_report(_Rep, out, "asymptotics", formats=("csv", "gnuplot", "json"))
    return paths, checks


SUBCOMMANDS = {
    "curve": _curve,
    "spectrum-1d": _spectrum_1d,
    "spectrum-3d": _spectrum_3d,
    "count": _count,
    "asymptotics": _asymptotics,
}


def run(subcommand: str, config: ExperimentConfig, out=None, threads: int = 1,
        strict: bool = False) -> RunResult:
    """Execute one subcommand; raises on configuration/solver errors."""
    if subcommand not in SUBCOMMANDS:
        raise ConfigError("subcommand", f"unknown subcommand {subcommand!r}")
    out = Path(out if out is not None else config.out)
    paths, checks = SUBCOMMANDS[subcommand](config, out, max(1, threads))
    status = EXIT_OK
    if strict and checks and not all(checks.values()):
        status = EXIT_CHECK
    return RunResult(status, paths, checks)


def _error_record(kind, exc, subcommand):
    rec = {"status": "error", "kind": kind, "error": type(exc).__name__, "message": str(exc),
           "subcommand": subcommand}
    if isinstance(exc, ConfigError):
        rec["path"] = exc.path
    return json.dumps(rec, sort_keys=True)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arcspec", description="Spectra of singular interactions on open arcs.")
    p.add_argument("subcommand", choices=sorted(SUBCOMMANDS))
    p.add_argument("--config", required=True, help="JSON experiment configuration")
    p.add_argument("--out", default=None, help="output directory (overrides the config)")
    p.add_argument("--threads", type=int, default=1, help="worker threads for independent cells")
    p.add_argument("--seed", default=None, help="accepted and ignored; all computations are deterministic")
    p.add_argument("--strict", action="store_true", help="exit 4 when acceptance checks fail")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(_error_record("config", exc, args.subcommand), file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run(args.subcommand, cfg, out=args.out, threads=args.threads, strict=args.strict)
    except ConfigError as exc:
        print(_error_record("config", exc, args.subcommand), file=sys.stderr)
        return EXIT_CONFIG
    except (BSError, CurveError, ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(_error_record("solver", exc, args.subcommand), file=sys.stderr)
        return EXIT_SOLVER
    for path in result.paths:
        print(path)
    if result.status == EXIT_CHECK:
        failed = sorted(k for k, v in result.checks.items() if not v)
        print(json.dumps({"status": "check-failed", "failed": failed}, sort_keys=True), file=sys.stderr)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
