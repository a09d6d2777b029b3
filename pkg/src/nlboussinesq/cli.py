"""Command line driver: ``nlb run|check|uniqueness|converge|plotdata``.

Exit codes: 0 success, 2 configuration error, 3 missing or malformed
artifact, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import random
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .coupled import (
    _jsonable,
    build_problem,
    check_compatibility,
    dt_study,
    galerkin_convergence,
    run,
)
from .errors import ArtifactError, ConfigError, SolverError
from .heat import uniqueness_experiment, write_rows
from .scenarios import scenario

log = logging.getLogger("nlboussinesq")

EXIT_OK, EXIT_CONFIG, EXIT_ARTIFACT, EXIT_NUMERICAL = 0, 2, 3, 4


class SeedFreeViolation(RuntimeError):
    pass


_RNG_ENTRY_POINTS = (
    (np.random, ("default_rng", "seed", "rand", "randn", "random", "normal", "uniform", "randint", "standard_normal", "RandomState")),
    (random, ("random", "seed", "uniform", "randint", "gauss", "choice", "shuffle")),
)


@contextlib.contextmanager
def seed_free(active: bool = True):
    """Make every common RNG entry point raise while the block runs."""
    if not active:
        yield
        return
    saved = []

    def trap(name):
        def _raise(*args, **kwargs):
            raise SeedFreeViolation(f"random number generator used: {name}")

        return _raise

    for mod, names in _RNG_ENTRY_POINTS:
        for name in names:
            saved.append((mod, name, getattr(mod, name)))
            setattr(mod, name, trap(f"{mod.__name__}.{name}"))
    try:
        yield
    finally:
        for mod, name, fn in saved:
            setattr(mod, name, fn)


def _load(args) -> cfgmod.RunConfig:
    cfg = cfgmod.parse_config(args.config) if args.config else cfgmod.RunConfig()
    if getattr(args, "out", None):
        cfg = replace(cfg, output_dir=args.out)
    return cfg


def _out_dir(cfg) -> Path:
    return Path(cfg.output_dir)


def _dump(path: Path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def cmd_run(args) -> int:
    cfg = _load(args)
    out = _out_dir(cfg)
    if cfg.mode == "check":
        return cmd_check(args)
    if cfg.mode == "uniqueness":
        return cmd_uniqueness(args)
    if cfg.mode == "converge":
        return cmd_converge(args)
    prob = build_problem(cfg)
    res = run(prob, out)
    k = args.dt_study if args.dt_study is not None else (1 if cfg.mode == "verify" else 0)
    if k > 0:
        study = dt_study(cfg, k, problem=prob)
        _dump(out / "dt_study.json", study)
        print(f"dt study: relative changes {['%.3g' % r for r in study['relative_change']]}, stable={study['stable']}")
    led = res.report["ledger"]
    print(
        f"{prob.bundle.id}: t={res.report['final_time']:.6g}, steps={res.report['steps_completed']}, "
        f"C_mech={led['C_mechanical']:.3g}, C_thermal={led['C_thermal']:.3g}, "
        f"max boundary residual={led['max_boundary_residual']:.3g} -> {out}"
    )
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = _load(args)
    prob = build_problem(cfg)
    level = args.level if getattr(args, "level", None) else prob.bundle.level
    report = check_compatibility(prob, level)
    for c in report["checks"]:
        print(f"[{c['status']}] {c['name']}: residual {c['residual']:.3e} (tolerance {c['tolerance']:.3e})")
    for note in report["notes"]:
        print(f"note: {note}")
    if args.out:
        _dump(Path(args.out) / "compatibility.json", report)
    return EXIT_OK


def cmd_uniqueness(args) -> int:
    cfg = _load(args)
    out = _out_dir(cfg)
    prob = build_problem(cfg)
    b = scenario("uniqueness-pair", prob.mesh, cfg.physics.lam, cfg.scenario.T_B, cfg.scenario.amplitude, basis=prob.basis)
    rep = uniqueness_experiment(b.theta_0, b.theta_0_b, b.v_frozen, cfg.time.T_end, cfg.time.dt, b.theta_B, prob.params)
    out.mkdir(parents=True, exist_ok=True)
    write_rows(out / "uniqueness.csv", ("t", "Q"), [{"t": t, "Q": q} for t, q in zip(rep.times, rep.Q)])
    summary = {"monotone": rep.monotone, "max_increase": rep.max_increase, "scale": rep.scale, "max_Q": rep.max_Q}
    _dump(out / "uniqueness.json", summary)
    print(f"Q(0)={rep.Q[0]:.6e} Q(T)={rep.Q[-1]:.6e} monotone={rep.monotone}")
    return EXIT_OK


def cmd_converge(args) -> int:
    cfg = _load(args)
    out = _out_dir(cfg)
    N_list = args.N or [max(1, cfg.basis.N // 4), max(1, cfg.basis.N // 2), cfg.basis.N]
    rep = galerkin_convergence(cfg, N_list)
    _dump(out / "converge.json", rep)
    print(f"N={rep['N']} velocity differences={rep['velocity_differences']} theta differences={rep['theta_differences']}")
    return EXIT_OK


PLOT_SERIES = {
    "energy.csv": ("t", "kinetic_energy", "viscous_dissipation", "buoyancy_work", "heat_quadratic", "weighted_heat", "thermal_dissipation", "boundary_work"),
    "mean_theta.csv": ("t", "mean_theta", "mean_theta_rate"),
    "slack.csv": ("t", "mechanical_excess", "thermal_excess", "weighted_excess"),
}


def emit_plotdata(run_dir: Path | str) -> dict:
    """Split ``ledger.csv`` into plot-ready series under ``<run_dir>/plot``.

    Returns the column sums of every written series.
    """
    run_dir = Path(run_dir)
    ledger = run_dir / "ledger.csv"
    if not ledger.is_file():
        raise ArtifactError(f"{ledger} not found")
    with open(ledger, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ArtifactError(f"{ledger} has no rows")
    plot = run_dir / "plot"
    plot.mkdir(exist_ok=True)
    sums = {}
    for name, cols in PLOT_SERIES.items():
        missing = [c for c in cols if c not in rows[0]]
        if missing:
            raise ArtifactError(f"{ledger} lacks columns {missing}")
        table = [{c: float(r[c]) for c in cols} for r in rows]
        write_rows(plot / name, cols, table)
        sums[name] = {c: float(np.sum([r[c] for r in table])) for c in cols}
    summary = {"rows": len(rows), "column_sums": sums}
    _dump(plot / "summary.json", summary)
    return summary


def cmd_plotdata(args) -> int:
    summary = emit_plotdata(args.run_dir)
    print(f"{summary['rows']} rows -> {Path(args.run_dir) / 'plot'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(
        prog="nlb",
        description="Boussinesq flow with a non-local temperature boundary condition on the unit square.",
        epilog="default configuration (any subset may be given in --config):\n" + cfgmod.default_config_text(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p):
        p.add_argument("--config", type=Path, default=None, help="JSON run configuration; built-in defaults when omitted")
        p.add_argument("--out", type=str, default=None, help="output directory (overrides output_dir)")
        p.add_argument("--seed-free", action="store_true", help="fail if any random number generator is touched")

    p = sub.add_parser("run", help="integrate the coupled system and write a run directory", formatter_class=fmt)
    common(p)
    p.add_argument("--dt-study", type=int, default=None, metavar="K", help="repeat with dt halved K times and compare diagnostics")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", help="compatibility report for the initial data", formatter_class=fmt)
    common(p)
    p.add_argument("--level", type=int, choices=(1, 2, 3), default=None, help="compatibility level; the preset's own level when omitted")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("uniqueness", help="twin temperature runs under a frozen flow", formatter_class=fmt)
    common(p)
    p.set_defaults(func=cmd_uniqueness)

    p = sub.add_parser("converge", help="final-time differences over Galerkin mode counts", formatter_class=fmt)
    common(p)
    p.add_argument("--N", type=int, nargs="+", default=None, help="mode counts; N/4, N/2, N when omitted")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("plotdata", help="plot-ready CSV series from a finished run", formatter_class=fmt)
    p.add_argument("run_dir", type=Path)
    p.add_argument("--seed-free", action="store_true", help="fail if any random number generator is touched")
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        with seed_free(args.seed_free):
            return args.func(args)
    except ConfigError as exc:
        print(f"config error at {exc.key}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArtifactError as exc:
        print(f"artifact error: {exc}", file=sys.stderr)
        return EXIT_ARTIFACT
    except (SolverError, SeedFreeViolation, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
