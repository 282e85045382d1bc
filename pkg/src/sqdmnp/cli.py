"""Command-line front end: ``sqdmnp {trajectory,sweep,dielectric-info}``."""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import parse_config
from .dielectric import gamma_factor, gold_table, load_table, peak_response, permittivity
from .dynamics import integrate
from .errors import SqdMnpError, SweepError
from .model import couplings_for
from .sweep import run_sweep

log = logging.getLogger("sqdmnp")

TRAJECTORY_HEADER = (
    "t_ps,eof,concurrence,rho11,rho22,rho33,rho44,"
    "re_rho12,im_rho12,re_rho13,im_rho13,re_rho14,im_rho14,"
    "re_rho23,im_rho23,re_rho24,im_rho24,re_rho34,im_rho34,trace_err"
)
_OFF_DIAGONAL = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARTIAL = 3


def fmt(x):
    """17 significant digits, locale independent."""
    return format(float(x), ".17g")


def load_dielectric(spec):
    if spec.startswith("builtin:"):
        return gold_table()
    return load_table(spec)


def trajectory_rows(traj):
    for k in range(len(traj)):
        rho = traj.states[k]
        cols = [traj.times[k], traj.eof[k], traj.concurrence[k], *traj.populations[k]]
        for i, j in _OFF_DIAGONAL:
            cols += [rho[i, j].real, rho[i, j].imag]
        cols.append(traj.trace_error[k])
        yield ",".join(fmt(c) for c in cols)


def write_trajectory_csv(path, traj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TRAJECTORY_HEADER + "\n")
        for row in trajectory_rows(traj):
            fh.write(row + "\n")


def sweep_header(n_axes):
    names = ["axis1_name", "axis1_value"]
    if n_axes == 2:
        names += ["axis2_name", "axis2_value"]
    return ",".join(names + ["metric", "metric_value", "t_star_ps", "status"])


def write_sweep_csv(path, grid):
    names = [name for name, _ in grid.axes]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(sweep_header(len(names)) + "\n")
        for _, coords, value, t_star, status in grid.cells():
            cols = []
            for name, v in zip(names, coords):
                cols += [name, fmt(v)]
            cols += [grid.metric, fmt(value), fmt(t_star), status]
            fh.write(",".join(cols) + "\n")


def write_metadata(path, cfg, command, extra=None, seed=None):
    meta = {
        "artifact": "sqdmnp",
        "version": __version__,
        "command": command,
        "seed": seed,
        "config": cfg.resolved,
    }
    if extra:
        meta["results"] = extra
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _prepare(args):
    overrides = {}
    if args.workers is not None:
        overrides["sweep"] = {"workers": args.workers}
    cfg = parse_config(args.config, overrides=overrides)
    out = Path(args.out) if args.out else cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    return cfg, out


def cmd_trajectory(args):
    cfg, out = _prepare(args)
    table = load_dielectric(cfg.table_path)
    c = couplings_for(cfg.params, table)
    traj = integrate(
        cfg.params, c, cfg.t_span,
        sample_dt=cfg.sample_dt, rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol, backend=cfg.backend,
    )
    write_trajectory_csv(out / cfg.trajectory_csv, traj)
    k = int(np.argmax(traj.eof))
    summary = {
        "max_eof": float(traj.eof[k]),
        "t_max_eof_ps": float(traj.times[k]),
        "steps": traj.n_steps,
        "rejected_steps": traj.n_rejected,
        "backend": traj.backend,
    }
    write_metadata(out / cfg.metadata_json, cfg, "trajectory", summary, seed=args.seed)
    print(f"max EoF {summary['max_eof']:.6f} at t = {summary['t_max_eof_ps']:.3f} ps -> {out / cfg.trajectory_csv}")
    return EXIT_OK


def cmd_sweep(args):
    cfg, out = _prepare(args)
    if cfg.sweep is None:
        raise SqdMnpError("sweep.axes: the sweep command needs at least one axis")
    table = load_dielectric(cfg.table_path)
    grid = run_sweep(cfg.sweep, table, workers=cfg.workers)
    write_sweep_csv(out / cfg.sweep_csv, grid)
    n_failed = int(np.count_nonzero(grid.failed))
    summary = {"cells": int(grid.values.size), "failed": n_failed}
    write_metadata(out / cfg.metadata_json, cfg, "sweep", summary, seed=args.seed)
    for idx, msg in grid.messages.items():
        print(f"cell {idx}: {msg}", file=sys.stderr)
    print(f"{grid.values.size} cells, {n_failed} failed -> {out / cfg.sweep_csv}")
    return EXIT_PARTIAL if n_failed else EXIT_OK


def cmd_dielectric_info(args):
    cfg = parse_config(args.config)
    table = load_dielectric(cfg.table_path)
    omega = cfg.params.drive.omega
    eps_b = cfg.params.eps_b
    lo, hi = table.energy_range
    eps = permittivity(table, omega)
    gamma = gamma_factor(eps, eps_b)
    e_peak, g_peak = peak_response(table, eps_b)
    print(f"table        {table.source_label} ({len(table)} rows)")
    print(f"range        {lo:.4f} .. {hi:.4f} eV")
    print(f"omega        {omega:.6f} eV")
    print(f"eps_M        {eps.real:.6f} {eps.imag:+.6f}i")
    print(f"gamma        {gamma.real:.6f} {gamma.imag:+.6f}i  |gamma| = {abs(gamma):.6f}")
    print(f"max |gamma|  {abs(g_peak):.6f} at {e_peak:.4f} eV")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sqdmnp",
        description="Entanglement dynamics of two quantum dots coupled through a metal nanoparticle.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log integrator diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, outputs=True):
        p.add_argument("--config", required=True, help="TOML config or metadata.json of a previous run")
        if outputs:
            p.add_argument("--out", help="output directory (overrides output.dir)")
            p.add_argument("--workers", type=int, help="parallel sweep workers")
            p.add_argument("--seed", type=int, help="reserved; the dynamics is deterministic")

    common(sub.add_parser("trajectory", help="integrate one trajectory and write its CSV"))
    common(sub.add_parser("sweep", help="evaluate max/final EoF on a parameter grid"))
    common(sub.add_parser("dielectric-info", help="report the MNP permittivity and response"), outputs=False)
    return parser


COMMANDS = {
    "trajectory": cmd_trajectory,
    "sweep": cmd_sweep,
    "dielectric-info": cmd_dielectric_info,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (SqdMnpError, SweepError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
