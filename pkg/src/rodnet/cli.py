"""Command-line front end.

    rodnet <command> --config <path> [--out <dir>] [--strict] [--threads N] [--seed S]

The output directory is taken from --out, else from $RODNET_OUT, else from
the config file.
"""

import argparse
import os
import sys
import time
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, checks
from .config import COMMANDS, echo, load_config
from .energy import SURFACE_COLUMNS, energy_surface
from .equilibrium import BRANCH_COLUMNS, FAILED, MultiSwitchWarning, branch_rows, threshold_density
from .errors import ConfigError, DomainError, SolverFailure
from .output import atomic_write, render_svg, write_csv
from .phase_diagram import (CURVE_COLUMNS, DIAGRAM_COLUMNS, build_phase_diagram,
                            lam_for_densities, order_parameter_curve, stress_curve)

ENV_OUT = "RODNET_OUT"


def _meta(cfg, **extra):
    m = {"config": echo(cfg), "command": cfg.command}
    m.update(extra)
    return m


def _tag(a):
    return f"{a:g}"


def run_phase_diagram(cfg, out):
    d = build_phase_diagram(cfg.grid.spec, cfg.material.chi, cfg.material,
                            protocol=cfg.grid.protocol, settings=cfg.solver, threads=cfg.threads)
    meta = _meta(cfg, colors="nematic=red isotropic=blue failed=gray")
    write_csv(out / "phase_diagram.csv", DIAGRAM_COLUMNS, d.rows(), meta)
    atomic_write(out / "phase_diagram.svg", render_svg(d, meta))
    c = d.counts()
    return {"cells": d.labels.size, **c}, c[FAILED]


def _lam_from_rho(cfg):
    rho = np.linspace(cfg.sweep.rho_max, cfg.sweep.rho_min, cfg.sweep.n_points)
    return lam_for_densities(rho, cfg.material.rho0)


def run_op_curve(cfg, out):
    fam = order_parameter_curve(cfg.material.chi, cfg.sweep.aa_list, _lam_from_rho(cfg),
                                cfg.material, settings=cfg.solver, threads=cfg.threads)
    failed = 0
    for a, b in fam.items():
        write_csv(out / f"op_curve_Aa{_tag(a)}.csv", BRANCH_COLUMNS, branch_rows(b),
                  _meta(cfg, A_a=a, discontinuities=list(b.discontinuities)))
        failed += len(b.failures)
    atomic_write(out / "op_curve.svg", render_svg(fam, _meta(cfg),
                                                  title=f"s* vs rho, chi = {cfg.material.chi:g}"))
    n = sum(len(b.points) for b in fam.values())
    return {"cells": n, "branches": len(fam), "failed": failed}, failed


def run_stress_curve(cfg, out):
    lam = np.linspace(cfg.sweep.lam_min, cfg.sweep.lam_max, cfg.sweep.n_points)
    curves = {}
    failed = 0
    for a in cfg.sweep.aa_list:
        try:
            c = stress_curve(cfg.material.chi, a, lam, cfg.material, settings=cfg.solver)
        except SolverFailure as exc:
            print(f"A_a = {a:g}: {exc}", file=sys.stderr)
            failed += 1
            continue
        curves[a] = c
        write_csv(out / f"stress_Aa{_tag(a)}.csv", CURVE_COLUMNS, c.rows(),
                  _meta(cfg, A_a=a, normalization=c.meta["normalization"],
                        sign_changes=list(c.sign_changes)))
    if curves:
        atomic_write(out / "stress_curve.svg", render_svg(curves, _meta(cfg)))
    return {"cells": len(lam) * len(curves), "curves": len(curves), "failed": failed}, failed


def run_energy_surface(cfg, out):
    s = np.linspace(cfg.surface.s_min, cfg.surface.s_max, cfg.surface.n_s)
    rho = np.linspace(cfg.surface.rho_min, cfg.surface.rho_max, cfg.surface.n_rho)
    rows = energy_surface(cfg.material, s, rho)
    write_csv(out / "energy_surface.csv", SURFACE_COLUMNS, rows, _meta(cfg))
    return {"cells": len(rows), "failed": 0}, 0


def run_threshold(cfg, out):
    chis = cfg.sweep.chi_list or (cfg.material.chi,)
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MultiSwitchWarning)
        for chi in chis:
            for a in cfg.sweep.aa_list:
                r = threshold_density(a, chi, cfg.material, (cfg.sweep.rho_min, cfg.sweep.rho_max),
                                      protocol=cfg.sweep.protocol, settings=cfg.solver)
                rows.append((chi, a, r.found, r.rho if r.found else float("nan"),
                             r.exhausted or "", len(r.switches)))
    write_csv(out / "thresholds.csv", ("chi", "A_a", "found", "rho_threshold", "exhausted",
                                       "n_switches"), rows, _meta(cfg))
    return {"cells": len(rows), "found": sum(r[2] for r in rows), "failed": 0}, 0


def verification_report(cfg):
    """Run the randomized suites and the bulk-potential checks; (lines, all_passed)."""
    lines, ok = [], True
    for r in checks.matrix_inequality_suites(cfg.seed, cfg.verify.samples):
        ok &= r["passed"]
        lines.append(f"{'PASS' if r['passed'] else 'FAIL'} {r['name']}: "
                     f"{r['violations']} violations in {r['trials']} trials")
    r = checks.degeneracy_suite(cfg.seed, cfg.verify.paths, cfg.material.a0)
    ok &= r["passed"]
    lines.append(f"{'PASS' if r['passed'] else 'FAIL'} edge_degeneracy: {r['trials']} paths")
    wells = cfg.material.wells
    prog = checks.well_progression(wells)
    for row in prog:
        lines.append(f"INFO chi={row['chi']:g}: {row['kind']} (lower: {row['lower']})")
    kinds = [row["kind"] for row in prog]
    # double well first, then a single nematic well once the isotropic well is gone
    seen_single = False
    shape_ok = True
    for k in kinds:
        if k == "single-nematic":
            seen_single = True
        elif k != "double" or seen_single:
            shape_ok = False
    shape_ok &= "double" in kinds and seen_single
    ok &= shape_ok
    lines.append(f"{'PASS' if shape_ok else 'FAIL'} well progression double -> single nematic")
    dbl = [row for row in prog if row["kind"] == "double"]
    chi_l = None
    if len(dbl) >= 1 and any(r["lower"] == "isotropic" for r in dbl) and \
            any(r["lower"] == "nematic" for r in dbl):
        lo = max(r["chi"] for r in dbl if r["lower"] == "isotropic")
        hi = min(r["chi"] for r in dbl if r["lower"] == "nematic")
        chi_l = checks.depth_crossover(wells, lo, hi)
    ok &= chi_l is not None
    lines.append(f"{'PASS' if chi_l is not None else 'FAIL'} depth crossover chi_l = {chi_l}")
    sgl = [row["chi"] for row in prog if row["kind"] == "single-nematic"]
    if dbl and sgl:
        chi_t = checks.single_well_onset(wells, max(r["chi"] for r in dbl), min(sgl))
        lines.append(f"INFO single-well onset chi_t = {chi_t}")
    growth = all(all(checks.growth_is_monotone(chi, wells).values()) for chi in (0.5, 1000))
    ok &= growth
    lines.append(f"{'PASS' if growth else 'FAIL'} growth toward every singular edge")
    return lines, ok


def run_verify(cfg, out):
    lines, ok = verification_report(cfg)
    for ln in lines:
        print(ln)
    atomic_write(out / "verify.txt", "\n".join(lines) + "\n")
    return {"cells": len(lines), "failed": 0 if ok else 1}, 0 if ok else 1


HANDLERS = {
    "phase-diagram": run_phase_diagram,
    "op-curve": run_op_curve,
    "stress-curve": run_stress_curve,
    "energy-surface": run_energy_surface,
    "verify": run_verify,
    "threshold": run_threshold,
}


def run(cfg, out=None):
    """Execute a parsed config; returns the process exit status."""
    out = Path(out or os.environ.get(ENV_OUT) or cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory {out}: {exc}", file=sys.stderr)
        return 2
    if not os.access(out, os.W_OK):
        print(f"error: output directory {out} is not writable", file=sys.stderr)
        return 2
    t0 = time.perf_counter()
    summary, failed = HANDLERS[cfg.command](cfg, out)
    wall = time.perf_counter() - t0
    parts = " ".join(f"{k}={v}" for k, v in summary.items())
    print(f"{cfg.command}: {parts} wall={wall:.2f}s out={out}")
    if cfg.command == "verify":
        return 0 if failed == 0 else 1
    if failed and cfg.strict:
        return 1
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="rodnet", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="experiment config file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--strict", action="store_true", help="exit nonzero on any failed cell")
    p.add_argument("--threads", type=int, help="worker threads")
    p.add_argument("--seed", type=int, help="seed for randomized verification")
    p.add_argument("--version", action="version", version=f"rodnet {__version__}")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"error: {args.config}: {exc}", file=sys.stderr)
        return 2
    if cfg.command != args.command:
        cfg = replace(cfg, command=args.command)
    if args.threads is not None:
        if args.threads < 1:
            print("error: --threads must be >= 1", file=sys.stderr)
            return 2
        cfg = replace(cfg, threads=args.threads)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.strict:
        cfg = replace(cfg, strict=True)
    try:
        return run(cfg, args.out)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
