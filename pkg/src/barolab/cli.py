"""Command-line front end: run scenarios, solve static profiles, execute
behaviour probes, validate configs, and check pressure-law growth bounds.

Exit codes: 0 success / probe pass, 1 probe or law-check fail (and solver
blow-ups), 2 configuration errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .constitutive import check_growth_bounds, load_tabulated_csv
from .core import make_grid
from .harness import (build_initial_state, run_probe_from_config,
                      run_scenario, scenario_from_file)
from .solver import SolverError
from .statics import make_potential, solve_static, static_residual


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="barolab",
        description="Desk-scale laboratory for viscous barotropic flow",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a scenario and persist its series")
    p.add_argument("scenario", help="scenario JSON path")
    p.add_argument("--out", help="output directory override")

    p = sub.add_parser("static", help="solve a hydrostatic profile")
    p.add_argument("config", help="static config JSON path")
    p.add_argument("--out", help="output directory override")

    p = sub.add_parser("probe", help="run a behaviour probe")
    p.add_argument("name", help="probe name")
    p.add_argument("config", help="scenario JSON with a 'probes' section")
    p.add_argument("--out", help="output directory override")

    p = sub.add_parser("validate", help="check a scenario without running it")
    p.add_argument("scenario", help="scenario JSON path")

    p = sub.add_parser("laws", help="pressure-law utilities")
    laws_sub = p.add_subparsers(dest="laws_command", required=True)
    c = laws_sub.add_parser("check", help="check growth bounds of a law CSV")
    c.add_argument("csv", help="two-column rho,p CSV")
    c.add_argument("--a", type=float, required=True, help="upper growth factor")
    c.add_argument("--b", type=float, required=True, help="additive slack")
    c.add_argument("--gamma", type=float, required=True, help="exponent")
    c.add_argument("--rho-min", type=float, default=None)
    c.add_argument("--rho-max", type=float, default=None)
    c.add_argument("--samples", type=int, default=1000)
    c.add_argument("--monotone", action="store_true",
                   help="use shape-preserving interpolation")
    c.add_argument("--out", help="directory for the JSON report")
    return parser


def _cmd_run(args) -> int:
    scn = scenario_from_file(args.scenario)
    record = run_scenario(scn, out_dir=args.out)
    print(
        f"{record.name}: {record.samples} samples, final E="
        f"{record.final_energy:.6g}, mass={record.final_mass:.12g}, "
        f"clamps={record.clamp_count}, wrote {record.csv_path}"
    )
    return 0


def _cmd_validate(args) -> int:
    scn = scenario_from_file(args.scenario)
    build_initial_state(scn)
    print(f"{scn.name}: valid")
    return 0


def _cmd_probe(args) -> int:
    with open(args.config) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            print(f"error: {args.config}: invalid JSON ({e})", file=sys.stderr)
            return 2
    base_dir = os.path.dirname(args.config) or "."
    report = run_probe_from_config(args.name, doc, base_dir=base_dir,
                                   out_dir=args.out)
    status = "PASS" if report.passed else "FAIL"
    print(f"probe {report.probe}: {status} ({report.runtime_s:.1f}s)")
    for w in report.warnings:
        print(f"warning: {w}")
    return 0 if report.passed else 1


def _cmd_static(args) -> int:
    with open(args.config) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            print(f"error: {args.config}: invalid JSON ({e})", file=sys.stderr)
            return 2
    gspec = doc["grid"]
    grid = make_grid(
        int(gspec.get("dim", len(gspec.get("cells", [])))),
        gspec["extents"], gspec["cells"], int(gspec.get("ghost", 1)),
    )
    pot = doc["potential"]
    if "csv" in pot:
        pot = dict(pot)
        pot["csv"] = os.path.join(os.path.dirname(args.config) or ".",
                                  pot["csv"])
    F = make_potential(grid, pot)
    a = float(doc["a"])
    gamma = float(doc["gamma"])
    sol = solve_static(F, float(doc["mass"]), a, gamma,
                       tol=float(doc.get("tol", 1e-10)))
    residual = static_residual(sol, F, a, gamma)

    out = args.out or doc.get("out_dir") or "runs/static"
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "static_solution.json"), "w") as fh:
        json.dump({
            "c": sol.c,
            "mass_error": sol.mass_error,
            "support_connected": sol.support_connected,
            "residual_l1": residual,
            "tool_version": __version__,
        }, fh, indent=2, sort_keys=True)
        fh.write("\n")

    coords = [c.ravel() for c in grid.centers()]
    rho = sol.rho_s.interior().ravel()
    header = ",".join([f"x{i}" for i in range(grid.dim)] + ["rho_s"])
    rows = [header]
    for j in range(rho.size):
        rows.append(",".join(
            [repr(float(coords[i][j])) for i in range(grid.dim)]
            + [repr(float(rho[j]))]
        ))
    with open(os.path.join(out, "static_profile.csv"), "w") as fh:
        fh.write("\n".join(rows) + "\n")

    print(
        f"static: c={sol.c:.12g}, mass_error={sol.mass_error:.3g}, "
        f"connected={sol.support_connected}, residual={residual:.3g}"
    )
    return 0


def _cmd_laws_check(args) -> int:
    law = load_tabulated_csv(args.csv, monotone=args.monotone)
    nodes = np.asarray(law.rho_nodes, dtype=float)
    rho_min = args.rho_min if args.rho_min is not None else float(nodes[1])
    rho_max = args.rho_max if args.rho_max is not None else float(nodes[-1])
    report = check_growth_bounds(law, args.a, args.b, args.gamma,
                                 (rho_min, rho_max), samples=args.samples)
    verdict = "PASS" if report.passed else "FAIL"
    print(
        f"growth bounds on [{report.rho_min:g}, {report.rho_max:g}] with "
        f"a={report.a:g}, b={report.b:g}, gamma={report.gamma:g}: {verdict} "
        f"(worst margin {report.worst_margin:.3g})"
    )
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "growth_report.json"), "w") as fh:
            json.dump({
                "a": report.a, "b": report.b, "gamma": report.gamma,
                "rho_min": report.rho_min, "rho_max": report.rho_max,
                "samples": report.samples,
                "worst_margin": report.worst_margin,
                "pass": report.passed,
                "tool_version": __version__,
            }, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0 if report.passed else 1


def cli(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "probe":
            return _cmd_probe(args)
        if args.command == "static":
            return _cmd_static(args)
        if args.command == "laws":
            return _cmd_laws_check(args)
        print(f"error: unknown command {args.command!r}", file=sys.stderr)
        return 2
    except SolverError as e:
        print(f"solver failure: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except KeyError as e:
        print(f"error: missing config key {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
