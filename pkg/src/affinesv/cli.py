"""Command-line front end.

Subcommands map one-to-one onto package capabilities:

  validate  -- run the admissibility / noise-equivalence / cone-driver checks
  riccati   -- solve the transform system for each query and dump tables
  simulate  -- run the path engine and dump path tables plus summary stats
  verify    -- validate, solve, simulate, and compare the two transform
               routes query by query (plus first-moment checks)
  example   -- materialize a shipped scenario to a JSON file

Exit codes: 0 pass, 1 computation or comparison failure, 2 usage/config
errors. Reports are deterministic: same config and seed give byte-identical
files. The CONFIG argument accepts either a path to a scenario JSON or the
name of a shipped scenario.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .params import (
    check_assumption_C,
    validate_assumption_A,
    validate_subordinator,
    verify_adjoint,
)
from .presets import PRESET_NAMES, preset
from .riccati import (
    RiccatiInput,
    RiccatiStepError,
    bns_closed_form,
    solve_riccati,
)
from .serialize import (
    Scenario,
    batch_summary,
    dump_report,
    load_scenario,
    paths_csv,
    riccati_csv,
    scenario_from_dict,
)
from .simulate import (
    MajorantOverflowError,
    SimConfig,
    moment_check_X,
    simulate_paths,
)
from .transform import compare, mc_transform, affine_value

CLOSED_FORM_TOL = 1e-8
CONE_FLOOR = -1e-8


def _resolve_scenario(arg: str) -> Scenario:
    if arg in PRESET_NAMES:
        return scenario_from_dict(preset(arg))
    return load_scenario(arg)


def _apply_overrides(scn: Scenario, args) -> Scenario:
    from dataclasses import replace

    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "paths", None) is not None:
        changes["n_paths"] = args.paths
    return replace(scn, **changes) if changes else scn


def _validation_suite(scn: Scenario) -> dict:
    rep_a = validate_assumption_A(scn.params)
    probes = [scn.x0.mat, 2.0 * scn.x0.mat]
    for a in scn.params.jumps.m_atoms:
        probes.append(scn.x0.mat + a.xi.mat)
    for a in scn.params.jumps.mu_atoms:
        probes.append(scn.x0.mat + a.xi.mat)
    rep_c = check_assumption_C(scn.noise, probes)
    out = {
        "admissibility": rep_a.to_dict(),
        "noise_equivalence": rep_c.to_dict(),
        "adjoint_defect": verify_adjoint(scn.params.B),
        "ok": rep_a.ok and rep_c.ok,
        "warnings": rep_a.warnings + rep_c.warnings,
    }
    if not scn.params.jumps.mu_atoms:
        rep_s = validate_subordinator(scn.params.b, scn.params.jumps.m_atoms)
        out["cone_driver"] = rep_s.to_dict()
        out["ok"] = out["ok"] and rep_s.ok
    return out


def _riccati_input(scn: Scenario, query, horizon: float, dt: float) -> RiccatiInput:
    return RiccatiInput(
        params=scn.params,
        noise=scn.noise,
        gen=scn.gen,
        v1=query.v1,
        u2=query.u2,
        horizon=horizon,
        dt=dt,
    )


def _out_path(args, filename: str) -> str:
    out_dir = args.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, filename)


def cmd_validate(args) -> int:
    scn = _resolve_scenario(args.config)
    suite = _validation_suite(scn)
    path = _out_path(args, f"{scn.name}.validate.json")
    with open(path, "w") as fh:
        fh.write(dump_report(suite))
    status = "pass" if suite["ok"] else "FAIL"
    print(f"validate {scn.name}: {status} (report: {path})")
    for w in suite["warnings"]:
        print(f"  warning: {w}")
    return 0 if suite["ok"] else 1


def cmd_riccati(args) -> int:
    scn = _apply_overrides(_resolve_scenario(args.config), args)
    dt = args.dt if args.dt is not None else scn.riccati_dt
    for i, q in enumerate(scn.queries):
        sol = solve_riccati(_riccati_input(scn, q, q.t, dt))
        val = affine_value(sol, scn.x0, scn.y0, q)
        print(
            f"query {i}: t={q.t:g} value={val.real:.10f}{val.imag:+.10f}i "
            f"phi={sol.phi[-1]:.6g}"
        )
        if args.format == "csv":
            path = _out_path(args, f"{scn.name}-q{i}.riccati.csv")
            with open(path, "w") as fh:
                fh.write(riccati_csv(sol))
        else:
            path = _out_path(args, f"{scn.name}-q{i}.riccati.json")
            payload = {
                "grid": sol.grid,
                "phi": sol.phi,
                "psi1": sol.psi1,
                "psi2": sol.psi2,
                "value": val,
            }
            with open(path, "w") as fh:
                fh.write(dump_report(payload))
        print(f"  wrote {path}")
    return 0


def _sim_config(scn: Scenario, dt: float, record_times) -> SimConfig:
    return SimConfig(
        params=scn.params,
        noise=scn.noise,
        gen=scn.gen,
        x0=scn.x0,
        y0=scn.y0,
        horizon=scn.horizon,
        dt=dt,
        n_paths=scn.n_paths,
        seed=scn.seed,
        record_times=record_times,
    )


def cmd_simulate(args) -> int:
    scn = _apply_overrides(_resolve_scenario(args.config), args)
    dt = args.dt if args.dt is not None else scn.sim_dt
    cfg = _sim_config(scn, dt, None)
    batch = simulate_paths(cfg)
    summary = batch_summary(batch)
    spath = _out_path(args, f"{scn.name}-{scn.seed}.summary.json")
    with open(spath, "w") as fh:
        fh.write(dump_report(summary))
    print(
        f"simulate {scn.name}: {cfg.n_paths} paths, "
        f"{summary['jumps_total']} jumps, min_eig_floor={batch.min_eig_floor:.3e}"
    )
    if args.format == "csv":
        ppath = _out_path(args, f"{scn.name}-{scn.seed}.paths.csv")
        with open(ppath, "w") as fh:
            fh.write(paths_csv(batch))
        print(f"  wrote {ppath}")
    print(f"  wrote {spath}")
    return 0


def cmd_verify(args) -> int:
    scn = _apply_overrides(_resolve_scenario(args.config), args)
    riccati_dt = args.dt if args.dt is not None else scn.riccati_dt

    suite = _validation_suite(scn)
    report = {
        "scenario": scn.name,
        "seed": scn.seed,
        "n_paths": scn.n_paths,
        "riccati_dt": riccati_dt,
        "sim_dt": scn.sim_dt,
        "validation": suite,
    }
    if not suite["ok"]:
        path = _out_path(args, f"{scn.name}-{scn.seed}.report.json")
        with open(path, "w") as fh:
            fh.write(dump_report({**report, "pass": False}))
        print(f"verify {scn.name}: validation FAILED (report: {path})")
        return 1

    record = tuple(sorted({q.t for q in scn.queries} | {scn.horizon}))
    cfg = _sim_config(scn, scn.sim_dt, record)
    batch = simulate_paths(cfg)

    all_ok = True
    q_reports = []
    psi2_floor = 0.0
    for i, q in enumerate(scn.queries):
        sol = solve_riccati(_riccati_input(scn, q, q.t, riccati_dt))
        psi2_floor = min(psi2_floor, float(np.linalg.eigvalsh(sol.psi2).min()))
        val = affine_value(sol, scn.x0, scn.y0, q)
        mc = mc_transform(batch, q)
        cmp_rep = compare(val, mc, z_max=args.z_max)
        entry = {
            "t": q.t,
            "v1": q.v1.vec,
            "u2": q.u2.mat,
            "affine": val,
            "mc": {"estimate": mc.estimate, "stderr": mc.stderr, "n": mc.n_paths},
            "z_re": cmp_rep.z_re,
            "z_im": cmp_rep.z_im,
            "pass": cmp_rep.ok,
        }
        if not scn.params.jumps.mu_atoms and q.u2.norm == 0.0:
            closed = bns_closed_form(
                scn.params, scn.gen, scn.noise, scn.x0, scn.y0, q.v1, q.t
            )
            diff = abs(closed - val)
            entry["closed_form"] = {
                "value": closed,
                "abs_diff": diff,
                "pass": diff <= CLOSED_FORM_TOL,
            }
            all_ok = all_ok and entry["closed_form"]["pass"]
        all_ok = all_ok and cmp_rep.ok
        q_reports.append(entry)
        tag = "pass" if entry["pass"] else "FAIL"
        print(
            f"query {i} (t={q.t:g}): affine={val.real:+.6f}{val.imag:+.6f}i "
            f"mc={mc.estimate.real:+.6f}{mc.estimate.imag:+.6f}i "
            f"z=({cmp_rep.z_re:+.2f},{cmp_rep.z_im:+.2f}) {tag}"
        )

    m_reports = []
    for m_dir in scn.moment_dirs:
        mrep = moment_check_X(cfg, m_dir, batch=batch)
        m_reports.append(
            {
                "dir": m_dir,
                "ode_mean": mrep.ode_mean,
                "mc_mean": mrep.mc_mean,
                "stderr": mrep.stderr,
                "z": mrep.z,
                "pass": mrep.ok,
            }
        )
        all_ok = all_ok and mrep.ok
        tag = "pass" if mrep.ok else "FAIL"
        print(
            f"moment <X_T, u>: ode={mrep.ode_mean:.6f} mc={mrep.mc_mean:.6f} "
            f"z={mrep.z:+.2f} {tag}"
        )

    cone = {
        "riccati_psi2_min_eig": psi2_floor,
        "paths_min_eig": batch.min_eig_floor,
        "pass": psi2_floor >= CONE_FLOOR and batch.min_eig_floor >= CONE_FLOOR,
    }
    all_ok = all_ok and cone["pass"]

    report.update(
        {"queries": q_reports, "moments": m_reports, "cone": cone, "pass": all_ok}
    )
    path = _out_path(args, f"{scn.name}-{scn.seed}.report.json")
    with open(path, "w") as fh:
        fh.write(dump_report(report))
    print(f"verify {scn.name}: {'pass' if all_ok else 'FAIL'} (report: {path})")
    return 0 if all_ok else 1


def cmd_example(args) -> int:
    obj = preset(args.name)  # KeyError -> exit 2 via main
    path = _out_path(args, f"{args.name}.json")
    with open(path, "w") as fh:
        fh.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override scenario seed")
    common.add_argument(
        "--paths", type=int, default=None, help="override scenario path count"
    )
    common.add_argument(
        "--dt",
        type=float,
        default=None,
        help="override step (transform solver for riccati/verify, path grid for simulate)",
    )
    common.add_argument("--out-dir", default=None, help="output directory (default: .)")
    common.add_argument(
        "--format", choices=("json", "csv"), default="json", help="table output format"
    )
    common.add_argument(
        "--z-max",
        type=float,
        default=3.0,
        help="comparison threshold in standard errors",
    )

    parser = argparse.ArgumentParser(
        prog="affinesv",
        description="Affine volatility on the PSD cone: transforms, paths, verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="run parameter validators")
    p.add_argument("config", help="scenario JSON path or shipped scenario name")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("riccati", parents=[common], help="solve the transform system")
    p.add_argument("config")
    p.set_defaults(func=cmd_riccati)

    p = sub.add_parser("simulate", parents=[common], help="run the path engine")
    p.add_argument("config")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "verify", parents=[common], help="compare analytic and Monte Carlo transforms"
    )
    p.add_argument("config")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("example", parents=[common], help="write a shipped scenario")
    p.add_argument("name", help=f"one of: {', '.join(PRESET_NAMES)}")
    p.set_defaults(func=cmd_example)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (RiccatiStepError, MajorantOverflowError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
