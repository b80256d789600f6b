#!/usr/bin/env python3
"""Run the full verification pipeline over every shipped scenario.

For each preset this validates the model assumptions, solves the transform
ODEs, simulates paths, and cross-checks the Monte Carlo transform and moment
estimates against the solver. One JSON report per scenario lands in the
output directory; the script prints a one-line verdict per scenario and
exits nonzero if any fails.
"""

import argparse
import json
import pathlib
import sys
import time

from affinesv.cli import main as cli_main
from affinesv.presets import PRESET_NAMES


def parse_args(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out-dir", default="reports", help="directory for reports")
    p.add_argument("--paths", type=int, default=None,
                   help="override Monte Carlo path count for every scenario")
    p.add_argument("--seed", type=int, default=None,
                   help="override the random seed for every scenario")
    p.add_argument("--z-max", type=float, default=3.0,
                   help="z-score gate for Monte Carlo vs solver comparisons")
    return p.parse_args(argv)


def run_one(name, args):
    cmd = ["verify", name, "--out-dir", args.out_dir, "--z-max", str(args.z_max)]
    if args.paths is not None:
        cmd += ["--paths", str(args.paths)]
    if args.seed is not None:
        cmd += ["--seed", str(args.seed)]
    t0 = time.perf_counter()
    code = cli_main(cmd)
    elapsed = time.perf_counter() - t0

    reports = sorted(pathlib.Path(args.out_dir).glob(f"{name}-*.report.json"))
    detail = ""
    if reports:
        obj = json.loads(reports[-1].read_text())
        zs = [max(abs(q["z_re"]), abs(q["z_im"])) for q in obj["queries"]]
        detail = (
            f"queries={len(obj['queries'])} max|z|={max(zs):.2f} "
            f"cone_floor={obj['cone']['paths_min_eig']:.2e}"
        )
    verdict = "ok" if code == 0 else "FAIL"
    print(f"{name:24s} {verdict:4s} {elapsed:6.1f}s  {detail}")
    return code


def main(argv=None):
    args = parse_args(argv)
    pathlib.Path(args.out_dir).mkdir(parents=True, exist_ok=True)
    print(f"writing reports to {args.out_dir}/")
    worst = 0
    for name in PRESET_NAMES:
        worst = max(worst, run_one(name, args))
    return worst


if __name__ == "__main__":
    sys.exit(main())
