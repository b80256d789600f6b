#!/usr/bin/env python3
"""Numerical convergence studies for the transform ODE solver.

Two experiments:

1. step halving -- solve the unit-ray pure-jump model at a ladder of step
   sizes against a fine reference and report the observed order (the
   integrator is fourth order, so error ratios should approach 16);

2. resolvent approximation -- replace the dense first-order transport
   generator with its bounded resolvent regularisation at increasing
   resolvent parameter n and report the sup-norm discrepancy of the curve
   and matrix solution components over [0, 1], which should shrink
   monotonically.
"""

import argparse
import sys

import numpy as np

from affinesv.params import (
    AdmissibleParams,
    NoiseSpec,
    zero_operator,
)
from affinesv.jumpmeasure import JumpMeasureSpec
from affinesv.riccati import RiccatiInput, solve_riccati
from affinesv.semigroup import GeneratorSpec, upwind_matrix, yosida
from affinesv.presets import preset
from affinesv.serialize import scenario_from_dict
from affinesv.symcone import HVector, PsdMatrix


def step_halving(dts, ref_dt):
    scn = scenario_from_dict(preset("yule"))
    u2 = PsdMatrix(np.array([[4.0, 0.0], [0.0, 0.0]]))

    def solve(dt):
        sol = solve_riccati(
            RiccatiInput(params=scn.params, noise=scn.noise, gen=scn.gen,
                         v1=HVector(np.zeros(2)), u2=u2, horizon=1.0, dt=dt)
        )
        return sol.phi[-1] + sol.psi2[-1, 0, 0]

    ref = solve(ref_dt)
    print(f"reference dt = {ref_dt:g}")
    print(f"{'dt':>10s} {'error':>12s} {'ratio':>8s} {'order':>6s}")
    prev = None
    for dt in dts:
        err = abs(solve(dt) - ref)
        if prev is None:
            print(f"{dt:10.4f} {err:12.3e} {'-':>8s} {'-':>6s}")
        else:
            ratio = prev / err
            print(f"{dt:10.4f} {err:12.3e} {ratio:8.2f} {np.log2(ratio):6.2f}")
        prev = err


def resolvent_sweep(ns, dim, dt):
    grid = np.linspace(0.0, 30.0, dim)
    base = GeneratorSpec(kind="shift_grid", dim=dim, maturities=grid)
    exact = GeneratorSpec(kind="dense", dim=dim, matrix=upwind_matrix(grid))
    params = AdmissibleParams(
        dim=dim,
        b=PsdMatrix(np.zeros((dim, dim))),
        B=zero_operator(dim),
        jumps=JumpMeasureSpec(dim=dim, m_atoms=(), mu_atoms=()),
    )
    noise = NoiseSpec(mode="D", matrix=PsdMatrix(np.eye(dim)))
    v1 = HVector(0.2 * np.exp(-grid / 4.0))
    u2 = PsdMatrix(np.zeros((dim, dim)))

    def solve(gen):
        return solve_riccati(
            RiccatiInput(params=params, noise=noise, gen=gen, v1=v1, u2=u2,
                         horizon=1.0, dt=dt)
        )

    ref = solve(exact)
    print(f"\ntransport generator on a {dim}-node maturity grid, dt = {dt:g}")
    print(f"{'n':>6s} {'sup |d psi1|':>14s} {'sup |d psi2|':>14s}")
    for n in ns:
        sol = solve(yosida(base, n))
        e1 = float(np.abs(sol.psi1 - ref.psi1).max())
        e2 = float(np.abs(sol.psi2 - ref.psi2).max())
        print(f"{n:6d} {e1:14.3e} {e2:14.3e}")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--ref-dt", type=float, default=1e-4)
    p.add_argument("--dim", type=int, default=16,
                   help="maturity-grid size for the resolvent sweep")
    p.add_argument("--dt", type=float, default=2e-3,
                   help="solver step for the resolvent sweep")
    args = p.parse_args(argv)

    step_halving((0.25, 0.125, 0.0625, 0.03125), args.ref_dt)
    resolvent_sweep((4, 8, 16, 32, 64, 128), args.dim, args.dt)
    return 0


if __name__ == "__main__":
    sys.exit(main())
