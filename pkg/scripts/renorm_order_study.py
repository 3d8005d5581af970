#!/usr/bin/env python3
"""One-step grid study of the renormalized-continuity residual for a density
crossing the truncation ramp at three levels; prints residuals and orders."""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

import numpy as np

from barolab import (FluidParams, Isentropic, RenormFunction, ScalarField,
                     SchemeConfig, State, VectorField, Viscosity, make_grid,
                     renorm_residual, stable_dt, step, total_mass)


def rho_fn(x):
    return 0.4 + 2.4 * (np.exp(-((x - 0.35) / 0.12) ** 2)
                        + np.exp(-((x - 0.7) / 0.1) ** 2))


def build(cells: int) -> State:
    grid = make_grid(1, (1.0,), (cells,))
    rho = ScalarField.from_function(grid, rho_fn)
    mom = VectorField.from_functions(
        grid, [lambda x: rho_fn(x) * 0.4 * np.sin(np.pi * x)])
    return State(rho=rho, mom=mom, time=0.0)


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--grids", type=int, nargs="+",
                        default=[100, 200, 400])
    args = parser.parse_args()

    law = Isentropic(a=1.0, gamma=2.0)
    params = FluidParams(law=law, visc=Viscosity(mu=0.05, lam=0.0))
    scheme = SchemeConfig(cfl=0.4, use_fast_kernel=False)
    rho_bar = total_mass(build(args.grids[0])) / 1.0

    for m_scale in (0.5, 1.0, 2.0):
        bfun = RenormFunction(M=m_scale * rho_bar)
        vals = []
        for cells in args.grids:
            before = build(cells)
            dt = stable_dt(before, params, scheme)
            after = step(before, params, None, scheme, dt)
            u = VectorField(
                before.grid,
                before.mom.values / np.maximum(before.rho.values, 1e-12))
            vals.append(renorm_residual(before, after, u, bfun, law))
        orders = [float(np.log2(vals[k] / vals[k + 1]))
                  for k in range(len(vals) - 1)]
        pretty = ", ".join(f"{v:.3e}" for v in vals)
        print(f"M = {m_scale:>3} * mean density: residuals [{pretty}]  "
              f"orders {[round(o, 3) for o in orders]}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
