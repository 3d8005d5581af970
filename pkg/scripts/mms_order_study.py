#!/usr/bin/env python3
"""Manufactured-solution convergence study: decaying smooth density and
velocity with sympy-derived source terms; prints L2 errors and fitted orders."""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

import numpy as np
import sympy

from barolab import (FluidParams, Isentropic, ScalarField, SchemeConfig,
                     State, VectorField, Viscosity, lp_distance, make_grid,
                     simulate)


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--grids", type=int, nargs="+",
                        default=[100, 200, 400, 800])
    parser.add_argument("--t-end", type=float, default=0.4)
    args = parser.parse_args()

    a_val, mu_val = 1.0, 0.02
    xs, ts = sympy.symbols("x t")
    rho_sym = 1 + sympy.Rational(1, 10) * sympy.cos(2 * sympy.pi * xs) \
        * sympy.exp(-ts)
    u_sym = sympy.Rational(1, 20) * sympy.sin(2 * sympy.pi * xs) \
        * sympy.exp(-ts)
    q_sym = rho_sym * u_sym
    src_rho_sym = sympy.diff(rho_sym, ts) + sympy.diff(q_sym, xs)
    src_q_sym = (sympy.diff(q_sym, ts) + sympy.diff(q_sym * u_sym, xs)
                 + sympy.diff(a_val * rho_sym ** 2, xs)
                 - 2.0 * mu_val * sympy.diff(u_sym, xs, 2))
    f_rho = sympy.lambdify((xs, ts), rho_sym, "numpy")
    f_q = sympy.lambdify((xs, ts), q_sym, "numpy")
    f_src_rho = sympy.lambdify((xs, ts), src_rho_sym, "numpy")
    f_src_q = sympy.lambdify((xs, ts), src_q_sym, "numpy")

    params = FluidParams(law=Isentropic(a=a_val, gamma=2.0),
                         visc=Viscosity(mu=mu_val, lam=0.0))
    scheme = SchemeConfig(cfl=0.4)

    err_rho, err_q = [], []
    for cells in args.grids:
        grid = make_grid(1, (1.0,), (cells,))
        (xc,) = grid.centers()
        state = State(
            rho=ScalarField.from_function(grid, lambda x: f_rho(x, 0.0)),
            mom=VectorField.from_functions(grid, [lambda x: f_q(x, 0.0)]),
            time=0.0)

        def source(tt, xc=xc):
            return f_src_rho(xc, tt), f_src_q(xc, tt)[np.newaxis, :]

        final = simulate(state, params, None, scheme, args.t_end,
                         source=source)
        exact_rho = ScalarField.from_function(
            grid, lambda x: f_rho(x, args.t_end))
        exact_mom = VectorField.from_functions(
            grid, [lambda x: f_q(x, args.t_end)])
        err_rho.append(lp_distance(final.rho, exact_rho, 2.0))
        err_q.append(lp_distance(final.mom, exact_mom, 2.0))
        print(f"cells={cells:4d}  e_rho={err_rho[-1]:.3e}  "
              f"e_q={err_q[-1]:.3e}")

    log_dx = np.log2([1.0 / n for n in args.grids])
    slope_rho = float(np.polyfit(log_dx, np.log2(err_rho), 1)[0])
    slope_q = float(np.polyfit(log_dx, np.log2(err_q), 1)[0])
    print(f"fitted L2 orders: density {slope_rho:.3f}, momentum {slope_q:.3f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
