"""Shared test helpers: repo paths and small prebuilt grids/states.

Lives outside conftest.py so test modules can import it by a name that stays
unique when other test trees sit on sys.path.
"""

from __future__ import annotations

import json
import pathlib

import numpy as np

from barolab import ScalarField, State, VectorField, make_grid

REPO = pathlib.Path(__file__).resolve().parents[1]
SCENARIOS = REPO / "scenarios"


def load_scenario_doc(name: str) -> dict:
    with open(SCENARIOS / f"{name}.json") as fh:
        return json.load(fh)


def smooth_state_1d(cells: int, rho_fn, u_fn):
    """State with rho = rho_fn(x), momentum = rho * u_fn(x)."""
    grid = make_grid(1, (1.0,), (cells,))
    rho = ScalarField.from_function(grid, rho_fn)
    mom = VectorField.from_functions(
        grid, [lambda x: rho_fn(x) * u_fn(x)])
    return State(rho=rho, mom=mom, time=0.0)


def rng_for(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
