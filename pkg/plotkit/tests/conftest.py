"""Fixtures: small real runs of the producing tool, so the readers are tested
against files written by the actual writers rather than hand-made copies."""

import json

import pytest
from barolab import run_probe_from_config, run_scenario, scenario_from_dict
from barolab.cli import cli as barolab_cli


def tiny_doc(**overrides) -> dict:
    doc = {
        "schema_version": 1,
        "name": "tiny",
        "grid": {"dim": 1, "extents": [1.0], "cells": [48]},
        "law": {"kind": "isentropic", "a": 1.0, "gamma": 2.0},
        "viscosity": {"mu": 0.05, "lam": 0.0},
        "initial": {"family": "sine", "rho_base": 1.0, "rho_amp": 0.1,
                    "rho_modes": [1], "u_amp": [0.2], "u_modes": [1]},
        "t_end": 0.2,
        "sample_interval": 0.05,
    }
    doc.update(overrides)
    return doc


@pytest.fixture(scope="session")
def outputs(tmp_path_factory) -> dict:
    root = tmp_path_factory.mktemp("producer")
    paths = {}

    run_dir = root / "run"
    record = run_scenario(
        scenario_from_dict(tiny_doc(snapshot_interval=0.1)),
        out_dir=str(run_dir))
    paths["series"] = record.csv_path
    paths["snapshots"] = record.snapshot_path

    rest_dir = root / "rest"
    rest = run_scenario(
        scenario_from_dict(tiny_doc(
            initial={"family": "uniform", "rho": 1.0})),
        out_dir=str(rest_dir))
    paths["rest_series"] = rest.csv_path

    periodic = tiny_doc(
        t_end=1.6, sample_interval=0.2,
        forcing={"kind": "time_periodic", "omega": 0.5,
                 "field": {"family": "sine", "amplitudes": [0.05],
                           "modes": [1]},
                 "envelope": {"kind": "sin"}},
        probes={"periodic": {"transient": 0.1, "periods": 2,
                             "rel_tol": 1.0, "slack": 1.0}})
    run_probe_from_config("periodic", periodic, out_dir=str(root / "periodic"))
    paths["periodic_residual"] = str(root / "periodic" /
                                     "periodic_residual.csv")

    shift = tiny_doc(
        t_end=0.4,
        probes={"shift_compactness": {"shift_times": [0.1, 0.2, 0.3],
                                      "window": 0.05, "win_samples": 5,
                                      "slack": 10.0, "decay_ratio": 1e6}})
    run_probe_from_config("shift_compactness", shift,
                          out_dir=str(root / "shift"))
    paths["shift_distances"] = str(root / "shift" / "shift_distances.csv")

    steady = tiny_doc(
        t_end=1.0, sample_interval=0.25,
        forcing={"kind": "gradient",
                 "potential": {"family": "cosine", "amplitude": 0.2,
                               "modes": [1]}},
        probes={"steady_convergence": {"decay_factor": 1e6,
                                       "q_tol_factor": 1e6}})
    run_probe_from_config("steady_convergence", steady,
                          out_dir=str(root / "steady"))
    paths["steady_convergence"] = str(root / "steady" /
                                      "steady_convergence.csv")

    static_cfg = root / "static.json"
    static_cfg.write_text(json.dumps({
        "grid": {"dim": 1, "extents": [1.0], "cells": [64]},
        "potential": {"family": "linear", "slopes": [-1.0]},
        "a": 1.0, "gamma": 2.0, "mass": 1.0,
    }))
    assert barolab_cli(["static", str(static_cfg),
                        "--out", str(root / "static")]) == 0
    paths["static_profile"] = str(root / "static" / "static_profile.csv")

    return paths
