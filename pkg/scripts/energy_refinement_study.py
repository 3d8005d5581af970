#!/usr/bin/env python3
"""Run the no-forcing decay scenario at the base grid and at half the
spacing, print the worst energy-inequality residual per run and their ratio."""

import argparse
import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

import numpy as np

from barolab import (EnergyRecord, energy_inequality_residual, run_scenario,
                     scenario_from_dict)


def residuals_from_csv(path: str):
    data = np.genfromtxt(path, delimiter=",", names=True)
    recs = [
        EnergyRecord(time=float(t), kinetic=float(k), potential=float(p),
                     dissipation=float(d), power=float(w))
        for t, k, p, d, w in zip(data["t"], data["kinetic"],
                                 data["potential"], data["dissipation"],
                                 data["power"])
    ]
    return energy_inequality_residual(recs)


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="runs/energy_refinement")
    parser.add_argument("--scenario", default=os.path.join(
        os.path.dirname(__file__), os.pardir, "scenarios", "decay1d.json"))
    args = parser.parse_args()

    with open(args.scenario) as fh:
        doc = json.load(fh)
    base_dir = os.path.dirname(os.path.abspath(args.scenario))

    maxima = []
    for label, factor in (("coarse", 1), ("fine", 2)):
        refined = json.loads(json.dumps(doc))
        refined["grid"]["cells"] = [factor * c for c in doc["grid"]["cells"]]
        refined["sample_interval"] = doc["sample_interval"] / factor
        record = run_scenario(scenario_from_dict(refined, base_dir=base_dir),
                              out_dir=os.path.join(args.out, label))
        res, worst = residuals_from_csv(record.csv_path)
        maxima.append(float(np.max(np.abs(res))))
        print(f"{label:6s} cells={refined['grid']['cells']}  "
              f"signed max residual={worst:+.3e}  max|res|={maxima[-1]:.3e}")
    print(f"refinement ratio max|res|: {maxima[1] / maxima[0]:.3f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
