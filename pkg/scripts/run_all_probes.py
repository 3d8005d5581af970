#!/usr/bin/env python3
"""Run the four behaviour probes from the frozen scenario files and print a
one-line verdict each; outputs land under --out for later plotting."""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

import json

from barolab import run_probe_from_config

PROBE_SCENARIOS = [
    ("steady_convergence", "steady1d.json"),
    ("dissipativity", "dissipativity1d.json"),
    ("periodic", "periodic1d.json"),
    ("shift_compactness", "shift1d.json"),
]


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="runs")
    parser.add_argument("--scenarios", default=os.path.join(
        os.path.dirname(__file__), os.pardir, "scenarios"))
    args = parser.parse_args()

    failures = 0
    for probe, fname in PROBE_SCENARIOS:
        with open(os.path.join(args.scenarios, fname)) as fh:
            doc = json.load(fh)
        out_dir = os.path.join(args.out, probe)
        report = run_probe_from_config(probe, doc, base_dir=args.scenarios,
                                       out_dir=out_dir)
        verdict = "PASS" if report.passed else "FAIL"
        print(f"{probe:20s} {verdict}  ({report.runtime_s:.1f}s, {out_dir})")
        failures += 0 if report.passed else 1
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
