"""Scenario configs, run persistence, and the four long-time behaviour probes.

A scenario is a JSON document (schema version 1) naming a grid, an initial
data family, fluid parameters, optional forcing, scheme knobs, and cadences.
Runs write a CSV time series (`t,kinetic,potential,E,dissipation,power,mass,
clamps`) plus optional JSONL snapshots; probes add their own series CSV and a
JSON report.  Every probe's pass flag is recomputable from the persisted
CSV files plus the thresholds echoed in the report.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .constitutive import (FluidParams, Isentropic, Viscosity,
                           load_tabulated_csv)
from .core import (Grid, InitialData, ScalarField, State, VectorField,
                   make_grid, total_mass, validate_initial_data)
from .diagnostics import (EnergyRecord, dissipation_rate, lp_distance,
                          total_energy, weak_pairing)
from .solver import (ConfigError, ConstantForcing, Envelope, Forcing,
                     GradientForcing, SampleObserver, SchemeConfig,
                     SolverError, StepCounters, TimePeriodicForcing,
                     TimesObserver, forcing_power, simulate)
from .statics import check_level_sets, make_potential, solve_static

SCHEMA_VERSION = 1
CSV_HEADER = "t,kinetic,potential,E,dissipation,power,mass,clamps"

_trapezoid = getattr(np, "trapezoid", np.trapz)


@dataclass
class Scenario:
    """A fully resolved run configuration."""

    name: str
    grid: Grid
    initial_spec: dict
    params: FluidParams
    forcing: Optional[Forcing]
    scheme: SchemeConfig
    t_end: float
    sample_interval: float
    snapshot_interval: Optional[float]
    out_dir: Optional[str]


@dataclass
class RunRecord:
    """In-memory summary of one persisted run."""

    name: str
    final_energy: float
    final_mass: float
    clamp_count: int
    wall_time_s: float
    samples: int
    csv_path: str
    snapshot_path: Optional[str]


@dataclass
class ProbeReport:
    probe: str
    passed: bool
    measurements: dict
    thresholds: dict
    runtime_s: float
    tool_version: str = __version__
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "probe": self.probe,
            "pass": self.passed,
            "measurements": self.measurements,
            "thresholds": self.thresholds,
            "runtime_s": self.runtime_s,
            "tool_version": self.tool_version,
            "warnings": self.warnings,
        }


def write_report(report: ProbeReport, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


# --- scenario construction ----------------------------------------------------

def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


#: keys accepted per initial-data family; unknown keys are config errors so a
#: misspelled knob cannot be silently ignored.
INITIAL_FAMILY_KEYS = {
    "uniform": {"family", "rho", "velocity"},
    "sine": {"family", "rho_base", "rho_amp", "rho_modes", "u_amp", "u_modes"},
    "two_bump": {"family", "rho_base", "bump_amp", "width", "centers",
                 "u_amp", "u_modes"},
    "random_smooth": {"family", "seed", "rho_base", "rho_amp", "u_amp",
                      "modes"},
}

_DOC_KEYS = {"schema_version", "name", "grid", "law", "viscosity", "initial",
             "forcing", "scheme", "t_end", "sample_interval",
             "snapshot_interval", "out_dir", "probes"}
_GRID_KEYS = {"dim", "extents", "cells", "ghost"}
_LAW_KEYS = {"kind", "a", "gamma", "csv", "monotone"}
_VISC_KEYS = {"mu", "lam"}
_SCHEME_KEYS = {"cfl", "vacuum_floor", "flux", "time_integrator",
                "use_fast_kernel"}
_FORCING_KEYS = {"kind", "field", "omega", "envelope", "potential"}
_ENVELOPE_KEYS = {"kind", "harmonic", "phase"}
_FIELD_KEYS = {"family", "vector", "amplitudes", "modes"}


def _check_keys(spec: dict, allowed: set, what: str) -> None:
    extra = sorted(set(spec) - allowed)
    _require(not extra,
             f"{what}: unknown key(s) {extra}; allowed: {sorted(allowed)}")


def scenario_from_dict(doc: dict, base_dir: str = ".") -> Scenario:
    _require(isinstance(doc, dict), "scenario document must be a JSON object")
    _require(doc.get("schema_version") == SCHEMA_VERSION,
             f"schema_version must be {SCHEMA_VERSION}, "
             f"got {doc.get('schema_version')!r}")
    name = doc.get("name")
    _require(isinstance(name, str) and name != "", "scenario needs a name")
    _check_keys(doc, _DOC_KEYS, f"[{name}]")

    gspec = doc.get("grid")
    _require(isinstance(gspec, dict), f"[{name}] grid section missing")
    _check_keys(gspec, _GRID_KEYS, f"[{name}] grid")
    grid = make_grid(
        int(gspec.get("dim", len(gspec.get("cells", [])))),
        gspec["extents"], gspec["cells"], int(gspec.get("ghost", 1)),
    )

    lspec = doc.get("law")
    _require(isinstance(lspec, dict), f"[{name}] law section missing")
    _check_keys(lspec, _LAW_KEYS, f"[{name}] law")
    kind = lspec.get("kind")
    if kind == "isentropic":
        law = Isentropic(a=float(lspec["a"]), gamma=float(lspec["gamma"]))
    elif kind == "tabulated":
        law = load_tabulated_csv(
            os.path.join(base_dir, lspec["csv"]),
            monotone=bool(lspec.get("monotone", False)),
        )
    else:
        raise ConfigError(f"[{name}] unknown pressure law kind {kind!r}")

    vspec = doc.get("viscosity")
    _require(isinstance(vspec, dict), f"[{name}] viscosity section missing")
    _check_keys(vspec, _VISC_KEYS, f"[{name}] viscosity")
    params = FluidParams(
        law=law, visc=Viscosity(mu=float(vspec["mu"]), lam=float(vspec["lam"]))
    )

    forcing = _forcing_from_spec(doc.get("forcing"), grid, name, base_dir)

    sspec = doc.get("scheme", {})
    _check_keys(sspec, _SCHEME_KEYS, f"[{name}] scheme")
    scheme = SchemeConfig(
        cfl=float(sspec.get("cfl", 0.4)),
        vacuum_floor=float(sspec.get("vacuum_floor", 1e-12)),
        flux=sspec.get("flux", "rusanov"),
        time_integrator=sspec.get("time_integrator", "ssp_rk2"),
        use_fast_kernel=bool(sspec.get("use_fast_kernel", True)),
    )

    t_end = float(doc.get("t_end", 0.0))
    _require(t_end > 0, f"[{name}] t_end must be positive")
    sample = float(doc.get("sample_interval", 0.0))
    _require(sample > 0, f"[{name}] sample_interval must be positive")
    snap = doc.get("snapshot_interval")
    if snap is not None:
        snap = float(snap)
        _require(snap > 0, f"[{name}] snapshot_interval must be positive")

    init = doc.get("initial")
    _require(isinstance(init, dict) and "family" in init,
             f"[{name}] initial section with a family is required")
    fam = init["family"]
    _require(fam in INITIAL_FAMILY_KEYS,
             f"[{name}] unknown initial family {fam!r}; "
             f"known: {sorted(INITIAL_FAMILY_KEYS)}")
    _check_keys(init, INITIAL_FAMILY_KEYS[fam], f"[{name}] initial ({fam})")

    return Scenario(
        name=name, grid=grid, initial_spec=init, params=params,
        forcing=forcing, scheme=scheme, t_end=t_end, sample_interval=sample,
        snapshot_interval=snap, out_dir=doc.get("out_dir"),
    )


def scenario_from_file(path: str) -> Scenario:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from e
    return scenario_from_dict(doc, base_dir=os.path.dirname(path) or ".")


def _vector_field_from_spec(grid: Grid, spec: dict, what: str) -> VectorField:
    _check_keys(spec, _FIELD_KEYS, what)
    family = spec.get("family")
    if family == "uniform":
        vec = spec.get("vector")
        _require(vec is not None and len(vec) == grid.dim,
                 f"{what}: uniform family needs a {grid.dim}-entry vector")
        values = np.zeros((grid.dim,) + grid.shape)
        for i, v in enumerate(vec):
            values[(i,) + grid.interior] = float(v)
        return VectorField(grid, values)
    if family == "sine":
        amps = spec.get("amplitudes")
        modes = spec.get("modes")
        _require(amps is not None and len(amps) == grid.dim,
                 f"{what}: sine family needs {grid.dim} amplitudes")
        _require(modes is not None and len(modes) == grid.dim,
                 f"{what}: sine family needs {grid.dim} modes")
        coords = grid.centers()
        shape = np.ones(tuple(grid.cells))
        for axis in range(grid.dim):
            shape = shape * np.sin(
                np.pi * int(modes[axis]) * coords[axis] / grid.extents[axis]
            )
        values = np.zeros((grid.dim,) + grid.shape)
        for i, amp in enumerate(amps):
            values[(i,) + grid.interior] = float(amp) * shape
        return VectorField(grid, values)
    raise ConfigError(f"{what}: unknown vector field family {family!r}")


def _forcing_from_spec(spec, grid: Grid, name: str,
                       base_dir: str) -> Optional[Forcing]:
    if spec is None:
        return None
    _require(isinstance(spec, dict), f"[{name}] forcing must be an object")
    _check_keys(spec, _FORCING_KEYS, f"[{name}] forcing")
    kind = spec.get("kind")
    if kind == "constant":
        return ConstantForcing(
            _vector_field_from_spec(grid, spec["field"], f"[{name}] forcing")
        )
    if kind == "time_periodic":
        env = spec.get("envelope", {})
        _check_keys(env, _ENVELOPE_KEYS, f"[{name}] forcing envelope")
        return TimePeriodicForcing(
            f0=_vector_field_from_spec(grid, spec["field"], f"[{name}] forcing"),
            omega=float(spec["omega"]),
            envelope=Envelope(
                kind=env.get("kind", "const"),
                harmonic=int(env.get("harmonic", 1)),
                phase=float(env.get("phase", 0.0)),
            ),
        )
    if kind == "gradient":
        pot = spec.get("potential")
        _require(isinstance(pot, dict),
                 f"[{name}] gradient forcing needs a potential spec")
        if "csv" in pot:
            pot = dict(pot)
            pot["csv"] = os.path.join(base_dir, pot["csv"])
        return GradientForcing(make_potential(grid, pot))
    raise ConfigError(f"[{name}] unknown forcing kind {kind!r}")


# --- initial data families ------------------------------------------------

def _mode_product(coords, grid: Grid, modes, half_wave: bool) -> np.ndarray:
    """Product over axes of sin(pi k x / L) (half_wave, vanishes at walls) or
    sin(2 pi k x / L) (full wave, zero mean)."""
    out = np.ones(tuple(grid.cells))
    factor = 1.0 if half_wave else 2.0
    for axis in range(grid.dim):
        k = int(modes[axis])
        if k:
            out = out * np.sin(
                factor * np.pi * k * coords[axis] / grid.extents[axis]
            )
    return out


def build_initial_state(scn: Scenario) -> State:
    """Sample the scenario's initial family and validate it."""
    grid = scn.grid
    spec = scn.initial_spec
    family = spec.get("family")
    coords = grid.centers()
    rho_in = None
    u_in = np.zeros((grid.dim,) + tuple(grid.cells))

    def sine_velocity():
        amps = spec.get("u_amp", [0.0] * grid.dim)
        if np.isscalar(amps):
            amps = [amps] * grid.dim
        modes = spec.get("u_modes", [1] * grid.dim)
        shape = _mode_product(coords, grid, modes, half_wave=True)
        for i, amp in enumerate(amps):
            u_in[i] = float(amp) * shape

    if family == "uniform":
        rho_in = np.full(tuple(grid.cells), float(spec.get("rho", 1.0)))
        vec = spec.get("velocity", [0.0] * grid.dim)
        _require(len(vec) == grid.dim,
                 f"[{scn.name}] uniform velocity needs {grid.dim} entries")
        for i, v in enumerate(vec):
            u_in[i] = float(v)
    elif family == "sine":
        base = float(spec.get("rho_base", 1.0))
        amp = float(spec.get("rho_amp", 0.0))
        modes = spec.get("rho_modes", [1] * grid.dim)
        rho_in = base + amp * _mode_product(coords, grid, modes, half_wave=False)
        sine_velocity()
    elif family == "two_bump":
        base = float(spec.get("rho_base", 0.5))
        amp = float(spec.get("bump_amp", 1.0))
        width = float(spec.get("width", 0.1))
        centers = spec.get("centers")
        _require(centers is not None and len(centers) == 2,
                 f"[{scn.name}] two_bump needs exactly 2 centers")
        rho_in = np.full(tuple(grid.cells), base)
        for ctr in centers:
            ctr_list = [ctr] if np.isscalar(ctr) else list(ctr)
            _require(len(ctr_list) == grid.dim,
                     f"[{scn.name}] bump center must have {grid.dim} entries")
            r2 = np.zeros(tuple(grid.cells))
            for axis in range(grid.dim):
                r2 = r2 + (coords[axis] - float(ctr_list[axis])) ** 2
            rho_in = rho_in + amp * np.exp(-r2 / width**2)
        sine_velocity()
    elif family == "random_smooth":
        seed = spec.get("seed")
        _require(seed is not None, f"[{scn.name}] random_smooth needs a seed")
        rng = np.random.default_rng(int(seed))
        base = float(spec.get("rho_base", 1.0))
        rho_amp = float(spec.get("rho_amp", 0.1))
        u_amp = float(spec.get("u_amp", 0.1))
        n_modes = int(spec.get("modes", 4))
        _require(n_modes >= 1, f"[{scn.name}] random_smooth needs modes >= 1")
        rho_pert = np.zeros(tuple(grid.cells))
        u_pert = np.zeros((grid.dim,) + tuple(grid.cells))
        for k in range(1, n_modes + 1):
            ck = rng.standard_normal() / k
            rho_pert += ck * _mode_product(
                coords, grid, [k] * grid.dim, half_wave=False)
            for i in range(grid.dim):
                dk = rng.standard_normal() / k
                u_pert[i] += dk * _mode_product(
                    coords, grid, [k] * grid.dim, half_wave=True)
        rho_scale = float(np.max(np.abs(rho_pert)))
        if rho_scale > 0:
            rho_pert *= rho_amp / rho_scale
        u_scale = float(np.max(np.abs(u_pert)))
        if u_scale > 0:
            u_pert *= u_amp / u_scale
        rho_in = base + rho_pert
        u_in += u_pert
    else:
        raise ConfigError(f"[{scn.name}] unknown initial family {family!r}")

    rho_values = np.zeros(grid.shape)
    rho_values[grid.interior] = rho_in
    q_values = np.zeros((grid.dim,) + grid.shape)
    q_values[(slice(None),) + grid.interior] = rho_in * u_in
    data = InitialData(
        rho_I=ScalarField(grid, rho_values), q_I=VectorField(grid, q_values)
    )
    return validate_initial_data(data, scn.scheme.vacuum_floor)


# --- run persistence --------------------------------------------------------

def _measure(state: State, scn: Scenario) -> tuple[EnergyRecord, float]:
    base = total_energy(state, scn.params.law, scn.scheme.vacuum_floor)
    rec = EnergyRecord(
        time=state.time, kinetic=base.kinetic, potential=base.potential,
        dissipation=dissipation_rate(
            state, scn.params.visc, scn.scheme.vacuum_floor),
        power=forcing_power(state, scn.forcing, scn.scheme.vacuum_floor),
    )
    return rec, total_mass(state)


def _snapshot_line(state: State) -> str:
    grid = state.grid
    return json.dumps({
        "t": state.time,
        "rho": state.rho.interior().tolist(),
        "mom": state.mom.interior().tolist(),
        "grid": {
            "dim": grid.dim,
            "extents": list(grid.extents),
            "cells": list(grid.cells),
            "ghost": grid.ghost,
        },
    }, separators=(",", ":"))


def _execute(scn: Scenario, out: str, csv_name: str = "series.csv",
             extra_observers=()) -> tuple[RunRecord, State, list[EnergyRecord]]:
    """Run a scenario, writing the standard CSV (and JSONL snapshots when
    configured); returns the summary, final state, and sampled records."""
    os.makedirs(out, exist_ok=True)
    state0 = build_initial_state(scn)
    counters = StepCounters()

    rows = [CSV_HEADER]
    recs: list[EnergyRecord] = []
    masses: list[float] = []

    def on_sample(state: State) -> None:
        rec, mass = _measure(state, scn)
        recs.append(rec)
        masses.append(mass)
        rows.append(",".join([
            repr(float(rec.time)), repr(float(rec.kinetic)),
            repr(float(rec.potential)), repr(float(rec.total)),
            repr(float(rec.dissipation)), repr(float(rec.power)),
            repr(float(mass)), str(counters.vacuum_clamps),
        ]))

    observers = [SampleObserver(scn.sample_interval, on_sample, t0=state0.time)]
    snap_lines: list[str] = []
    if scn.snapshot_interval is not None:
        observers.append(SampleObserver(
            scn.snapshot_interval, lambda s: snap_lines.append(_snapshot_line(s)),
            t0=state0.time,
        ))
    observers.extend(extra_observers)

    t_wall = time.perf_counter()
    try:
        final = simulate(state0, scn.params, scn.forcing, scn.scheme,
                         scn.t_end, observers, counters=counters)
    except SolverError as e:
        raise SolverError(f"scenario {scn.name!r}: {e}", time=e.time,
                          cell=e.cell, detail=e.detail) from e
    wall = time.perf_counter() - t_wall

    csv_path = os.path.join(out, csv_name)
    with open(csv_path, "w") as fh:
        fh.write("\n".join(rows) + "\n")
    snapshot_path = None
    if scn.snapshot_interval is not None:
        snapshot_path = os.path.join(out, "snapshots.jsonl")
        with open(snapshot_path, "w") as fh:
            fh.write("\n".join(snap_lines) + "\n")

    record = RunRecord(
        name=scn.name, final_energy=recs[-1].total if recs else math.nan,
        final_mass=masses[-1] if masses else math.nan,
        clamp_count=counters.vacuum_clamps, wall_time_s=wall,
        samples=len(recs), csv_path=csv_path, snapshot_path=snapshot_path,
    )
    return record, final, recs


def run_scenario(scn: Scenario, out_dir: Optional[str] = None) -> RunRecord:
    """Execute a scenario and persist its CSV series plus snapshots."""
    out = out_dir or scn.out_dir or os.path.join("runs", scn.name)
    record, _, _ = _execute(scn, out)
    with open(os.path.join(out, "run.json"), "w") as fh:
        json.dump({
            "name": record.name,
            "final_energy": record.final_energy,
            "final_mass": record.final_mass,
            "clamp_count": record.clamp_count,
            "wall_time_s": record.wall_time_s,
            "samples": record.samples,
            "tool_version": __version__,
        }, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return record


# --- probes -------------------------------------------------------------------

def _scaled_velocity_spec(spec: dict, factor: float, name: str) -> dict:
    out = dict(spec)
    if "u_amp" in out:
        amp = out["u_amp"]
        out["u_amp"] = (
            [float(a) * factor for a in amp] if not np.isscalar(amp)
            else float(amp) * factor
        )
        return out
    if "velocity" in out:
        out["velocity"] = [float(v) * factor for v in out["velocity"]]
        return out
    raise ConfigError(
        f"[{name}] initial family has no velocity amplitude to scale")


def probe_dissipativity(base: Scenario, energy_scales, margin: float = 0.2,
                        tail_fraction: float = 0.25,
                        out_dir: Optional[str] = None) -> ProbeReport:
    """Run the base scenario at several initial energy levels and check all
    trajectories end up trapped in a band built from the lowest-energy run.

    The band limit is (1 + margin) times the tail maximum of the lowest run's
    sampled energy; entry time per run is the first sample time after its
    last excursion above the limit.  Pass requires every run to settle and
    entry times to be non-decreasing in the initial energy.
    """
    t_wall = time.perf_counter()
    if margin <= 0:
        raise ConfigError(f"margin must be > 0, got {margin}")
    if not (0 < tail_fraction <= 1):
        raise ConfigError(f"tail_fraction must be in (0, 1], got {tail_fraction}")
    scales = sorted(float(s) for s in energy_scales)
    if len(scales) < 2:
        raise ConfigError("need at least 2 energy scales")
    if scales[0] <= 0:
        raise ConfigError(f"energy scales must be positive, got {scales[0]}")
    out = out_dir or base.out_dir or os.path.join("runs", base.name)
    os.makedirs(out, exist_ok=True)

    state0 = build_initial_state(base)
    e0 = total_energy(state0, base.params.law, base.scheme.vacuum_floor)
    if e0.kinetic <= 0:
        raise ConfigError(
            f"[{base.name}] base scenario needs nonzero initial velocity")

    initial_energies: list[float] = []
    entry_times: list[Optional[float]] = []
    final_energies: list[float] = []
    csv_paths: list[str] = []
    tail_limit = None
    band_limit = None

    for i, s in enumerate(scales):
        target = (s / scales[0]) * e0.total
        factor = math.sqrt((target - e0.potential) / e0.kinetic)
        scn_i = dataclasses.replace(
            base,
            name=f"{base.name}_scale{i}",
            initial_spec=_scaled_velocity_spec(base.initial_spec, factor,
                                               base.name),
            snapshot_interval=None,
        )
        record, _, recs = _execute(scn_i, out, csv_name=f"scale{i}_series.csv")
        csv_paths.append(record.csv_path)
        times = np.array([r.time for r in recs])
        E = np.array([r.total for r in recs])
        initial_energies.append(float(E[0]))
        final_energies.append(float(E[-1]))

        if i == 0:
            tail = E[times >= (1.0 - tail_fraction) * base.t_end]
            tail_limit = float(np.max(tail))
            band_limit = (1.0 + margin) * tail_limit

        above = np.flatnonzero(E > band_limit)
        if above.size == 0:
            entry_times.append(float(times[0]))
        elif above[-1] == len(E) - 1:
            entry_times.append(None)
        else:
            entry_times.append(float(times[above[-1] + 1]))

    settled = all(t is not None for t in entry_times)
    ordered = settled and all(
        entry_times[i] <= entry_times[i + 1] for i in range(len(scales) - 1)
    )
    report = ProbeReport(
        probe="dissipativity",
        passed=bool(settled and ordered),
        measurements={
            "scales": scales,
            "initial_energies": initial_energies,
            "final_energies": final_energies,
            "entry_times": entry_times,
            "band_limit": band_limit,
            "tail_max_lowest_run": tail_limit,
            "csv_paths": csv_paths,
            "all_settled": settled,
            "entry_times_ordered": ordered,
        },
        thresholds={"margin": margin, "tail_fraction": tail_fraction},
        runtime_s=time.perf_counter() - t_wall,
    )
    write_report(report, os.path.join(out, "dissipativity_report.json"))
    return report


def probe_periodic(base: Scenario, transient: float, periods: int,
                   rel_tol: float = 1e-3, slack: float = 0.05,
                   out_dir: Optional[str] = None) -> ProbeReport:
    """Measure period-to-period L1 distances of density and momentum after a
    transient under time-periodic forcing; they must be non-increasing
    (within slack) and end below rel_tol times the L1 density norm."""
    t_wall = time.perf_counter()
    if not isinstance(base.forcing, TimePeriodicForcing):
        raise ConfigError(f"[{base.name}] periodic probe needs time-periodic forcing")
    if periods < 2:
        raise ConfigError(f"need at least 2 periods, got {periods}")
    if transient < 0:
        raise ConfigError(f"transient must be >= 0, got {transient}")
    omega = base.forcing.omega
    needed = transient + (periods + 1) * omega
    if base.t_end + 1e-12 < needed:
        raise ConfigError(
            f"[{base.name}] t_end={base.t_end} too short: need >= {needed}")
    out = out_dir or base.out_dir or os.path.join("runs", base.name)
    os.makedirs(out, exist_ok=True)

    snap_times = [transient + k * omega for k in range(periods + 1)]
    captured: dict[float, State] = {}
    obs = TimesObserver(snap_times, lambda s: captured.setdefault(s.time, s.copy()))
    _execute(base, out, extra_observers=[obs])

    missing = [t for t in snap_times if t not in captured]
    if missing:
        raise SolverError(f"[{base.name}] snapshots not captured at {missing}")

    states = [captured[t] for t in snap_times]
    mass_norm = total_mass(states[0])
    abs_floor = 1e-14 * mass_norm
    deltas = [
        lp_distance(states[k].rho, states[k + 1].rho, 1.0)
        for k in range(periods)
    ]
    deltas_mom = [
        lp_distance(states[k].mom, states[k + 1].mom, 1.0)
        for k in range(periods)
    ]

    rows = ["k,t,delta_rho,delta_mom,mass_l1"]
    for k in range(periods):
        rows.append(",".join([
            str(k), repr(float(snap_times[k])), repr(float(deltas[k])),
            repr(float(deltas_mom[k])), repr(float(mass_norm)),
        ]))
    series_path = os.path.join(out, "periodic_residual.csv")
    with open(series_path, "w") as fh:
        fh.write("\n".join(rows) + "\n")

    nonincreasing = all(
        deltas[k + 1] <= (1.0 + slack) * deltas[k] + abs_floor
        for k in range(periods - 1)
    )
    small = deltas[-1] <= rel_tol * mass_norm
    report = ProbeReport(
        probe="periodic",
        passed=bool(nonincreasing and small),
        measurements={
            "omega": omega,
            "transient": transient,
            "delta_rho": deltas,
            "delta_mom": deltas_mom,
            "density_l1": mass_norm,
            "final_delta_rho": deltas[-1],
            "nonincreasing": nonincreasing,
            "final_below_tolerance": small,
            "csv_path": series_path,
        },
        thresholds={"rel_tol": rel_tol, "slack": slack, "abs_floor": abs_floor},
        runtime_s=time.perf_counter() - t_wall,
    )
    write_report(report, os.path.join(out, "periodic_report.json"))
    return report


#: number of trigonometric test functions per axis used for weak pairings
TEST_FUNCTION_MODES = 4


def _pairing_family(grid: Grid, modes: int = TEST_FUNCTION_MODES):
    """Fixed test-function family for weak pairings: per axis, the vector
    field sin(pi k x / L) along that axis, k = 1..modes (zero on the walls)."""
    coords = grid.centers()
    fields = []
    for axis in range(grid.dim):
        for k in range(1, modes + 1):
            values = np.zeros((grid.dim,) + grid.shape)
            values[(axis,) + grid.interior] = np.sin(
                np.pi * k * coords[axis] / grid.extents[axis])
            fields.append(VectorField(grid, values))
    return fields


def probe_shift_compactness(base: Scenario, shift_times, window: float,
                            win_samples: int = 21, slack: float = 0.05,
                            decay_ratio: float = 0.1,
                            alpha: Optional[float] = None,
                            out_dir: Optional[str] = None) -> ProbeReport:
    """Windowed self-distance of one trajectory between consecutive time
    shifts: density in L^gamma (raised to gamma, integrated over the window)
    and momentum in L1.  Decaying shift distances are the desk-scale proxy
    for decay of density oscillation amplitude."""
    t_wall = time.perf_counter()
    shifts = [float(t) for t in shift_times]
    if len(shifts) < 3:
        raise ConfigError(f"need at least 3 shift times, got {len(shifts)}")
    if any(shifts[i] >= shifts[i + 1] for i in range(len(shifts) - 1)):
        raise ConfigError("shift times must be strictly increasing")
    if window <= 0:
        raise ConfigError(f"window must be positive, got {window}")
    if win_samples < 2:
        raise ConfigError(f"need at least 2 window samples, got {win_samples}")
    if shifts[-1] + window > base.t_end + 1e-12:
        raise ConfigError(
            f"[{base.name}] last shift + window exceeds t_end={base.t_end}")
    if alpha is None:
        if not isinstance(base.params.law, Isentropic):
            raise ConfigError(
                f"[{base.name}] alpha required for non-isentropic laws")
        alpha = base.params.law.gamma
    if alpha < 1:
        raise ConfigError(f"alpha must be >= 1, got {alpha}")
    out = out_dir or base.out_dir or os.path.join("runs", base.name)
    os.makedirs(out, exist_ok=True)

    tau = [j * window / (win_samples - 1) for j in range(win_samples)]
    wanted = sorted({t_n + t for t_n in shifts for t in tau})
    captured: dict[float, State] = {}
    obs = TimesObserver(wanted, lambda s: captured.setdefault(s.time, s.copy()))
    _execute(base, out, extra_observers=[obs])
    missing = [t for t in wanted if t not in captured]
    if missing:
        raise SolverError(f"[{base.name}] snapshots not captured at {missing}")

    dtau = window / (win_samples - 1)
    deltas: list[float] = []
    deltas_mom: list[float] = []
    for n in range(len(shifts) - 1):
        vals = np.array([
            lp_distance(captured[shifts[n] + t].rho,
                        captured[shifts[n + 1] + t].rho, alpha) ** alpha
            for t in tau
        ])
        vals_mom = np.array([
            lp_distance(captured[shifts[n] + t].mom,
                        captured[shifts[n + 1] + t].mom, 1.0)
            for t in tau
        ])
        deltas.append(float(_trapezoid(vals, dx=dtau)))
        deltas_mom.append(float(_trapezoid(vals_mom, dx=dtau)))

    # weak-topology proxy: momentum mismatch at the shift times paired
    # against the fixed trigonometric family (informative, not a gate)
    family = _pairing_family(base.grid)
    pairing_max = [
        max(abs(weak_pairing(captured[shifts[n]].mom,
                             captured[shifts[n + 1]].mom, phi))
            for phi in family)
        for n in range(len(shifts) - 1)
    ]

    rows = ["n,t_shift,delta_rho_window,delta_mom_window"]
    for n in range(len(deltas)):
        rows.append(",".join([
            str(n), repr(float(shifts[n])), repr(float(deltas[n])),
            repr(float(deltas_mom[n])),
        ]))
    series_path = os.path.join(out, "shift_distances.csv")
    with open(series_path, "w") as fh:
        fh.write("\n".join(rows) + "\n")

    nonincreasing = all(
        deltas[n + 1] <= (1.0 + slack) * deltas[n]
        for n in range(len(deltas) - 1)
    )
    decayed = deltas[-1] <= decay_ratio * deltas[0]
    report = ProbeReport(
        probe="shift_compactness",
        passed=bool(nonincreasing and decayed),
        measurements={
            "shift_times": shifts,
            "window": window,
            "alpha": alpha,
            "delta_rho_window": deltas,
            "delta_mom_window": deltas_mom,
            "pairing_max": pairing_max,
            "test_function_modes": TEST_FUNCTION_MODES,
            "nonincreasing": nonincreasing,
            "decayed": decayed,
            "csv_path": series_path,
        },
        thresholds={
            "slack": slack, "decay_ratio": decay_ratio,
            "win_samples": win_samples,
        },
        runtime_s=time.perf_counter() - t_wall,
    )
    write_report(report, os.path.join(out, "shift_report.json"))
    return report


def probe_steady_convergence(base: Scenario, decay_factor: float = 1e-2,
                             q_tol_factor: float = 1e-4,
                             statics_tol: float = 1e-10, levels: int = 64,
                             out_dir: Optional[str] = None) -> ProbeReport:
    """Compare the trajectory against the mass-matched hydrostatic profile of
    the forcing potential: density error in L^gamma must shrink by
    decay_factor, momentum L1 must fall to q_tol_factor times its start."""
    t_wall = time.perf_counter()
    if not isinstance(base.forcing, GradientForcing):
        raise ConfigError(f"[{base.name}] steady probe needs gradient forcing")
    law = base.params.law
    if not isinstance(law, Isentropic) or law.gamma <= 1:
        raise ConfigError(
            f"[{base.name}] steady probe needs an isentropic law with gamma > 1")
    out = out_dir or base.out_dir or os.path.join("runs", base.name)
    os.makedirs(out, exist_ok=True)

    F = base.forcing.F
    level_report = check_level_sets(F, levels)
    warnings = []
    if not level_report.connected_all:
        warnings.append(
            "potential has disconnected upper level sets (first at "
            f"{level_report.first_disconnected_level}); convergence may stall"
        )

    state0 = build_initial_state(base)
    m0 = total_mass(state0)
    # solve tighter than the check so the reported mass error has headroom
    sol = solve_static(F, m0, law.a, law.gamma, tol=0.1 * statics_tol)
    assert sol.mass_error <= statics_tol * m0

    zero_mom = VectorField.zeros(base.grid)
    times: list[float] = []
    e_rho: list[float] = []
    e_q: list[float] = []

    def on_sample(state: State) -> None:
        times.append(state.time)
        e_rho.append(lp_distance(state.rho, sol.rho_s, law.gamma))
        e_q.append(lp_distance(state.mom, zero_mom, 1.0))

    obs = SampleObserver(base.sample_interval, on_sample, t0=state0.time)
    _execute(base, out, extra_observers=[obs])

    rows = ["t,e_rho,e_q"]
    for t, er, eq in zip(times, e_rho, e_q):
        rows.append(f"{t!r},{er!r},{eq!r}")
    series_path = os.path.join(out, "steady_convergence.csv")
    with open(series_path, "w") as fh:
        fh.write("\n".join(rows) + "\n")

    if e_rho[0] > 0:
        ratio = e_rho[-1] / e_rho[0]
    else:
        ratio = 0.0 if e_rho[-1] == 0 else math.inf
    q_tol = q_tol_factor * e_q[0]
    rho_ok = ratio <= decay_factor
    q_ok = e_q[-1] <= q_tol
    report = ProbeReport(
        probe="steady_convergence",
        passed=bool(rho_ok and q_ok),
        measurements={
            "mass": m0,
            "static_constant_c": sol.c,
            "static_mass_error": sol.mass_error,
            "support_connected": sol.support_connected,
            "level_sets_connected": level_report.connected_all,
            "e_rho_initial": e_rho[0],
            "e_rho_final": e_rho[-1],
            "e_rho_ratio": ratio,
            "e_q_initial": e_q[0],
            "e_q_final": e_q[-1],
            "csv_path": series_path,
        },
        thresholds={
            "decay_factor": decay_factor,
            "q_tol_factor": q_tol_factor,
            "q_tol": q_tol,
            "statics_tol": statics_tol,
            "levels": levels,
        },
        runtime_s=time.perf_counter() - t_wall,
        warnings=warnings,
    )
    write_report(report, os.path.join(out, "steady_report.json"))
    return report


PROBES = {
    "dissipativity": probe_dissipativity,
    "periodic": probe_periodic,
    "shift_compactness": probe_shift_compactness,
    "steady_convergence": probe_steady_convergence,
}


def run_probe_from_config(name: str, doc: dict, base_dir: str = ".",
                          out_dir: Optional[str] = None) -> ProbeReport:
    """Dispatch a probe by name on a scenario document; probe parameters come
    from the document's "probes" section keyed by probe name."""
    if name not in PROBES:
        raise ConfigError(
            f"unknown probe {name!r}; expected one of {sorted(PROBES)}")
    scn = scenario_from_dict(doc, base_dir=base_dir)
    params = doc.get("probes", {}).get(name, {})
    if name == "dissipativity":
        scales = params.get("energy_scales", [1.0, 10.0, 100.0])
        return probe_dissipativity(
            scn, scales, margin=float(params.get("margin", 0.2)),
            tail_fraction=float(params.get("tail_fraction", 0.25)),
            out_dir=out_dir,
        )
    if name == "periodic":
        if "transient" not in params or "periods" not in params:
            raise ConfigError(
                "periodic probe needs 'transient' and 'periods' parameters")
        return probe_periodic(
            scn, transient=float(params["transient"]),
            periods=int(params["periods"]),
            rel_tol=float(params.get("rel_tol", 1e-3)),
            slack=float(params.get("slack", 0.05)),
            out_dir=out_dir,
        )
    if name == "shift_compactness":
        if "shift_times" not in params or "window" not in params:
            raise ConfigError(
                "shift probe needs 'shift_times' and 'window' parameters")
        return probe_shift_compactness(
            scn, params["shift_times"], window=float(params["window"]),
            win_samples=int(params.get("win_samples", 21)),
            slack=float(params.get("slack", 0.05)),
            decay_ratio=float(params.get("decay_ratio", 0.1)),
            alpha=params.get("alpha"),
            out_dir=out_dir,
        )
    return probe_steady_convergence(
        scn, decay_factor=float(params.get("decay_factor", 1e-2)),
        q_tol_factor=float(params.get("q_tol_factor", 1e-4)),
        statics_tol=float(params.get("statics_tol", 1e-10)),
        levels=int(params.get("levels", 64)),
        out_dir=out_dir,
    )
