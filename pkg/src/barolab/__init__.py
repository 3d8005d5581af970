"""Finite-volume laboratory for viscous barotropic gas flow.

Subpackages by concern:
- core: grids, fields, state containers, initial-data validation
- constitutive: pressure laws, pressure potential, viscous stress, bounds
- solver: explicit conservative time integration with no-slip walls
- diagnostics: energy, dissipation, residuals, norms, pairings
- statics: closed-form hydrostatic profiles with a mass root-find
- harness: scenarios, long-time behaviour probes, persistence, CLI
"""

__version__ = "0.1.0"

from .core import (
    Grid,
    GridError,
    FieldError,
    InitialData,
    InitialDataError,
    ScalarField,
    State,
    VectorField,
    make_grid,
    total_mass,
    validate_initial_data,
)
from .constitutive import (
    FluidParams,
    GrowthBoundReport,
    Isentropic,
    LawError,
    PressureLaw,
    Tabulated,
    Viscosity,
    check_growth_bounds,
    dpressure,
    load_tabulated_csv,
    pressure,
    pressure_potential,
    sound_speed,
    viscous_stress,
)
from .solver import (
    ConfigError,
    ConstantForcing,
    Envelope,
    Forcing,
    GradientForcing,
    SampleObserver,
    SchemeConfig,
    SolverError,
    StepCounters,
    TimePeriodicForcing,
    TimesObserver,
    forcing_power,
    potential_gradient,
    simulate,
    stable_dt,
    step,
)
from .diagnostics import (
    DiagnosticsError,
    EnergyRecord,
    RenormFunction,
    dissipation_rate,
    energy_inequality_residual,
    lp_distance,
    renorm_residual,
    total_energy,
    weak_pairing,
)
from .statics import (
    LevelSetReport,
    StaticSolution,
    StaticsError,
    check_level_sets,
    load_potential_csv,
    make_potential,
    solve_static,
    static_residual,
)
from .harness import (
    ProbeReport,
    RunRecord,
    Scenario,
    build_initial_state,
    probe_dissipativity,
    probe_periodic,
    probe_shift_compactness,
    probe_steady_convergence,
    run_probe_from_config,
    run_scenario,
    scenario_from_dict,
    scenario_from_file,
)
