"""Energy split, dissipation, residuals, truncations, norms, pairings."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from barolab import (
    DiagnosticsError,
    EnergyRecord,
    FluidParams,
    Isentropic,
    RenormFunction,
    ScalarField,
    SchemeConfig,
    State,
    VectorField,
    Viscosity,
    dissipation_rate,
    energy_inequality_residual,
    lp_distance,
    make_grid,
    renorm_residual,
    stable_dt,
    step,
    total_energy,
    weak_pairing,
)

from _helpers import rng_for, smooth_state_1d

LAW = Isentropic(a=1.0, gamma=2.0)


def uniform_state(rho0: float, u0: float, cells: int = 64) -> State:
    grid = make_grid(1, (1.0,), (cells,))
    rho = ScalarField.full(grid, rho0)
    mom = VectorField.from_functions(grid, [lambda x: rho0 * u0 + 0.0 * x])
    return State(rho=rho, mom=mom, time=0.0)


def test_total_energy_uniform_closed_form():
    # kinetic = q^2/(2 rho) |Omega|, potential = a rho^gamma/(gamma-1) |Omega|
    q0 = 1.5 ** (4.0 / 3.0)
    state = uniform_state(1.5, q0 / 1.5)
    rec = total_energy(state, LAW)
    assert rec.kinetic == pytest.approx(0.5 * 1.5 ** (5.0 / 3.0), rel=1e-12)
    assert rec.potential == pytest.approx(1.5 ** 2, rel=1e-12)
    assert rec.total == rec.kinetic + rec.potential


def test_total_energy_rest_state_has_zero_kinetic():
    state = uniform_state(2.0, 0.0)
    rec = total_energy(state, LAW)
    assert rec.kinetic == 0.0
    assert rec.potential == pytest.approx(4.0, rel=1e-12)


def test_potential_energy_is_permutation_invariant():
    grid = make_grid(1, (1.0,), (50,))
    rng = rng_for(3)
    vals = rng.uniform(0.2, 3.0, 50)
    perm = rng.permutation(50)
    states = []
    for v in (vals, vals[perm]):
        rho = ScalarField.zeros(grid)
        rho.values[grid.interior] = v
        states.append(State(rho, VectorField.zeros(grid), 0.0))
    e0 = total_energy(states[0], LAW).potential
    e1 = total_energy(states[1], LAW).potential
    assert e0 == pytest.approx(e1, rel=1e-14)


def test_dissipation_rate_sine_profile_oracle():
    # u = sin(pi x), rho = 1: integral (2 mu + lam) (u')^2 = pi^2 for mu=1
    state = smooth_state_1d(256, lambda x: 1.0 + 0.0 * x,
                            lambda x: np.sin(np.pi * x))
    got = dissipation_rate(state, Viscosity(mu=1.0, lam=0.0))
    assert got == pytest.approx(math.pi ** 2, rel=2e-4)


def test_dissipation_rate_includes_bulk_term():
    state = smooth_state_1d(256, lambda x: 1.0 + 0.0 * x,
                            lambda x: np.sin(np.pi * x))
    base = dissipation_rate(state, Viscosity(mu=1.0, lam=0.0))
    with_bulk = dissipation_rate(state, Viscosity(mu=1.0, lam=0.5))
    # adding lam raises the (lam + mu) |div u|^2 share by lam/(mu+mu)
    assert with_bulk == pytest.approx(base * 1.25, rel=2e-4)


def test_dissipation_rate_zero_at_rest_and_never_negative():
    assert dissipation_rate(uniform_state(1.0, 0.0), Viscosity(1.0, 0.0)) == 0.0


def test_energy_inequality_residual_hand_example():
    records = [
        EnergyRecord(time=0.0, kinetic=2.0, potential=0.0,
                     dissipation=0.5, power=0.1),
        EnergyRecord(time=1.0, kinetic=1.5, potential=0.0,
                     dissipation=0.3, power=0.1),
    ]
    res, worst = energy_inequality_residual(records)
    assert res == pytest.approx([-0.5 + 0.4 - 0.1])
    assert worst == pytest.approx(-0.2)


def test_energy_inequality_residual_rest_state_is_zero():
    records = [EnergyRecord(time=float(k), kinetic=0.0, potential=1.0)
               for k in range(5)]
    res, worst = energy_inequality_residual(records)
    assert np.all(res == 0.0)
    assert worst == 0.0


def test_energy_inequality_residual_input_validation():
    one = [EnergyRecord(time=0.0, kinetic=1.0, potential=0.0)]
    with pytest.raises(DiagnosticsError):
        energy_inequality_residual(one)
    backwards = [
        EnergyRecord(time=1.0, kinetic=1.0, potential=0.0),
        EnergyRecord(time=0.5, kinetic=1.0, potential=0.0),
    ]
    with pytest.raises(DiagnosticsError):
        energy_inequality_residual(backwards)


def test_energy_record_validation():
    with pytest.raises(DiagnosticsError):
        EnergyRecord(time=0.0, kinetic=-1.0, potential=0.0)
    with pytest.raises(DiagnosticsError):
        EnergyRecord(time=0.0, kinetic=1.0, potential=float("nan"))
    with pytest.raises(DiagnosticsError):
        EnergyRecord(time=0.0, kinetic=1.0, potential=0.0, dissipation=-0.1)


def test_renorm_function_regions_exact():
    b = RenormFunction(M=2.0)
    rho = np.array([0.0, 1.0, 2.0, 3.0, 4.0, 10.0])
    vals = b.value(rho)
    assert vals[0] == 0.0 and vals[1] == 1.0 and vals[2] == 2.0
    assert vals[4] == 3.0 and vals[5] == 3.0  # plateau at 1.5 M
    assert b.deriv(np.array([0.5, 1.9]))[0] == 1.0
    assert np.all(b.deriv(np.array([4.0, 5.0, 100.0])) == 0.0)
    with pytest.raises(DiagnosticsError):
        RenormFunction(M=0.0)


def test_renorm_function_derivative_is_continuous_at_joints():
    b = RenormFunction(M=1.0)
    h = 1e-7
    for joint in (1.0, 2.0):
        fd = (b.value(joint + h) - b.value(joint - h)) / (2.0 * h)
        assert fd == pytest.approx(float(b.deriv(joint)), abs=1e-6)


@given(m=st.floats(0.1, 10.0), rho=st.floats(0.0, 50.0))
@settings(max_examples=80, deadline=None)
def test_renorm_function_bounds(m, rho):
    b = RenormFunction(M=m)
    v = float(b.value(rho))
    d = float(b.deriv(rho))
    assert 0.0 <= d <= 1.0
    assert v <= min(rho, 1.5 * m) + 1e-12 * max(1.0, rho)
    assert v >= 0.0


def test_renorm_residual_identity_region_collapses_to_mass_update():
    # b(rho) = rho when M is far above the densities, so one forward-Euler
    # step leaves only roundoff amplified by 1/dt
    params = FluidParams(law=LAW, visc=Viscosity(mu=0.01, lam=0.0))
    scheme = SchemeConfig(time_integrator="forward_euler", use_fast_kernel=False)
    before = smooth_state_1d(
        150,
        lambda x: 1.0 + 0.3 * np.cos(2.0 * np.pi * x),
        lambda x: 0.2 * np.sin(np.pi * x),
    )
    dt = stable_dt(before, params, scheme)
    after = step(before, params, None, scheme, dt)
    u = VectorField(before.grid,
                    before.mom.values / np.maximum(before.rho.values, 1e-12))
    res = renorm_residual(before, after, u, RenormFunction(M=50.0), LAW)
    assert res <= 1e-12


def test_renorm_residual_positive_when_truncation_active():
    params = FluidParams(law=LAW, visc=Viscosity(mu=0.01, lam=0.0))
    scheme = SchemeConfig(time_integrator="forward_euler", use_fast_kernel=False)
    before = smooth_state_1d(
        150,
        lambda x: 1.0 + 0.5 * np.cos(2.0 * np.pi * x),
        lambda x: 0.3 * np.sin(np.pi * x),
    )
    dt = stable_dt(before, params, scheme)
    after = step(before, params, None, scheme, dt)
    u = VectorField(before.grid,
                    before.mom.values / np.maximum(before.rho.values, 1e-12))
    res = renorm_residual(before, after, u, RenormFunction(M=1.0), LAW)
    assert res > 1e-6


def test_renorm_residual_rejects_mismatched_inputs():
    before = smooth_state_1d(32, lambda x: 1.0 + 0.0 * x, lambda x: 0.0 * x)
    other = smooth_state_1d(48, lambda x: 1.0 + 0.0 * x, lambda x: 0.0 * x)
    u = VectorField.zeros(before.grid)
    with pytest.raises(DiagnosticsError):
        renorm_residual(before, other, u, RenormFunction(M=1.0), LAW)
    same_time = before.copy()
    with pytest.raises(DiagnosticsError):
        renorm_residual(before, same_time, u, RenormFunction(M=1.0), LAW)


def test_renorm_residual_2d_smoke():
    grid = make_grid(2, (1.0, 1.0), (20, 20))
    rho = ScalarField.from_function(
        grid, lambda x, y: 1.0 + 0.3 * np.cos(np.pi * x) * np.cos(np.pi * y))
    mom = VectorField.from_functions(
        grid, [lambda x, y: 0.1 * np.sin(np.pi * x),
               lambda x, y: 0.1 * np.sin(np.pi * y)])
    before = State(rho, mom, 0.0)
    params = FluidParams(law=LAW, visc=Viscosity(mu=0.01, lam=0.0))
    scheme = SchemeConfig(time_integrator="forward_euler")
    dt = stable_dt(before, params, scheme)
    after = step(before, params, None, scheme, dt)
    u = VectorField(grid, before.mom.values / np.maximum(before.rho.values, 1e-12))
    tight = renorm_residual(before, after, u, RenormFunction(M=50.0), LAW)
    active = renorm_residual(before, after, u, RenormFunction(M=1.0), LAW)
    assert tight <= 1e-11
    assert active >= 0.0


def test_lp_distance_sine_oracle():
    grid = make_grid(1, (1.0,), (400,))
    a = ScalarField.from_function(grid, lambda x: np.sin(np.pi * x))
    b = ScalarField.zeros(grid)
    assert lp_distance(a, b, 1.0) == pytest.approx(2.0 / math.pi, rel=1e-4)
    assert lp_distance(a, b, 2.0) == pytest.approx(math.sqrt(0.5), rel=1e-4)


def test_lp_distance_vector_fields_use_euclidean_magnitude():
    grid = make_grid(2, (1.0, 1.0), (16, 16))
    a = VectorField.from_functions(
        grid, [lambda x, y: 3.0 + 0.0 * x, lambda x, y: 4.0 + 0.0 * x])
    b = VectorField.zeros(grid)
    assert lp_distance(a, b, 1.0) == pytest.approx(5.0, rel=1e-12)


def test_lp_distance_validation():
    grid = make_grid(1, (1.0,), (8,))
    a = ScalarField.zeros(grid)
    with pytest.raises(DiagnosticsError):
        lp_distance(a, a, 0.5)
    other = ScalarField.zeros(make_grid(1, (1.0,), (16,)))
    with pytest.raises(DiagnosticsError):
        lp_distance(a, other, 2.0)


@given(seed=st.integers(0, 10_000), alpha=st.sampled_from([1.0, 1.5, 2.0, 3.0]))
@settings(max_examples=40, deadline=None)
def test_lp_distance_symmetry_and_triangle(seed, alpha):
    grid = make_grid(1, (1.0,), (24,))
    rng = np.random.default_rng(seed)
    fields = []
    for _ in range(3):
        f = ScalarField.zeros(grid)
        f.values[grid.interior] = rng.normal(size=24)
        fields.append(f)
    a, b, c = fields
    assert lp_distance(a, b, alpha) == pytest.approx(lp_distance(b, a, alpha))
    assert lp_distance(a, c, alpha) <= (
        lp_distance(a, b, alpha) + lp_distance(b, c, alpha) + 1e-12)
    assert lp_distance(a, a, alpha) == 0.0


def test_weak_pairing_linear_profile_oracle():
    # (A - B) = x against phi = 1: midpoint sum integrates x exactly to 1/2
    grid = make_grid(1, (1.0,), (40,))
    a = VectorField.from_functions(grid, [lambda x: x])
    b = VectorField.zeros(grid)
    phi = VectorField.from_functions(grid, [lambda x: 1.0 + 0.0 * x])
    assert weak_pairing(a, b, phi) == pytest.approx(0.5, rel=1e-13)


@given(s1=st.floats(-3.0, 3.0), s2=st.floats(-3.0, 3.0), seed=st.integers(0, 500))
@settings(max_examples=30, deadline=None)
def test_weak_pairing_is_bilinear(s1, s2, seed):
    grid = make_grid(1, (1.0,), (16,))
    rng = np.random.default_rng(seed)

    def rand_field():
        f = VectorField.zeros(grid)
        f.values[(slice(None),) + grid.interior] = rng.normal(size=(1, 16))
        return f

    a, b, phi1, phi2 = (rand_field() for _ in range(4))
    zero = VectorField.zeros(grid)
    combo = VectorField(grid, s1 * phi1.values + s2 * phi2.values)
    lhs = weak_pairing(a, b, combo)
    rhs = (s1 * weak_pairing(a, b, phi1) + s2 * weak_pairing(a, b, phi2))
    assert lhs == pytest.approx(rhs, abs=1e-10)
    assert weak_pairing(a, a, phi1) == 0.0
    assert weak_pairing(a, zero, phi1) + weak_pairing(zero, a, phi1) == (
        pytest.approx(0.0, abs=1e-12))
