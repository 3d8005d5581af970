"""Pressure laws, the pressure potential, growth bounds, viscous stress."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from barolab import FluidParams, Isentropic, Tabulated, Viscosity
from barolab.constitutive import (
    LawError,
    check_growth_bounds,
    dpressure,
    load_tabulated_csv,
    pressure,
    pressure_potential,
    sound_speed,
    viscous_stress,
)


def test_isentropic_pressure_values():
    law = Isentropic(a=1.0, gamma=2.0)
    assert pressure(2.0, law) == pytest.approx(4.0)
    assert dpressure(2.0, law) == pytest.approx(4.0)
    assert pressure(0.0, law) == 0.0


def test_isentropic_rejects_bad_parameters():
    with pytest.raises(LawError):
        Isentropic(a=-1.0, gamma=2.0)
    with pytest.raises(LawError):
        Isentropic(a=1.0, gamma=0.5)


def test_sound_speed_closed_form():
    law = Isentropic(a=1.0, gamma=2.0)
    assert sound_speed(1.0, law) == pytest.approx(np.sqrt(2.0))
    assert sound_speed(4.0, law) == pytest.approx(np.sqrt(8.0))


def test_sound_speed_clamps_non_monotone_tabulated():
    rho = np.array([0.0, 0.1, 0.5, 1.0, 1.5, 2.0])
    p = np.array([0.0, 0.1, 0.6, 0.5, 0.9, 1.5])  # dip around rho = 1
    law = Tabulated(rho, p)
    assert sound_speed(1.0, law) == 0.0


def test_pressure_potential_isentropic():
    law = Isentropic(a=1.0, gamma=2.0)
    assert pressure_potential(2.0, law) == pytest.approx(4.0)
    assert pressure_potential(0.0, law) == 0.0


def test_pressure_potential_isothermal():
    law = Isentropic(a=2.0, gamma=1.0)
    assert pressure_potential(1.0, law) == pytest.approx(0.0)
    assert pressure_potential(0.0, law) == 0.0
    r = np.e
    assert pressure_potential(r, law) == pytest.approx(2.0 * r)


def test_pressure_potential_rejects_negative_density():
    law = Isentropic(a=1.0, gamma=2.0)
    with pytest.raises(LawError):
        pressure_potential(-0.1, law)


def test_tabulated_matches_isentropic_between_nodes():
    ref = Isentropic(a=1.0, gamma=2.0)
    rho = np.linspace(0.0, 4.0, 401)
    law = Tabulated(rho, rho**2)
    for r in (0.5, 1.0, 2.0, 3.3):
        assert pressure(r, law) == pytest.approx(pressure(r, ref), rel=1e-4)
        # quadrature starts at the first positive node, so the potential
        # misses the [0, rho_0] tail: relative error ~ rho_0 / rho
        assert pressure_potential(r, law) == pytest.approx(
            pressure_potential(r, ref), rel=0.03)


def test_load_tabulated_csv_roundtrip(tmp_path):
    rho = np.linspace(0.0, 2.0, 51)
    path = tmp_path / "law.csv"
    with open(path, "w") as fh:
        fh.write("rho,p\n")
        for r in rho:
            fh.write(f"{float(r)!r},{float(r) ** 2!r}\n")
    law = load_tabulated_csv(str(path))
    assert pressure(1.0, law) == pytest.approx(1.0, rel=1e-6)


def test_load_tabulated_csv_accepts_non_monotone_pressure(tmp_path):
    # pressure dips between nodes: a supported law, with either interpolant
    path = tmp_path / "law.csv"
    with open(path, "w") as fh:
        fh.write("rho,p\n0.0,0.0\n0.5,0.5\n1.0,0.4\n1.5,0.9\n")
    for flag in (False, True):
        law = load_tabulated_csv(str(path), monotone=flag)
        assert pressure(1.0, law) == pytest.approx(0.4)


def test_monotone_flag_selects_shape_preserving_interpolation():
    # abrupt slope change makes a natural cubic spline overshoot; the
    # shape-preserving interpolant keeps dp/drho >= 0 on monotone data
    rho = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
    p = np.array([0.0, 0.01, 0.02, 5.0, 10.0])
    dense = np.linspace(1e-6, 4.0, 2001)
    shape_preserving = Tabulated(rho, p, monotone=True)
    assert np.all(dpressure(dense, shape_preserving) >= -1e-12)
    plain_spline = Tabulated(rho, p, monotone=False)
    assert np.min(dpressure(dense, plain_spline)) < -1e-3


def test_growth_bounds_examples():
    law = Isentropic(a=1.0, gamma=2.0)
    rep = check_growth_bounds(law, a=2.0, b=0.0, gamma=2.0,
                              rho_range=(1e-3, 1e3), samples=1000)
    assert rep.passed

    law3 = Isentropic(a=1.0, gamma=3.0)
    rep3 = check_growth_bounds(law3, a=1.0, b=0.0, gamma=2.0,
                               rho_range=(1e-3, 1e3), samples=1000)
    assert not rep3.passed
    assert rep3.worst_margin > 0


def test_growth_bounds_non_monotone_dip_with_slack():
    rho = np.linspace(0.0, 3.0, 601)
    p = rho**2 - 0.1 * np.exp(-((rho - 1.0) / 0.1) ** 2)
    p[0] = 0.0
    law = Tabulated(rho, p)
    rep = check_growth_bounds(law, a=2.0, b=1.0, gamma=2.0,
                              rho_range=(0.1, 2.5), samples=500)
    assert rep.passed


def test_viscous_stress_examples():
    assert viscous_stress(np.zeros((1, 1)), Viscosity(mu=1.0, lam=0.5)
                          ) == pytest.approx(np.zeros((1, 1)))
    s = viscous_stress(np.array([[3.0]]), Viscosity(mu=1.0, lam=0.5))
    assert s[0, 0] == pytest.approx(7.5)
    shear = np.array([[0.0, 1.0], [0.0, 0.0]])
    s2 = viscous_stress(shear, Viscosity(mu=1.0, lam=1.0))
    assert np.allclose(s2, [[0.0, 1.0], [1.0, 0.0]])


def test_viscosity_rejects_inadmissible_coefficients():
    with pytest.raises(LawError):
        Viscosity(mu=0.0, lam=0.0)
    with pytest.raises(LawError):
        Viscosity(mu=1.0, lam=-3.0)


@given(
    a=st.floats(min_value=0.1, max_value=10.0),
    gamma=st.floats(min_value=1.1, max_value=3.0),
    rho=st.floats(min_value=0.1, max_value=10.0),
)
@settings(max_examples=100, deadline=None)
def test_potential_identity_central_difference(a, gamma, rho):
    law = Isentropic(a=a, gamma=gamma)
    h = 1e-6 * rho
    dP = (pressure_potential(rho + h, law)
          - pressure_potential(rho - h, law)) / (2 * h)
    assert dP * rho - pressure_potential(rho, law) == pytest.approx(
        pressure(rho, law), rel=1e-6)


@given(
    a=st.floats(min_value=0.1, max_value=10.0),
    gamma=st.floats(min_value=1.0, max_value=3.0),
    rho=st.floats(min_value=1e-6, max_value=100.0),
)
@settings(max_examples=100, deadline=None)
def test_sound_speed_squared_equals_dpressure(a, gamma, rho):
    law = Isentropic(a=a, gamma=gamma)
    dp = dpressure(rho, law)
    assert dp >= 0
    assert sound_speed(rho, law) ** 2 == pytest.approx(dp, rel=1e-12)


@given(
    a=st.floats(min_value=0.1, max_value=10.0),
    gamma=st.floats(min_value=1.1, max_value=3.0),
)
@settings(max_examples=50, deadline=None)
def test_growth_bounds_with_validator_constants_always_pass(a, gamma):
    law = Isentropic(a=a, gamma=gamma)
    big = max(a * gamma, 1.0 / (a * gamma))
    rep = check_growth_bounds(law, a=big, b=0.0, gamma=gamma,
                              rho_range=(1e-3, 1e3), samples=200)
    assert rep.passed


@given(
    entries=st.lists(st.floats(min_value=-10, max_value=10), min_size=4,
                     max_size=4),
    mu=st.floats(min_value=0.01, max_value=10.0),
    lam=st.floats(min_value=0.0, max_value=10.0),
)
@settings(max_examples=100, deadline=None)
def test_viscous_stress_symmetric_and_linear(entries, mu, lam):
    visc = Viscosity(mu=mu, lam=lam)
    g1 = np.array(entries).reshape(2, 2)
    g2 = g1[::-1].copy()
    s1 = viscous_stress(g1, visc)
    assert np.allclose(s1, s1.T)
    lhs = viscous_stress(g1 + g2, visc)
    rhs = viscous_stress(g1, visc) + viscous_stress(g2, visc)
    assert np.allclose(lhs, rhs, rtol=0, atol=1e-12 * (1 + np.abs(rhs).max()))
