"""Measured quantities for long-time runs: energy split, dissipation rate,
the energy-inequality residual, the renormalized-continuity residual, and
the norms/pairings used by the behaviour probes.

All integrals are midpoint sums over interior cells, matching the formal
order of the solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constitutive import Isentropic, PressureLaw, Viscosity, pressure_potential
from .core import Grid, State, VectorField
from .solver import _pressure_soundspeed, fill_ghosts


class DiagnosticsError(ValueError):
    """Inconsistent inputs to a diagnostic computation."""


@dataclass(frozen=True)
class EnergyRecord:
    """Energy split at one instant; total is kinetic + potential by
    construction.  dissipation and power are the instantaneous rates."""

    time: float
    kinetic: float
    potential: float
    dissipation: float = 0.0
    power: float = 0.0

    def __post_init__(self):
        vals = (self.time, self.kinetic, self.potential, self.dissipation, self.power)
        if not all(np.isfinite(v) for v in vals):
            raise DiagnosticsError(f"non-finite energy record entries: {vals}")
        if self.kinetic < 0:
            raise DiagnosticsError(f"kinetic energy must be >= 0, got {self.kinetic}")
        if self.dissipation < 0:
            raise DiagnosticsError(f"dissipation must be >= 0, got {self.dissipation}")

    @property
    def total(self) -> float:
        return self.kinetic + self.potential


def total_energy(state: State, law: PressureLaw,
                 floor: float = 1e-12) -> EnergyRecord:
    """Kinetic part: integral of |q|^2 / (2 rho); potential part: integral of
    the pressure potential of the density."""
    grid = state.grid
    rho = state.rho.interior()
    q = state.mom.interior()
    re = np.maximum(rho, floor)
    kinetic = grid.cell_volume * float(np.sum(0.5 * np.sum(q * q, axis=0) / re))
    if isinstance(law, Isentropic):
        pot = pressure_potential(rho, law)
    else:
        pot = pressure_potential(re, law)
    potential = grid.cell_volume * float(np.sum(pot))
    return EnergyRecord(time=state.time, kinetic=kinetic, potential=potential)


def _ghost_filled_velocity(state: State, floor: float) -> np.ndarray:
    rho = state.rho.values.copy()
    q = state.mom.values.copy()
    fill_ghosts(rho, q, state.grid)
    return q / np.maximum(rho, floor)


def _cell_gradients(u: np.ndarray, grid: Grid) -> np.ndarray:
    """grad[a, b] = d u_b / d x_a at interior cells, central differences on
    ghost-filled velocity (odd reflection encodes the wall value u = 0)."""
    dim = grid.dim
    g = grid.ghost
    grads = np.empty((dim, dim) + tuple(grid.cells))
    for axis in range(dim):
        d = grid.dx[axis]
        hi = tuple(
            slice(g + 1, grid.shape[a] - g + 1) if a == axis else slice(g, -g)
            for a in range(dim)
        )
        lo = tuple(
            slice(g - 1, grid.shape[a] - g - 1) if a == axis else slice(g, -g)
            for a in range(dim)
        )
        for b in range(dim):
            grads[axis, b] = (u[(b,) + hi] - u[(b,) + lo]) / (2.0 * d)
    return grads


def dissipation_rate(state: State, visc: Viscosity,
                     floor: float = 1e-12) -> float:
    """Integral of mu |grad u|^2 + (lam + mu) |div u|^2, never negative."""
    grid = state.grid
    u = _ghost_filled_velocity(state, floor)
    grads = _cell_gradients(u, grid)
    frob = np.sum(grads * grads, axis=(0, 1))
    div = np.zeros_like(frob)
    for a in range(grid.dim):
        div += grads[a, a]
    integrand = visc.mu * frob + (visc.lam + visc.mu) * div * div
    return grid.cell_volume * float(np.sum(integrand))


def energy_inequality_residual(records) -> tuple[np.ndarray, float]:
    """Per-interval residual (E_{k+1} - E_k)/dt + mean dissipation - mean
    power; the continuum inequality predicts <= 0 up to discretization error.
    Returns (residual sequence, max residual)."""
    if len(records) < 2:
        raise DiagnosticsError("need at least 2 energy records")
    t = np.array([r.time for r in records])
    if not np.all(np.diff(t) > 0):
        raise DiagnosticsError("record times must be strictly increasing")
    E = np.array([r.total for r in records])
    D = np.array([r.dissipation for r in records])
    W = np.array([r.power for r in records])
    dt = np.diff(t)
    res = np.diff(E) / dt + 0.5 * (D[:-1] + D[1:]) - 0.5 * (W[:-1] + W[1:])
    return res, float(np.max(res))


@dataclass(frozen=True)
class RenormFunction:
    """C1 truncation used to probe the renormalized continuity relation:
    identity below M, quadratic ramp to the plateau 3M/2 at 2M (slope 0),
    constant beyond.  The derivative stays within [0, 1] and vanishes
    identically past 2M."""

    M: float

    def __post_init__(self):
        if not (self.M > 0):
            raise DiagnosticsError(f"truncation level must be positive, got {self.M}")

    def value(self, rho):
        rho = np.asarray(rho, dtype=np.float64)
        s = (rho - self.M) / self.M
        ramp = self.M * (1.0 + s - 0.5 * s * s)
        return np.where(rho <= self.M, rho,
                        np.where(rho >= 2.0 * self.M, 1.5 * self.M, ramp))

    def deriv(self, rho):
        rho = np.asarray(rho, dtype=np.float64)
        s = (rho - self.M) / self.M
        return np.where(rho <= self.M, 1.0,
                        np.where(rho >= 2.0 * self.M, 0.0, 1.0 - s))


def _axis_mass_fluxes(rho, q, u, c, axis):
    """Rusanov mass flux on every face along ``axis`` of ghost-filled arrays,
    identical in form to the solver's convective mass flux."""
    dim = rho.ndim
    lo = tuple(slice(None, -1) if a == axis else slice(None) for a in range(dim))
    hi = tuple(slice(1, None) if a == axis else slice(None) for a in range(dim))
    un_l, un_r = u[(axis,) + lo], u[(axis,) + hi]
    s = np.maximum(np.abs(un_l) + c[lo], np.abs(un_r) + c[hi])
    return 0.5 * (q[(axis,) + lo] + q[(axis,) + hi]) - 0.5 * s * (rho[hi] - rho[lo])


def renorm_residual(before: State, after: State, velocity: VectorField,
                    bfun: RenormFunction, law: PressureLaw,
                    floor: float = 1e-12) -> float:
    """L1 norm per unit time of the discrete truncated-continuity residual.

    The truncated flux reuses the solver's Rusanov mass flux of the earlier
    state, scaled by b(rho)/rho taken from the upwind side, so in the identity
    region the residual collapses to the scheme's own mass update (zero to
    roundoff for a forward-Euler step).  The extra (b'(rho) rho - b(rho))
    div u term uses central differences of the supplied velocity.
    """
    if before.grid != after.grid or before.grid != velocity.grid:
        raise DiagnosticsError("states and velocity must share one grid")
    dt = after.time - before.time
    if not (dt > 0):
        raise DiagnosticsError(f"need after.time > before.time, got dt={dt}")
    grid = before.grid
    g = grid.ghost
    ix = grid.interior

    rho0 = before.rho.values.copy()
    q0 = before.mom.values.copy()
    fill_ghosts(rho0, q0, grid)
    re = np.maximum(rho0, floor)
    u0 = q0 / re
    _, _, c = _pressure_soundspeed(rho0, law, floor, None)

    bval = bfun.value(rho0)
    ratio = bval / re

    # accumulate dt-scaled so the identity case cancels the scheme's own
    # update to roundoff; arithmetic mirrors the solver's flux divergence
    residual = bfun.value(after.rho.values[ix]) - bval[ix]

    divg = np.zeros(tuple(grid.cells))
    for axis in range(grid.dim):
        fmass = _axis_mass_fluxes(rho0, q0, u0, c, axis)
        dim = grid.dim
        lo = tuple(slice(None, -1) if a == axis else slice(None) for a in range(dim))
        hi = tuple(slice(1, None) if a == axis else slice(None) for a in range(dim))
        gflux = fmass * np.where(fmass >= 0.0, ratio[lo], ratio[hi])
        face_l = tuple(
            slice(g - 1, -g) if a == axis else slice(g, -g) for a in range(dim)
        )
        face_r = tuple(
            slice(g, rho0.shape[a] - g) if a == axis else slice(g, -g)
            for a in range(dim)
        )
        diff = gflux[face_r] - gflux[face_l]
        if dim == 1:
            divg += diff * (1.0 / grid.dx[axis])
        else:
            divg += diff / grid.dx[axis]
    residual = residual + dt * divg

    # (b' rho - b) div u with the caller's velocity, odd-reflected at walls
    uv = velocity.values.copy()
    rtmp = rho0.copy()
    fill_ghosts(rtmp, uv, grid)
    div = np.zeros(tuple(grid.cells))
    for axis in range(grid.dim):
        hi = tuple(
            slice(g + 1, grid.shape[a] - g + 1) if a == axis else slice(g, -g)
            for a in range(grid.dim)
        )
        lo = tuple(
            slice(g - 1, grid.shape[a] - g - 1) if a == axis else slice(g, -g)
            for a in range(grid.dim)
        )
        div += (uv[(axis,) + hi] - uv[(axis,) + lo]) / (2.0 * grid.dx[axis])
    residual = residual + dt * ((bfun.deriv(rho0[ix]) * rho0[ix] - bval[ix]) * div)

    return grid.cell_volume * float(np.sum(np.abs(residual))) / dt


def lp_distance(field_a, field_b, alpha: float) -> float:
    """L^alpha distance of two fields; vector fields compare pointwise
    Euclidean magnitudes of the difference."""
    if alpha < 1:
        raise DiagnosticsError(f"alpha must be >= 1, got {alpha}")
    if field_a.grid != field_b.grid:
        raise DiagnosticsError("fields must share one grid")
    a = field_a.interior()
    b = field_b.interior()
    diff = a - b
    if diff.ndim == field_a.grid.dim + 1:
        mag = np.sqrt(np.sum(diff * diff, axis=0))
    else:
        mag = np.abs(diff)
    vol = field_a.grid.cell_volume
    return float((vol * np.sum(mag**alpha)) ** (1.0 / alpha))


def weak_pairing(mom_a: VectorField, mom_b: VectorField,
                 phi: VectorField) -> float:
    """Integral of (A - B) . phi over the interior."""
    if mom_a.grid != mom_b.grid or mom_a.grid != phi.grid:
        raise DiagnosticsError("fields must share one grid")
    diff = mom_a.interior() - mom_b.interior()
    return mom_a.grid.cell_volume * float(np.sum(diff * phi.interior()))
