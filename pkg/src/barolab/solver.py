"""Explicit conservative time integration of the viscous barotropic system.

Update structure per step:
- convective part of (density, momentum) via Rusanov fluxes with the pressure
  inside the momentum flux, wave speed |u| + c;
- viscous term as the conservative divergence of the full stress
  mu (grad u + grad u^T) + lam (div u) I, face-based compact normal derivative
  plus averaged transverse derivative;
- forcing as a density-weighted source at cell centers;
- walls: no-slip by odd ghost reflection of momentum, even reflection of
  density (wall mass flux is exactly zero, so mass is conserved to roundoff);
- vacuum: density clamped at the floor, momentum zeroed there, events counted.

Integrators: forward Euler and Heun's method (two-stage strong-stability-
preserving Runge-Kutta, the default).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .constitutive import FluidParams, Isentropic, PressureLaw, dpressure
from .core import Grid, ScalarField, State, VectorField


class ConfigError(ValueError):
    """Invalid scheme or forcing configuration."""


class SolverError(RuntimeError):
    """Hard failure during a step (non-finite values), with location info."""

    def __init__(self, message: str, time: float | None = None,
                 cell: tuple[int, ...] | None = None, detail: str = ""):
        super().__init__(message)
        self.time = time
        self.cell = cell
        self.detail = detail


@dataclass(frozen=True)
class SchemeConfig:
    """Discretization knobs; the flux family is fixed."""

    cfl: float = 0.4
    vacuum_floor: float = 1e-12
    flux: str = "rusanov"
    time_integrator: str = "ssp_rk2"
    use_fast_kernel: bool = True

    def __post_init__(self):
        if not (0.0 < self.cfl <= 1.0):
            raise ConfigError(f"cfl must be in (0, 1], got {self.cfl}")
        if not (self.vacuum_floor > 0.0):
            raise ConfigError(f"vacuum_floor must be positive, got {self.vacuum_floor}")
        if self.flux != "rusanov":
            raise ConfigError(f"unsupported flux {self.flux!r}")
        if self.time_integrator not in ("forward_euler", "ssp_rk2"):
            raise ConfigError(
                f"time_integrator must be 'forward_euler' or 'ssp_rk2', "
                f"got {self.time_integrator!r}"
            )


@dataclass
class StepCounters:
    """Mutable tallies the stepper updates in place."""

    vacuum_clamps: int = 0
    sound_speed_clamps: int = 0


# --- forcing -----------------------------------------------------------------

@dataclass(frozen=True)
class Envelope:
    """Named periodic scalar envelope evaluated on the unit phase.

    kinds: 'const' -> 1; 'sin' -> sin(2 pi harmonic theta + phase);
    'cos' -> cos(2 pi harmonic theta + phase).
    """

    kind: str = "const"
    harmonic: int = 1
    phase: float = 0.0

    def __post_init__(self):
        if self.kind not in ("const", "sin", "cos"):
            raise ConfigError(f"unknown envelope kind {self.kind!r}")
        if self.harmonic < 1:
            raise ConfigError(f"harmonic must be >= 1, got {self.harmonic}")

    def eval(self, theta: float) -> float:
        if self.kind == "const":
            return 1.0
        arg = 2.0 * math.pi * self.harmonic * theta + self.phase
        return math.sin(arg) if self.kind == "sin" else math.cos(arg)

    @property
    def bound(self) -> float:
        return 1.0


def _vector_magnitude_max(f: VectorField) -> float:
    inner = f.interior()
    return float(np.max(np.sqrt(np.sum(inner * inner, axis=0))))


@dataclass(frozen=True)
class ConstantForcing:
    """Time-independent body force per unit mass."""

    f: VectorField
    bound: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "bound", _vector_magnitude_max(self.f))

    def values(self, t: float) -> np.ndarray:
        return self.f.values


@dataclass(frozen=True)
class TimePeriodicForcing:
    """f(t, x) = envelope(t / omega mod 1) * f0(x); periodic by construction."""

    f0: VectorField
    omega: float
    envelope: Envelope = Envelope()
    bound: float = field(init=False)

    def __post_init__(self):
        if not (self.omega > 0):
            raise ConfigError(f"omega must be positive, got {self.omega}")
        object.__setattr__(
            self, "bound", self.envelope.bound * _vector_magnitude_max(self.f0)
        )

    def envelope_at(self, t: float) -> float:
        ratio = t / self.omega
        return self.envelope.eval(ratio - math.floor(ratio))

    def values(self, t: float) -> np.ndarray:
        return self.envelope_at(t) * self.f0.values


def potential_gradient(F: ScalarField) -> VectorField:
    """Cell-centered gradient of a potential: central differences inside,
    one-sided second-order at the wall-adjacent cells (ghosts unused)."""
    grid = F.grid
    inner = F.interior()
    out = np.zeros((grid.dim,) + grid.shape)
    for axis in range(grid.dim):
        d = grid.dx[axis]
        g = np.zeros_like(inner)
        lead = (slice(None),) * axis
        g[lead + (slice(1, -1),)] = (
            inner[lead + (slice(2, None),)] - inner[lead + (slice(None, -2),)]
        ) / (2.0 * d)
        g[lead + (slice(0, 1),)] = (
            -3.0 * inner[lead + (slice(0, 1),)]
            + 4.0 * inner[lead + (slice(1, 2),)]
            - inner[lead + (slice(2, 3),)]
        ) / (2.0 * d)
        g[lead + (slice(-1, None),)] = (
            3.0 * inner[lead + (slice(-1, None),)]
            - 4.0 * inner[lead + (slice(-2, -1),)]
            + inner[lead + (slice(-3, -2),)]
        ) / (2.0 * d)
        out[(axis,) + grid.interior] = g
    return VectorField(grid, out)


@dataclass(frozen=True)
class GradientForcing:
    """Body force derived from a scalar potential, f = grad F."""

    F: ScalarField
    f: VectorField = field(init=False)
    bound: float = field(init=False)

    def __post_init__(self):
        grad = potential_gradient(self.F)
        object.__setattr__(self, "f", grad)
        object.__setattr__(self, "bound", _vector_magnitude_max(grad))

    def values(self, t: float) -> np.ndarray:
        return self.f.values


Forcing = Union[ConstantForcing, TimePeriodicForcing, GradientForcing]

# Optional extra source hook: source(t) -> (d_rho, d_mom) on interior cells,
# used by verification runs with manufactured solutions.
SourceFn = Callable[[float], tuple[np.ndarray, np.ndarray]]


# --- stability ---------------------------------------------------------------

def _interior_speed_fields(state: State, params: FluidParams, floor: float):
    rho = state.rho.interior()
    q = state.mom.interior()
    re = np.maximum(rho, floor)
    u = q / re
    law = params.law
    if isinstance(law, Isentropic):
        if law.gamma == 2.0:
            rg1 = re
        else:
            rg1 = np.power(re, law.gamma - 1.0)
        c = np.sqrt((law.a * law.gamma) * rg1)
    else:
        c = np.sqrt(np.maximum(dpressure(re, law), 0.0))
    return re, u, c


def stable_dt(state: State, params: FluidParams, scheme: SchemeConfig) -> float:
    """cfl * min over cells of min(dx/(|u|+c), dx^2 rho / (2 dim (2 mu + lam)))."""
    grid = state.grid
    re, u, c = _interior_speed_fields(state, params, scheme.vacuum_floor)
    visc_den = 2.0 * grid.dim * (2.0 * params.visc.mu + params.visc.lam)
    dtmin = np.inf
    for axis in range(grid.dim):
        d = grid.dx[axis]
        adv = d / (np.abs(u[axis]) + c)
        viscb = (d * d) * re / visc_den
        dtmin = min(dtmin, float(np.min(np.minimum(adv, viscb))))
    return scheme.cfl * dtmin


# --- boundary fill -----------------------------------------------------------

def fill_ghosts(rho: np.ndarray, q: np.ndarray, grid: Grid):
    """Even reflection for density, odd for every momentum component."""
    g = grid.ghost
    if grid.dim == 1:
        for k in range(g):
            rho[g - 1 - k] = rho[g + k]
            rho[-g + k] = rho[-g - 1 - k]
            q[0, g - 1 - k] = -q[0, g + k]
            q[0, -g + k] = -q[0, -g - 1 - k]
        return
    for k in range(g):
        rho[g - 1 - k, :] = rho[g + k, :]
        rho[-g + k, :] = rho[-g - 1 - k, :]
        q[:, g - 1 - k, :] = -q[:, g + k, :]
        q[:, -g + k, :] = -q[:, -g - 1 - k, :]
    for k in range(g):
        rho[:, g - 1 - k] = rho[:, g + k]
        rho[:, -g + k] = rho[:, -g - 1 - k]
        q[:, :, g - 1 - k] = -q[:, :, g + k]
        q[:, :, -g + k] = -q[:, :, -g - 1 - k]


# --- fluxes ------------------------------------------------------------------

def _pressure_soundspeed(rho: np.ndarray, law: PressureLaw, floor: float,
                         counters: StepCounters | None):
    re = np.maximum(rho, floor)
    if isinstance(law, Isentropic):
        if law.gamma == 2.0:
            rg1 = re
        else:
            rg1 = np.power(re, law.gamma - 1.0)
        p = law.a * rg1 * re
        c = np.sqrt((law.a * law.gamma) * rg1)
    else:
        p = law._eval(re)
        dp = law._deval(re)
        if counters is not None:
            counters.sound_speed_clamps += int(np.count_nonzero(dp < 0.0))
        c = np.sqrt(np.maximum(dp, 0.0))
    return re, p, c


def rusanov_mass_flux_1d(rho: np.ndarray, q: np.ndarray, u: np.ndarray,
                         c: np.ndarray) -> np.ndarray:
    """Mass flux on every face between consecutive cells of ghost-filled
    1D arrays; entry j is the face between cells j and j+1."""
    s = np.maximum(np.abs(u[:-1]) + c[:-1], np.abs(u[1:]) + c[1:])
    return 0.5 * (q[0, :-1] + q[0, 1:]) - 0.5 * s * (rho[1:] - rho[:-1])


def _rhs_1d(rho, q, t, grid, params, forcing, scheme, source, counters):
    """Time derivative on interior cells; mutates ghost entries of rho, q."""
    fill_ghosts(rho, q, grid)
    floor = scheme.vacuum_floor
    re, p, c = _pressure_soundspeed(rho, params.law, floor, counters)
    u = q[0] / re
    dx = grid.dx[0]
    g = grid.ghost

    s = np.maximum(np.abs(u[:-1]) + c[:-1], np.abs(u[1:]) + c[1:])
    frho = 0.5 * (q[0, :-1] + q[0, 1:]) - 0.5 * s * (rho[1:] - rho[:-1])
    fq = 0.5 * ((q[0, :-1] * u[:-1] + p[:-1]) + (q[0, 1:] * u[1:] + p[1:])) \
        - 0.5 * s * (q[0, 1:] - q[0, :-1])

    visc_coef = 2.0 * params.visc.mu + params.visc.lam
    sv = visc_coef * (u[1:] - u[:-1]) / dx

    lo, hi = g, rho.shape[0] - g
    inv_dx = 1.0 / dx
    drho = -(frho[lo:hi] - frho[lo - 1:hi - 1]) * inv_dx
    dq = (-(fq[lo:hi] - fq[lo - 1:hi - 1]) + (sv[lo:hi] - sv[lo - 1:hi - 1])) * inv_dx

    if forcing is not None:
        fvals = forcing.values(t)
        dq = dq + rho[lo:hi] * fvals[0, lo:hi]
    if source is not None:
        g_rho, g_q = source(t)
        drho = drho + g_rho
        dq = dq + g_q[0]
    return drho, dq[np.newaxis, :]


def _cell_gradient_full(u: np.ndarray, axis: int, dx: float) -> np.ndarray:
    """Central derivative along ``axis`` at every cell where both neighbours
    exist; result trimmed by one cell on each side of that axis."""
    sl = [slice(None)] * u.ndim
    sl_hi = list(sl)
    sl_lo = list(sl)
    sl_hi[axis] = slice(2, None)
    sl_lo[axis] = slice(None, -2)
    return (u[tuple(sl_hi)] - u[tuple(sl_lo)]) / (2.0 * dx)


def _rhs_2d(rho, q, t, grid, params, forcing, scheme, source, counters):
    fill_ghosts(rho, q, grid)
    floor = scheme.vacuum_floor
    re, p, c = _pressure_soundspeed(rho, params.law, floor, counters)
    u = q / re
    g = grid.ghost
    dx0, dx1 = grid.dx
    mu, lam = params.visc.mu, params.visc.lam
    visc_norm = 2.0 * mu + lam

    ix = grid.interior
    drho = np.zeros(tuple(c_ for c_ in grid.cells))
    dq = np.zeros((2,) + tuple(c_ for c_ in grid.cells))

    # convective + pressure fluxes, one axis at a time
    for axis, d in ((0, dx0), (1, dx1)):
        lo = tuple(slice(None, -1) if a == axis else slice(None) for a in range(2))
        hi = tuple(slice(1, None) if a == axis else slice(None) for a in range(2))
        un_l, un_r = u[(axis,) + lo], u[(axis,) + hi]
        s = np.maximum(np.abs(un_l) + c[lo], np.abs(un_r) + c[hi])
        frho = 0.5 * (q[(axis,) + lo] + q[(axis,) + hi]) - 0.5 * s * (rho[hi] - rho[lo])
        fq = np.empty((2,) + s.shape)
        for b in range(2):
            fq[b] = 0.5 * ((q[(b,) + lo] * un_l) + (q[(b,) + hi] * un_r)) \
                - 0.5 * s * (q[(b,) + hi] - q[(b,) + lo])
        fq[axis] += 0.5 * (p[lo] + p[hi])

        # faces adjacent to interior cells: left face of interior cell k is
        # face index k-1 in the trimmed face array
        face_l = tuple(
            slice(g - 1, -g) if a == axis else slice(g, -g) for a in range(2)
        )
        face_r = tuple(
            slice(g, rho.shape[a] - g) if a == axis else slice(g, -g) for a in range(2)
        )
        drho -= (frho[face_r] - frho[face_l]) / d
        for b in range(2):
            dq[b] -= (fq[(b,) + face_r] - fq[(b,) + face_l]) / d

    # viscous full-stress fluxes
    for axis, d in ((0, dx0), (1, dx1)):
        other = 1 - axis
        d_other = grid.dx[other]
        lo = tuple(slice(None, -1) if a == axis else slice(None) for a in range(2))
        hi = tuple(slice(1, None) if a == axis else slice(None) for a in range(2))
        # compact normal derivative of both velocity components at the faces
        dn_u = (u[(0,) + hi] - u[(0,) + lo]) / d
        dn_v = (u[(1,) + hi] - u[(1,) + lo]) / d
        # transverse derivative, cell-centered then averaged to the faces
        ct_u = _cell_gradient_full(u[0], other, d_other)
        ct_v = _cell_gradient_full(u[1], other, d_other)
        ft_u = 0.5 * (ct_u[lo] + ct_u[hi])
        ft_v = 0.5 * (ct_v[lo] + ct_v[hi])

        # trim the compact arrays on the transverse axis to match ft_*
        trim = tuple(slice(1, -1) if a == other else slice(None) for a in range(2))
        dn_u_t, dn_v_t = dn_u[trim], dn_v[trim]

        if axis == 0:
            s_nn = visc_norm * dn_u_t + lam * ft_v          # S_xx
            s_nt = mu * (dn_v_t + ft_u)                     # S_xy
            comp_n, comp_t = 0, 1
        else:
            s_nn = visc_norm * dn_v_t + lam * ft_u          # S_yy
            s_nt = mu * (dn_u_t + ft_v)                     # S_yx
            comp_n, comp_t = 1, 0

        # face arrays are trimmed by 1 on the transverse axis: interior cell
        # index J along it maps to trimmed index J - 1
        t_sl = slice(g - 1, -(g - 1) if g > 1 else None)
        face_l = tuple(
            slice(g - 1, -g) if a == axis else t_sl for a in range(2)
        )
        face_r = tuple(
            slice(g, rho.shape[a] - g) if a == axis else t_sl for a in range(2)
        )
        dq[comp_n] += (s_nn[face_r] - s_nn[face_l]) / d
        dq[comp_t] += (s_nt[face_r] - s_nt[face_l]) / d

    if forcing is not None:
        fvals = forcing.values(t)
        for b in range(2):
            dq[b] += rho[ix] * fvals[(b,) + ix]
    if source is not None:
        g_rho, g_q = source(t)
        drho = drho + g_rho
        dq = dq + g_q
    return drho, dq


def _apply_floor(rho_int, q_int, floor, counters):
    clamped = rho_int < floor
    n = int(np.count_nonzero(clamped))
    if n:
        np.maximum(rho_int, floor, out=rho_int)
        if counters is not None:
            counters.vacuum_clamps += n
    vacuum = rho_int <= floor
    if np.any(vacuum):
        q_int[:, vacuum] = 0.0


def _diagnose_nonfinite(rho_int, q_int, time) -> SolverError:
    bad = ~np.isfinite(rho_int)
    what = "density"
    if not bad.any():
        bad = ~np.all(np.isfinite(q_int), axis=0)
        what = "momentum"
    cell = tuple(int(i) for i in np.argwhere(bad)[0])
    return SolverError(
        f"non-finite {what} at interior cell {cell}, t={time}",
        time=time, cell=cell, detail=what,
    )


def step(state: State, params: FluidParams, forcing: Optional[Forcing],
         scheme: SchemeConfig, dt: float,
         source: Optional[SourceFn] = None,
         counters: Optional[StepCounters] = None) -> State:
    """One conservative update by ``dt`` (caller keeps dt <= stable_dt)."""
    grid = state.grid
    rhs = _rhs_1d if grid.dim == 1 else _rhs_2d
    floor = scheme.vacuum_floor
    ix = grid.interior
    qx = (slice(None),) + ix

    rho0 = state.rho.values.copy()
    q0 = state.mom.values.copy()
    t = state.time

    drho, dq = rhs(rho0, q0, t, grid, params, forcing, scheme, source, counters)
    rho1 = rho0.copy()
    q1 = q0.copy()
    rho1[ix] = rho0[ix] + dt * drho
    q1[qx] = q0[qx] + dt * dq
    _apply_floor(rho1[ix], q1[qx], floor, counters)

    if scheme.time_integrator == "ssp_rk2":
        drho2, dq2 = rhs(rho1, q1, t + dt, grid, params, forcing, scheme,
                         source, counters)
        rho2 = rho1[ix] + dt * drho2
        q2 = q1[qx] + dt * dq2
        new_rho = rho1
        new_q = q1
        new_rho[ix] = 0.5 * (rho0[ix] + rho2)
        new_q[qx] = 0.5 * (q0[qx] + q2)
        _apply_floor(new_rho[ix], new_q[qx], floor, counters)
    else:
        new_rho, new_q = rho1, q1

    if not (np.all(np.isfinite(new_rho[ix])) and np.all(np.isfinite(new_q[qx]))):
        raise _diagnose_nonfinite(new_rho[ix], new_q[qx], t + dt)

    return State(
        ScalarField(grid, new_rho), VectorField(grid, new_q), t + dt
    )


# --- observers and the time loop ---------------------------------------------

class SampleObserver:
    """Fires ``callback(state)`` every ``interval`` time units from ``t0``.

    Deadlines are computed as t0 + k * interval (multiplication, not repeated
    addition) so long runs do not accumulate drift.
    """

    def __init__(self, interval: float, callback, t0: float = 0.0,
                 include_start: bool = True):
        if not (interval > 0):
            raise ConfigError(f"sampling interval must be positive, got {interval}")
        self.interval = interval
        self.callback = callback
        self.t0 = t0
        self.include_start = include_start

    def deadlines(self, t_start: float, t_end: float) -> list[float]:
        out: list[float] = []
        k = 0 if self.include_start else 1
        while True:
            t = self.t0 + k * self.interval
            if t > t_end and not math.isclose(t, t_end, rel_tol=1e-12, abs_tol=0.0):
                break
            t = min(t, t_end)
            if t >= t_start and (not out or t != out[-1]):
                out.append(t)
            k += 1
        return out


class TimesObserver:
    """Fires ``callback(state)`` at an explicit list of times."""

    def __init__(self, times: Sequence[float], callback):
        self.times = sorted(float(t) for t in times)
        self.callback = callback

    def deadlines(self, t_start: float, t_end: float) -> list[float]:
        return [t for t in self.times if t_start <= t <= t_end]


def _advance_numpy(state: State, params, forcing, scheme, t_target: float,
                   source, counters, max_steps: int) -> tuple[State, int]:
    steps = 0
    while state.time < t_target:
        if steps >= max_steps:
            raise SolverError(
                f"exceeded {max_steps} steps before reaching t={t_target}",
                time=state.time,
            )
        dt_stable = stable_dt(state, params, scheme)
        remaining = t_target - state.time
        if dt_stable >= remaining:
            state = step(state, params, forcing, scheme, remaining,
                         source, counters)
            state.time = t_target
        else:
            state = step(state, params, forcing, scheme, dt_stable,
                         source, counters)
        steps += 1
    return state, steps


def _kernel_eligible(grid: Grid, params: FluidParams,
                     forcing: Optional[Forcing], scheme: SchemeConfig,
                     source) -> bool:
    if not scheme.use_fast_kernel or grid.dim != 1 or grid.ghost != 1:
        return False
    if not isinstance(params.law, Isentropic):
        return False
    if source is not None:
        return False
    if forcing is None or isinstance(forcing, (ConstantForcing, GradientForcing)):
        return True
    if isinstance(forcing, TimePeriodicForcing):
        return isinstance(forcing.envelope, Envelope)
    return False


def _advance_kernel(state: State, params, forcing, scheme, t_target: float,
                    counters, max_steps: int) -> tuple[State, int]:
    from . import kernels1d

    law = params.law
    if forcing is None:
        mode, fvec, omega, envk, harm, phase = 0, np.zeros(1), 1.0, 0, 1, 0.0
    elif isinstance(forcing, (ConstantForcing, GradientForcing)):
        mode, fvec = 1, np.ascontiguousarray(forcing.values(0.0)[0])
        omega, envk, harm, phase = 1.0, 0, 1, 0.0
    else:
        env = forcing.envelope
        if env.kind == "const":
            mode, fvec = 1, np.ascontiguousarray(forcing.f0.values[0])
            omega, envk, harm, phase = 1.0, 0, 1, 0.0
        else:
            mode = 2
            fvec = np.ascontiguousarray(forcing.f0.values[0])
            omega = forcing.omega
            envk = 1 if env.kind == "sin" else 2
            harm, phase = env.harmonic, env.phase

    rho = state.rho.values
    q = state.mom.values[0]
    t_new, steps, clamps = kernels1d.advance_segment(
        rho, q, state.time, t_target, state.grid.dx[0],
        law.a, law.gamma, params.visc.mu, params.visc.lam,
        scheme.cfl, scheme.vacuum_floor,
        1 if scheme.time_integrator == "ssp_rk2" else 0,
        mode, fvec, omega, envk, harm, phase, max_steps,
    )
    if steps >= max_steps and t_new < t_target:
        raise SolverError(
            f"exceeded {max_steps} steps before reaching t={t_target}", time=t_new
        )
    if counters is not None:
        counters.vacuum_clamps += int(clamps)
    if not (np.all(np.isfinite(rho)) and np.all(np.isfinite(q))):
        raise _diagnose_nonfinite(
            rho[state.grid.interior], q[np.newaxis][(slice(None),) + state.grid.interior],
            t_new,
        )
    state.time = t_new
    return state, int(steps)


def simulate(initial: State, params: FluidParams, forcing: Optional[Forcing],
             scheme: SchemeConfig, t_end: float,
             observers: Sequence = (),
             source: Optional[SourceFn] = None,
             counters: Optional[StepCounters] = None,
             max_steps: int = 200_000_000) -> State:
    """Advance to t_end, hitting every observer deadline exactly.

    dt each step is min(stable_dt, time to next deadline); observer callbacks
    fire when the state time equals their deadline.  Bit-reproducible for
    fixed inputs and configuration.
    """
    if t_end < initial.time:
        raise ConfigError(f"t_end={t_end} is before state time {initial.time}")

    state = initial.copy()
    events: dict[float, list] = {}
    for obs in observers:
        for t in obs.deadlines(state.time, t_end):
            events.setdefault(t, []).append(obs.callback)
    if t_end not in events:
        events[t_end] = []

    for t in sorted(events):
        if t < state.time:
            continue
        budget = max_steps
        if t > state.time:
            if _kernel_eligible(state.grid, params, forcing, scheme, source):
                state, used = _advance_kernel(
                    state, params, forcing, scheme, t, counters, budget)
            else:
                state, used = _advance_numpy(
                    state, params, forcing, scheme, t, source, counters, budget)
        for callback in events[t]:
            callback(state)
    return state


def forcing_power(state: State, forcing: Optional[Forcing],
                  floor: float = 1e-12) -> float:
    """Instantaneous work rate of the body force, integral of rho f . u."""
    if forcing is None:
        return 0.0
    grid = state.grid
    rho = state.rho.interior()
    q = state.mom.interior()
    u = q / np.maximum(rho, floor)
    fvals = forcing.values(state.time)[(slice(None),) + grid.interior]
    return grid.cell_volume * float(np.sum(rho * np.sum(fvals * u, axis=0)))
