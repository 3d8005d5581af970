"""Pressure laws, pressure potential, viscous stress, and the derivative
growth-bound validator.

Two law families:
- Isentropic: p(rho) = a * rho**gamma with a > 0, gamma >= 1.
- Tabulated: C1 cubic interpolation of (rho_k, p_k) nodes starting at (0, 0);
  optionally shape-preserving (monotone flag) so non-monotone data keeps its
  dips.  Beyond the last node the law continues linearly with the end slope.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline, PchipInterpolator


class LawError(ValueError):
    """Invalid constitutive-law construction or evaluation."""


@dataclass(frozen=True)
class Isentropic:
    a: float
    gamma: float

    def __post_init__(self):
        if not (self.a > 0 and np.isfinite(self.a)):
            raise LawError(f"require a > 0, got {self.a}")
        if not (self.gamma >= 1 and np.isfinite(self.gamma)):
            raise LawError(f"require gamma >= 1, got {self.gamma}")


class Tabulated:
    """Pressure from a table of strictly increasing densities.

    ``monotone=True`` selects shape-preserving (PCHIP) interpolation,
    ``monotone=False`` a natural cubic spline; both are C1 on (0, rho_max).
    The first node must be (0, 0).
    """

    def __init__(self, rho_nodes, p_nodes, monotone: bool = False):
        rho_nodes = np.asarray(rho_nodes, dtype=np.float64)
        p_nodes = np.asarray(p_nodes, dtype=np.float64)
        if rho_nodes.ndim != 1 or rho_nodes.shape != p_nodes.shape:
            raise LawError("node arrays must be 1D and equal length")
        if rho_nodes.size < 3:
            raise LawError("need at least 3 nodes")
        if not np.all(np.diff(rho_nodes) > 0):
            raise LawError("densities must be strictly increasing")
        if rho_nodes[0] != 0.0 or p_nodes[0] != 0.0:
            raise LawError("table must start at the vacuum node (0, 0)")
        if not (np.all(np.isfinite(rho_nodes)) and np.all(np.isfinite(p_nodes))):
            raise LawError("nodes must be finite")
        self.rho_nodes = rho_nodes
        self.p_nodes = p_nodes
        self.monotone = bool(monotone)
        if self.monotone:
            self._interp = PchipInterpolator(rho_nodes, p_nodes, extrapolate=False)
        else:
            self._interp = CubicSpline(rho_nodes, p_nodes, extrapolate=False)
        self._dinterp = self._interp.derivative()
        self.rho_max = float(rho_nodes[-1])
        self._p_end = float(p_nodes[-1])
        self._dp_end = float(self._dinterp(self.rho_max))

    def __eq__(self, other):
        return (
            isinstance(other, Tabulated)
            and self.monotone == other.monotone
            and np.array_equal(self.rho_nodes, other.rho_nodes)
            and np.array_equal(self.p_nodes, other.p_nodes)
        )

    def _eval(self, rho: np.ndarray) -> np.ndarray:
        out = np.where(
            rho > self.rho_max,
            self._p_end + self._dp_end * (rho - self.rho_max),
            self._interp(np.minimum(rho, self.rho_max)),
        )
        return out

    def _deval(self, rho: np.ndarray) -> np.ndarray:
        return np.where(
            rho > self.rho_max,
            self._dp_end,
            self._dinterp(np.minimum(rho, self.rho_max)),
        )


PressureLaw = Union[Isentropic, Tabulated]


@dataclass(frozen=True)
class Viscosity:
    """Shear and bulk-related coefficients; mu > 0 and lam + mu >= 0."""

    mu: float
    lam: float

    def __post_init__(self):
        if not (self.mu > 0 and np.isfinite(self.mu)):
            raise LawError(f"require mu > 0, got {self.mu}")
        if not (self.lam + self.mu >= 0 and np.isfinite(self.lam)):
            raise LawError(f"require lam + mu >= 0, got lam={self.lam}, mu={self.mu}")


@dataclass(frozen=True)
class FluidParams:
    """Pressure law plus viscosities: everything constitutive the solver needs."""

    law: PressureLaw
    visc: Viscosity


@dataclass(frozen=True)
class GrowthBoundReport:
    """Result of checking (1/a) rho**(gamma-1) - b <= p'(rho) <= a rho**(gamma-1) + b."""

    a: float
    b: float
    gamma: float
    rho_min: float
    rho_max: float
    samples: int
    worst_margin: float
    passed: bool


def _as_array(rho) -> tuple[np.ndarray, bool]:
    arr = np.asarray(rho, dtype=np.float64)
    return arr, (arr.ndim == 0)


def pressure(rho, law: PressureLaw):
    """p(rho); accepts scalars or arrays, rejects negative density."""
    arr, scalar = _as_array(rho)
    if np.any(arr < 0):
        raise LawError("pressure requires rho >= 0")
    if isinstance(law, Isentropic):
        out = law.a * np.power(arr, law.gamma)
    else:
        out = law._eval(arr)
    return float(out) if scalar else out


def dpressure(rho, law: PressureLaw):
    """dp/drho; requires rho > 0 (the laws are only C1 away from vacuum)."""
    arr, scalar = _as_array(rho)
    if np.any(arr <= 0):
        raise LawError("dpressure requires rho > 0")
    if isinstance(law, Isentropic):
        out = law.a * law.gamma * np.power(arr, law.gamma - 1.0)
    else:
        out = law._deval(arr)
    return float(out) if scalar else out


def sound_speed(rho, law: PressureLaw):
    """sqrt(max(dp/drho, 0)): clamped so non-monotone laws stay integrable."""
    arr, scalar = _as_array(rho)
    out = np.sqrt(np.maximum(dpressure(arr, law), 0.0))
    return float(out) if scalar else out


def pressure_potential(rho, law: PressureLaw):
    """Potential P with P'(rho) rho - P(rho) = p(rho) and P(0) = 0.

    Isentropic gamma > 1: P = a/(gamma-1) rho**gamma.  Isothermal gamma = 1:
    P = a rho ln rho (0 at vacuum).  Tabulated: P(rho) = rho * integral from
    rho0 to rho of p(s)/s**2 ds with rho0 the first positive node, adaptive
    quadrature at relative tolerance 1e-10.
    """
    arr, scalar = _as_array(rho)
    if np.any(arr < 0):
        raise LawError("pressure_potential requires rho >= 0")
    if isinstance(law, Isentropic):
        if law.gamma > 1.0:
            out = law.a / (law.gamma - 1.0) * np.power(arr, law.gamma)
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                out = np.where(arr > 0, law.a * arr * np.log(np.maximum(arr, 1e-300)), 0.0)
        return float(out) if scalar else out

    rho0 = float(law.rho_nodes[1])

    def one(r: float) -> float:
        if r == 0.0:
            return 0.0
        val, _ = quad(lambda s: pressure(s, law) / s**2, rho0, r,
                      epsrel=1e-10, epsabs=0.0, limit=200)
        return r * val

    out = np.vectorize(one, otypes=[np.float64])(arr)
    return float(out) if scalar else out


def check_growth_bounds(
    law: PressureLaw, a: float, b: float, gamma: float,
    rho_range: tuple[float, float], samples: int = 1000,
) -> GrowthBoundReport:
    """Sample both derivative bounds on a log-spaced grid; advisory only.

    worst_margin is the largest signed violation (positive means some bound
    failed); passed is worst_margin <= 0.
    """
    if not (a > 0 and b >= 0):
        raise LawError(f"require a > 0 and b >= 0, got a={a}, b={b}")
    if samples < 2:
        raise LawError("need at least 2 samples")
    lo, hi = rho_range
    if not (0 < lo < hi):
        raise LawError(f"need 0 < rho_min < rho_max, got {rho_range}")
    rho = np.logspace(np.log10(lo), np.log10(hi), samples)
    dp = dpressure(rho, law)
    power = np.power(rho, gamma - 1.0)
    lower = power / a - b
    upper = a * power + b
    worst = float(np.max(np.maximum(lower - dp, dp - upper)))
    # equality cases (bound touching p') must pass despite rounding in 1/a
    slack = 1e-12 * float(np.max(np.abs(dp))) if dp.size else 0.0
    return GrowthBoundReport(
        a=a, b=b, gamma=gamma, rho_min=lo, rho_max=hi,
        samples=samples, worst_margin=worst, passed=worst <= slack,
    )


def viscous_stress(grad_u: np.ndarray, visc: Viscosity) -> np.ndarray:
    """Full stress mu (G + G^T) + lam tr(G) I for a velocity-gradient tensor."""
    G = np.asarray(grad_u, dtype=np.float64)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise LawError(f"gradient must be a square matrix, got shape {G.shape}")
    if not np.all(np.isfinite(G)):
        raise LawError("gradient entries must be finite")
    return visc.mu * (G + G.T) + visc.lam * np.trace(G) * np.eye(G.shape[0])


def load_tabulated_csv(path, monotone: bool = False) -> Tabulated:
    """Read a two-column (rho, p) CSV; a non-numeric first row is a header."""
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh)):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise LawError(f"{path}:{lineno + 1}: need two columns, got {row}")
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                if lineno == 0:
                    continue  # header
                raise LawError(f"{path}:{lineno + 1}: non-numeric entry {row}")
    if not rows:
        raise LawError(f"{path}: no data rows")
    rho_nodes = [r for r, _ in rows]
    p_nodes = [p for _, p in rows]
    return Tabulated(rho_nodes, p_nodes, monotone=monotone)
