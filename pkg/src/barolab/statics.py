"""Hydrostatic density profiles under a potential force f = grad F.

On the support the momentum balance integrates to a first-order identity
between density and potential; the one free constant is pinned by total
mass via bisection on a monotone map.  Level-set connectivity of F is
checked by union-find on the cell adjacency graph.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Grid, ScalarField


class StaticsError(ValueError):
    """Invalid static-problem configuration or failed root find."""


@dataclass(frozen=True)
class StaticSolution:
    """Mass-matched hydrostatic profile.

    On {rho_s > 0} the profile satisfies a*gamma/(gamma-1) rho_s**(gamma-1)
    = F - c pointwise by construction.
    """

    rho_s: ScalarField
    c: float
    mass_error: float
    support_connected: bool


@dataclass(frozen=True)
class LevelSetReport:
    connected_all: bool
    first_disconnected_level: Optional[float]
    levels_checked: int


def _even_fill(values: np.ndarray, grid: Grid) -> None:
    """Mirror interior cells into the ghost ring (zero normal derivative)."""
    g = grid.ghost
    for axis in range(grid.dim):
        for k in range(g):
            src_lo = [slice(None)] * grid.dim
            dst_lo = [slice(None)] * grid.dim
            src_hi = [slice(None)] * grid.dim
            dst_hi = [slice(None)] * grid.dim
            dst_lo[axis] = g - 1 - k
            src_lo[axis] = g + k
            dst_hi[axis] = values.shape[axis] - g + k
            src_hi[axis] = values.shape[axis] - g - 1 - k
            values[tuple(dst_lo)] = values[tuple(src_lo)]
            values[tuple(dst_hi)] = values[tuple(src_hi)]


def _profile(F: np.ndarray, c: float, a: float, gamma: float) -> np.ndarray:
    base = np.maximum(F - c, 0.0) * ((gamma - 1.0) / (a * gamma))
    return np.power(base, 1.0 / (gamma - 1.0))


def _component_count(mask: np.ndarray) -> int:
    """Connected components of True cells under face adjacency (union-find)."""
    idx = -np.ones(mask.shape, dtype=np.int64)
    flat = np.flatnonzero(mask)
    if flat.size == 0:
        return 0
    idx.ravel()[flat] = np.arange(flat.size)
    parent = np.arange(flat.size)

    def find(i: int) -> int:
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    def union(i: int, j: int) -> None:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri

    for axis in range(mask.ndim):
        lo = tuple(
            slice(None, -1) if ax == axis else slice(None) for ax in range(mask.ndim)
        )
        hi = tuple(
            slice(1, None) if ax == axis else slice(None) for ax in range(mask.ndim)
        )
        both = mask[lo] & mask[hi]
        for i, j in zip(idx[lo][both], idx[hi][both]):
            union(int(i), int(j))

    return len({find(int(i)) for i in range(flat.size)})


def solve_static(F: ScalarField, m: float, a: float, gamma: float,
                 tol: float = 1e-10, max_iter: int = 200) -> StaticSolution:
    """Mass-m hydrostatic profile for potential F, pressure coefficient a,
    adiabatic exponent gamma > 1.

    The constant c is found by bisection on the strictly decreasing map
    c -> mass(c), bracketed by [min F - K, max F] where K is chosen so the
    lower endpoint already holds at least the uniform density m/|Omega|
    everywhere.  Converges to |mass - m| <= tol * m.
    """
    if not (gamma > 1.0):
        raise StaticsError(f"static profile needs gamma > 1, got {gamma}")
    if not (m > 0):
        raise StaticsError(f"target mass must be positive, got {m}")
    if not (a > 0):
        raise StaticsError(f"pressure coefficient must be positive, got {a}")
    grid = F.grid
    fint = F.interior()
    vol = grid.cell_volume

    def mass_of(c: float) -> float:
        return vol * float(np.sum(_profile(fint, c, a, gamma)))

    K = (a * gamma / (gamma - 1.0)) * (m / grid.volume) ** (gamma - 1.0)
    lo = float(np.min(fint)) - K
    hi = float(np.max(fint))
    c = lo
    err = abs(mass_of(c) - m)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        mm = mass_of(mid)
        if abs(mm - m) < err:
            c, err = mid, abs(mm - m)
        if err <= tol * m:
            break
        if mm > m:
            lo = mid
        else:
            hi = mid
    else:
        raise StaticsError(
            f"bisection did not reach |mass - m| <= {tol * m} in {max_iter} "
            f"iterations (best error {err})"
        )

    values = np.zeros(grid.shape)
    values[grid.interior] = _profile(fint, c, a, gamma)
    _even_fill(values, grid)
    connected = _component_count(fint > c) <= 1
    return StaticSolution(
        rho_s=ScalarField(grid, values), c=c, mass_error=err,
        support_connected=connected,
    )


def check_level_sets(F: ScalarField, levels: int = 64) -> LevelSetReport:
    """Sample ``levels`` thresholds strictly between min F and max F and
    count connected components of each superlevel cell set {F > k}."""
    if levels < 1:
        raise StaticsError(f"need at least 1 level, got {levels}")
    fint = F.interior()
    fmin, fmax = float(np.min(fint)), float(np.max(fint))
    for j in range(1, levels + 1):
        k = fmin + j * (fmax - fmin) / (levels + 1)
        if _component_count(fint > k) > 1:
            return LevelSetReport(
                connected_all=False, first_disconnected_level=k,
                levels_checked=levels,
            )
    return LevelSetReport(
        connected_all=True, first_disconnected_level=None, levels_checked=levels
    )


def static_residual(sol: StaticSolution, F: ScalarField, a: float,
                    gamma: float) -> float:
    """L1 norm of a grad(rho_s**gamma) - rho_s grad F by central differences,
    restricted to support cells whose neighbours along every axis exist and
    are also in the support (the closed form kinks at the vacuum edge)."""
    grid = sol.rho_s.grid
    rho = sol.rho_s.interior()
    fint = F.interior()
    mask = rho > 0.0

    valid = mask.copy()
    for axis in range(grid.dim):
        first = tuple(0 if ax == axis else slice(None) for ax in range(grid.dim))
        last = tuple(-1 if ax == axis else slice(None) for ax in range(grid.dim))
        valid[first] = False
        valid[last] = False
        shifted_lo = np.zeros_like(mask)
        shifted_hi = np.zeros_like(mask)
        lo = tuple(
            slice(None, -1) if ax == axis else slice(None) for ax in range(grid.dim)
        )
        hi = tuple(
            slice(1, None) if ax == axis else slice(None) for ax in range(grid.dim)
        )
        shifted_lo[hi] = mask[lo]
        shifted_hi[lo] = mask[hi]
        valid &= shifted_lo & shifted_hi

    if not np.any(valid):
        return 0.0

    rg = np.power(rho, gamma)
    sq = np.zeros(rho.shape)
    for axis in range(grid.dim):
        d_rg = np.gradient(rg, grid.dx[axis], axis=axis)
        d_f = np.gradient(fint, grid.dx[axis], axis=axis)
        comp = a * d_rg - rho * d_f
        sq += comp * comp
    res = np.sqrt(sq)
    return grid.cell_volume * float(np.sum(res[valid]))


# --- potential construction ---------------------------------------------------

def make_potential(grid: Grid, spec: dict) -> ScalarField:
    """Build a potential field from a config mapping.

    Families: {"family": "linear", "slopes": [...], "offset": 0.0},
    {"family": "cosine", "amplitude": A, "modes": [...]} with modes counted in
    half-waves per axis (0 drops the axis), and {"family": "radial_bump",
    "amplitude": A, "center": [...], "width": w}.  Alternatively
    {"csv": path} loads a grid dump written as coordinate columns plus F.
    """
    if "csv" in spec:
        return load_potential_csv(grid, spec["csv"])
    family = spec.get("family")
    coords = grid.centers()
    if family == "linear":
        slopes = spec.get("slopes")
        if slopes is None or len(slopes) != grid.dim:
            raise StaticsError(f"linear potential needs {grid.dim} slopes")
        vals = np.full(tuple(grid.cells), float(spec.get("offset", 0.0)))
        for axis in range(grid.dim):
            vals = vals + float(slopes[axis]) * coords[axis]
    elif family == "cosine":
        amp = float(spec.get("amplitude", 1.0))
        modes = spec.get("modes")
        if modes is None or len(modes) != grid.dim:
            raise StaticsError(f"cosine potential needs {grid.dim} modes")
        vals = np.full(tuple(grid.cells), amp)
        for axis in range(grid.dim):
            k = int(modes[axis])
            if k:
                vals = vals * np.cos(
                    np.pi * k * coords[axis] / grid.extents[axis]
                )
    elif family == "radial_bump":
        amp = float(spec.get("amplitude", 1.0))
        width = float(spec.get("width", 0.25))
        center = spec.get("center")
        if center is None or len(center) != grid.dim:
            raise StaticsError(f"radial bump needs a {grid.dim}-entry center")
        if width <= 0:
            raise StaticsError(f"radial bump needs width > 0, got {width}")
        r2 = np.zeros(tuple(grid.cells))
        for axis in range(grid.dim):
            r2 = r2 + (coords[axis] - float(center[axis])) ** 2
        vals = amp * np.exp(-r2 / width**2)
    else:
        raise StaticsError(f"unknown potential family {family!r}")

    values = np.zeros(grid.shape)
    values[grid.interior] = vals
    _even_fill(values, grid)
    return ScalarField(grid, values)


def load_potential_csv(grid: Grid, path: str) -> ScalarField:
    """Read a potential grid dump: one row per cell in row-major order,
    coordinate columns then the value; a header row is tolerated."""
    rows: list[list[float]] = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row:
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                if i == 0:
                    continue
                raise StaticsError(f"non-numeric row {i} in {path}")
    n_cells = int(np.prod(grid.cells))
    if len(rows) != n_cells:
        raise StaticsError(
            f"{path}: expected {n_cells} rows for this grid, got {len(rows)}"
        )
    data = np.asarray(rows)
    if data.shape[1] != grid.dim + 1:
        raise StaticsError(
            f"{path}: expected {grid.dim + 1} columns, got {data.shape[1]}"
        )
    if not np.all(np.isfinite(data)):
        raise StaticsError(f"{path}: non-finite entries")
    coords = [c.ravel() for c in grid.centers()]
    for axis in range(grid.dim):
        scale = max(grid.extents[axis], 1.0)
        if np.max(np.abs(data[:, axis] - coords[axis])) > 1e-9 * scale:
            raise StaticsError(
                f"{path}: column {axis} does not match this grid's cell centers"
            )
    vals = data[:, grid.dim].reshape(tuple(grid.cells))
    values = np.zeros(grid.shape)
    values[grid.interior] = vals
    _even_fill(values, grid)
    return ScalarField(grid, values)
