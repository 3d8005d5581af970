"""Grids, fields, and state containers shared by the solver and diagnostics.

Layout conventions:
- Uniform rectilinear grid over a box, 1D or 2D.
- Field arrays include ghost layers on every side; C (row-major) order,
  axis 0 slowest.  Interior cell k sits at center (k + 0.5) * dx.
- Density and momentum are colocated at cell centers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

DEFAULT_VACUUM_FLOOR = 1e-12


class GridError(ValueError):
    """Invalid grid construction parameters."""


class FieldError(ValueError):
    """Field values inconsistent with their grid or non-finite."""


class InitialDataError(ValueError):
    """Initial data violates positivity or the vacuum compatibility rule.

    Carries ``violations``: a list of (cell_index, condition) pairs.
    """

    def __init__(self, message: str, violations: list[tuple[tuple[int, ...], str]]):
        super().__init__(message)
        self.violations = violations


@dataclass(frozen=True)
class Grid:
    """Uniform box grid with ghost layers.

    ``extents[i]`` is the physical length of axis i, ``cells[i]`` the interior
    cell count, ``dx[i] = extents[i] / cells[i]``, ``ghost`` the ghost-layer
    width (>= 1) applied on every side of every axis.
    """

    dim: int
    extents: tuple[float, ...]
    cells: tuple[int, ...]
    ghost: int
    dx: tuple[float, ...] = field(init=False)

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise GridError(f"dim must be 1 or 2, got {self.dim}")
        if len(self.extents) != self.dim or len(self.cells) != self.dim:
            raise GridError("extents and cells must have one entry per axis")
        if any(e <= 0 or not np.isfinite(e) for e in self.extents):
            raise GridError(f"extents must be positive and finite, got {self.extents}")
        if any(c < 4 for c in self.cells):
            raise GridError(f"need at least 4 cells per axis, got {self.cells}")
        if self.ghost < 1:
            raise GridError(f"ghost width must be >= 1, got {self.ghost}")
        object.__setattr__(
            self, "dx", tuple(e / c for e, c in zip(self.extents, self.cells))
        )

    @property
    def shape(self) -> tuple[int, ...]:
        """Full array shape including ghost layers."""
        return tuple(c + 2 * self.ghost for c in self.cells)

    @property
    def interior(self) -> tuple[slice, ...]:
        """Slices selecting the interior cells of a full array."""
        g = self.ghost
        return tuple(slice(g, g + c) for c in self.cells)

    @property
    def cell_volume(self) -> float:
        vol = 1.0
        for d in self.dx:
            vol *= d
        return vol

    @property
    def volume(self) -> float:
        vol = 1.0
        for e in self.extents:
            vol *= e
        return vol

    def axis_centers(self, axis: int) -> np.ndarray:
        """Interior cell-center coordinates along one axis."""
        n = self.cells[axis]
        d = self.dx[axis]
        return (np.arange(n) + 0.5) * d

    def centers(self) -> tuple[np.ndarray, ...]:
        """Interior cell-center coordinate arrays, broadcastable to shape."""
        axes = [self.axis_centers(i) for i in range(self.dim)]
        if self.dim == 1:
            return (axes[0],)
        return tuple(np.meshgrid(*axes, indexing="ij"))


def make_grid(dim: int, extents, cells, ghost: int = 1) -> Grid:
    """Build a validated uniform grid."""
    return Grid(dim=dim, extents=tuple(float(e) for e in extents),
                cells=tuple(int(c) for c in cells), ghost=int(ghost))


def _check_finite(values: np.ndarray, what: str):
    if not np.all(np.isfinite(values)):
        bad = np.argwhere(~np.isfinite(values))
        raise FieldError(f"{what} contains non-finite entries, first at {tuple(bad[0])}")


@dataclass(eq=False)
class ScalarField:
    """One real value per cell (interior + ghosts)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.shape:
            raise FieldError(
                f"scalar field shape {self.values.shape} != grid shape {self.grid.shape}"
            )
        _check_finite(self.values, "scalar field")

    @classmethod
    def zeros(cls, grid: Grid) -> "ScalarField":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def full(cls, grid: Grid, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(value)))

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "ScalarField":
        """Sample ``fn(*coords)`` at interior cell centers; ghosts start at 0."""
        values = np.zeros(grid.shape)
        values[grid.interior] = fn(*grid.centers())
        return cls(grid, values)

    def interior(self) -> np.ndarray:
        return self.values[self.grid.interior]

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())


@dataclass(eq=False)
class VectorField:
    """``dim`` real values per cell; component axis leads."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        expected = (self.grid.dim,) + self.grid.shape
        if self.values.shape != expected:
            raise FieldError(
                f"vector field shape {self.values.shape} != expected {expected}"
            )
        _check_finite(self.values, "vector field")

    @classmethod
    def zeros(cls, grid: Grid) -> "VectorField":
        return cls(grid, np.zeros((grid.dim,) + grid.shape))

    @classmethod
    def from_functions(cls, grid: Grid, fns) -> "VectorField":
        """Sample one function per component at interior cell centers."""
        if len(fns) != grid.dim:
            raise FieldError(f"need {grid.dim} component functions, got {len(fns)}")
        values = np.zeros((grid.dim,) + grid.shape)
        coords = grid.centers()
        for k, fn in enumerate(fns):
            values[(k,) + grid.interior] = fn(*coords)
        return cls(grid, values)

    def interior(self) -> np.ndarray:
        return self.values[(slice(None),) + self.grid.interior]

    def copy(self) -> "VectorField":
        return VectorField(self.grid, self.values.copy())


@dataclass(eq=False)
class State:
    """Density and momentum on a shared grid at one instant."""

    rho: ScalarField
    mom: VectorField
    time: float = 0.0

    def __post_init__(self):
        if self.rho.grid is not self.mom.grid and self.rho.grid != self.mom.grid:
            raise FieldError("density and momentum must share a grid")

    @property
    def grid(self) -> Grid:
        return self.rho.grid

    def copy(self) -> "State":
        return State(self.rho.copy(), self.mom.copy(), self.time)


@dataclass(eq=False)
class InitialData:
    """Candidate initial fields, not yet validated."""

    rho_I: ScalarField
    q_I: VectorField


def validate_initial_data(
    data: InitialData, floor: float = DEFAULT_VACUUM_FLOOR
) -> State:
    """Check positivity, positive mass, and momentum-free vacuum; return a State.

    Rejections raise InitialDataError listing every offending interior cell:
    negative density anywhere, or nonzero momentum on cells with density at or
    below ``floor``.
    """
    if data.rho_I.grid != data.q_I.grid:
        raise FieldError("initial density and momentum must share a grid")
    grid = data.rho_I.grid
    rho = data.rho_I.interior()
    q = data.q_I.interior()

    violations: list[tuple[tuple[int, ...], str]] = []
    for idx in np.argwhere(rho < 0.0):
        violations.append((tuple(int(i) for i in idx), "negative density"))
    vacuum = rho <= floor
    moving = np.any(q != 0.0, axis=0)
    for idx in np.argwhere(vacuum & moving):
        violations.append((tuple(int(i) for i in idx), "nonzero momentum on vacuum cell"))
    if violations:
        raise InitialDataError(
            f"initial data rejected with {len(violations)} violation(s), "
            f"first: cell {violations[0][0]}, {violations[0][1]}",
            violations,
        )

    state = State(data.rho_I.copy(), data.q_I.copy(), 0.0)
    if total_mass(state) <= 0.0:
        raise InitialDataError("initial data rejected: total mass must be positive", [])
    return state


def total_mass(state: State) -> float:
    """Midpoint-quadrature mass over interior cells."""
    return state.grid.cell_volume * float(np.sum(state.rho.interior()))
