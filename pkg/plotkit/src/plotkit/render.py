"""Deterministic figure rendering for the four supported plot kinds."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .readers import SchemaError, read_snapshots, read_table

KINDS = ("energy_decay", "convergence_curve", "profile_snapshots",
         "periodic_residual")

# pinned style: same inputs must give pixel-identical output
STYLE = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
    "legend.framealpha": 0.9,
}
_METADATA = {"Software": "plotkit"}


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    inputs: tuple[str, ...]
    out_path: str
    log_x: bool = False
    log_y: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(
                f"unknown plot kind {self.kind!r}; expected one of {KINDS}")
        if not self.inputs:
            raise SchemaError("at least one input path is required")
        object.__setattr__(self, "inputs", tuple(self.inputs))


def _label(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


def _apply_log(ax, spec: PlotSpec, y_default: bool = False) -> None:
    if spec.log_x:
        ax.set_xscale("log")
    if spec.log_y or y_default:
        ax.set_yscale("log")


def _energy_decay(spec: PlotSpec, fig) -> None:
    ax = fig.subplots()
    many = len(spec.inputs) > 1
    for path in spec.inputs:
        table = read_table(path, "series")
        t = table.columns["t"]
        suffix = f" [{_label(path)}]" if many else ""
        ax.plot(t, table.columns["E"], label="total" + suffix)
        ax.plot(t, table.columns["kinetic"], "--", label="kinetic" + suffix)
        ax.plot(t, table.columns["potential"], ":", label="potential" + suffix)
    ax.set_xlabel("t")
    ax.set_ylabel("energy")
    ax.legend()
    _apply_log(ax, spec)


def _convergence_curve(spec: PlotSpec, fig) -> None:
    # optional second input: the hydrostatic profile the errors refer to
    if len(spec.inputs) > 2:
        raise SchemaError("convergence_curve takes the error series and "
                          "optionally the static profile")
    if len(spec.inputs) == 2:
        ax, ax_ref = fig.subplots(1, 2, width_ratios=[2, 1])
        profile = read_table(spec.inputs[1], "static_profile")
        ax_ref.plot(profile.columns["x0"], profile.columns["rho_s"],
                    color="tab:green")
        ax_ref.set_xlabel("x")
        ax_ref.set_ylabel("reference density profile")
    else:
        ax = fig.subplots()
        ax.set_title("errors vs mass-matched hydrostatic profile")
    table = read_table(spec.inputs[0], "steady_convergence")
    t = table.columns["t"]
    ax.plot(t, table.columns["e_rho"], label="density error")
    ax.plot(t, table.columns["e_q"], "--", label="momentum error")
    ax.set_xlabel("t")
    ax.set_ylabel("error")
    ax.legend()
    _apply_log(ax, spec, y_default=True)


def _profile_snapshots(spec: PlotSpec, fig) -> None:
    ax = fig.subplots()
    for path in spec.inputs:
        for snap in read_snapshots(path):
            cells = snap["grid"]["cells"]
            extent = snap["grid"]["extents"][0]
            x = (np.arange(cells[0]) + 0.5) * (extent / cells[0])
            rho = np.asarray(snap["rho"], dtype=float)
            if len(cells) == 2:
                rho = rho[:, cells[1] // 2]  # midline cut along axis 0
            ax.plot(x, rho, label=f"t={snap['t']:g}")
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    ax.legend(fontsize=7)
    _apply_log(ax, spec)


def _periodic_residual(spec: PlotSpec, fig) -> None:
    ax = fig.subplots()
    many = len(spec.inputs) > 1
    for path in spec.inputs:
        table = read_table(path, "periodic_residual")
        suffix = f" [{_label(path)}]" if many else ""
        ax.plot(table.columns["k"], table.columns["delta_rho"], marker="o",
                label="density shift residual" + suffix)
        ax.plot(table.columns["k"], table.columns["delta_mom"], marker="s",
                linestyle="--", label="momentum shift residual" + suffix)
    ax.set_xlabel("period index k")
    ax.set_ylabel("period-to-period L1 distance")
    ax.legend()
    _apply_log(ax, spec)


_RENDERERS = {
    "energy_decay": _energy_decay,
    "convergence_curve": _convergence_curve,
    "profile_snapshots": _profile_snapshots,
    "periodic_residual": _periodic_residual,
}


def render(spec: PlotSpec) -> str:
    """Render the figure for spec and return the written image path."""
    with plt.rc_context(STYLE):
        fig = plt.figure()
        try:
            _RENDERERS[spec.kind](spec, fig)
            fig.tight_layout()
            fig.savefig(spec.out_path, metadata=_METADATA)
        finally:
            plt.close(fig)
    return spec.out_path
