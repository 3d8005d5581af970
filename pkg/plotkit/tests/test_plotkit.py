import numpy as np
import pytest

from plotkit import (PlotSpec, SchemaError, read_snapshots, read_table,
                     render, serialize_snapshots, serialize_table)
from plotkit.cli import cli

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def read_bytes(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


# --- format round trip: parse then re-serialize reproduces the exact bytes ---

@pytest.mark.parametrize("key,kind", [
    ("series", "series"),
    ("rest_series", "series"),
    ("periodic_residual", "periodic_residual"),
    ("shift_distances", "shift_distances"),
    ("steady_convergence", "steady_convergence"),
    ("static_profile", "static_profile"),
])
def test_table_round_trip_is_bit_exact(outputs, key, kind):
    path = outputs[key]
    table = read_table(path, kind)
    assert serialize_table(table).encode() == read_bytes(path)


def test_snapshot_round_trip_is_bit_exact(outputs):
    path = outputs["snapshots"]
    snaps = read_snapshots(path)
    assert serialize_snapshots(snaps).encode() == read_bytes(path)
    assert all(s["grid"]["dim"] == 1 for s in snaps)


# --- rendering ----------------------------------------------------------------

def test_renders_all_four_kinds_from_probe_outputs(outputs, tmp_path):
    specs = [
        PlotSpec("energy_decay", (outputs["series"],),
                 str(tmp_path / "energy.png")),
        PlotSpec("convergence_curve",
                 (outputs["steady_convergence"], outputs["static_profile"]),
                 str(tmp_path / "convergence.png")),
        PlotSpec("profile_snapshots", (outputs["snapshots"],),
                 str(tmp_path / "profiles.png")),
        PlotSpec("periodic_residual", (outputs["periodic_residual"],),
                 str(tmp_path / "residual.png"), log_y=True),
    ]
    for spec in specs:
        path = render(spec)
        data = read_bytes(path)
        assert data.startswith(PNG_MAGIC)
        assert len(data) > 1000


def test_render_is_deterministic(outputs, tmp_path):
    # pinned style: identical inputs must give byte-identical images
    a = render(PlotSpec("energy_decay", (outputs["series"],),
                        str(tmp_path / "a.png")))
    b = render(PlotSpec("energy_decay", (outputs["series"],),
                        str(tmp_path / "b.png")))
    assert read_bytes(a) == read_bytes(b)


def test_rest_state_series_renders_flat_lines(outputs, tmp_path):
    table = read_table(outputs["rest_series"], "series")
    energies = np.array(table.columns["E"])
    assert np.all(energies == energies[0])
    path = render(PlotSpec("energy_decay", (outputs["rest_series"],),
                           str(tmp_path / "rest.png")))
    assert read_bytes(path).startswith(PNG_MAGIC)


def test_convergence_curve_without_reference_profile(outputs, tmp_path):
    path = render(PlotSpec("convergence_curve",
                           (outputs["steady_convergence"],),
                           str(tmp_path / "noref.png")))
    assert read_bytes(path).startswith(PNG_MAGIC)


def test_convergence_curve_rejects_extra_inputs(outputs, tmp_path):
    spec = PlotSpec("convergence_curve",
                    (outputs["steady_convergence"], outputs["static_profile"],
                     outputs["series"]),
                    str(tmp_path / "bad.png"))
    with pytest.raises(SchemaError, match="optionally the static profile"):
        render(spec)


def test_plot_spec_rejects_unknown_kind(outputs, tmp_path):
    with pytest.raises(SchemaError, match="unknown plot kind"):
        PlotSpec("histogram", (outputs["series"],), str(tmp_path / "x.png"))


# --- schema errors name the offending column or field --------------------------

def test_missing_mass_column_is_named(tmp_path):
    path = tmp_path / "series.csv"
    path.write_text("t,kinetic,potential,E,dissipation,power,clamps\n"
                    "0.0,1.0,1.0,2.0,0.0,0.0,0\n")
    with pytest.raises(SchemaError, match="'mass'"):
        read_table(str(path), "series")


def test_unexpected_column_is_named(outputs, tmp_path):
    lines = read_bytes(outputs["series"]).decode().splitlines()
    lines[0] += ",vorticity"
    lines[1] += ",0.0"
    path = tmp_path / "extra.csv"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError, match="'vorticity'"):
        read_table(str(path), "series")


def test_unparseable_cell_names_row_and_column(tmp_path):
    path = tmp_path / "steady.csv"
    path.write_text("t,e_rho,e_q\n0.0,oops,0.5\n")
    with pytest.raises(SchemaError, match=r"row 2, column 'e_rho'"):
        read_table(str(path), "steady_convergence")


def test_non_finite_cell_is_rejected(tmp_path):
    path = tmp_path / "steady.csv"
    path.write_text("t,e_rho,e_q\n0.0,nan,0.5\n")
    with pytest.raises(SchemaError, match="non-finite"):
        read_table(str(path), "steady_convergence")


def test_non_integer_counter_cell_is_rejected(tmp_path):
    path = tmp_path / "series.csv"
    path.write_text("t,kinetic,potential,E,dissipation,power,mass,clamps\n"
                    "0.0,1.0,1.0,2.0,0.0,0.0,1.0,0.5\n")
    with pytest.raises(SchemaError, match="'clamps'"):
        read_table(str(path), "series")


def test_snapshot_missing_field_is_named(tmp_path):
    path = tmp_path / "snapshots.jsonl"
    path.write_text('{"t":0.0,"rho":[1.0],"mom":[[0.0]]}\n')
    with pytest.raises(SchemaError, match="'grid'"):
        read_snapshots(str(path))


def test_snapshot_shape_mismatch_is_named(tmp_path):
    path = tmp_path / "snapshots.jsonl"
    path.write_text('{"t":0.0,"rho":[1.0,1.0],"mom":[[0.0,0.0]],'
                    '"grid":{"dim":1,"extents":[1.0],"cells":[3],"ghost":1}}'
                    "\n")
    with pytest.raises(SchemaError, match="'rho'"):
        read_snapshots(str(path))


# --- command line ---------------------------------------------------------------

def test_cli_renders_and_reports_path(outputs, tmp_path, capsys):
    out = str(tmp_path / "cli.png")
    assert cli(["periodic_residual", outputs["periodic_residual"],
                "-o", out]) == 0
    assert out in capsys.readouterr().out
    assert read_bytes(out).startswith(PNG_MAGIC)


def test_cli_schema_mismatch_names_column_and_fails(tmp_path, capsys):
    bad = tmp_path / "series.csv"
    bad.write_text("t,kinetic,potential,E,dissipation,power,clamps\n"
                   "0.0,1.0,1.0,2.0,0.0,0.0,0\n")
    assert cli(["energy_decay", str(bad),
                "-o", str(tmp_path / "x.png")]) == 1
    assert "'mass'" in capsys.readouterr().err


def test_cli_missing_input_fails(tmp_path, capsys):
    assert cli(["energy_decay", str(tmp_path / "absent.csv"),
                "-o", str(tmp_path / "x.png")]) == 1
    assert "not found" in capsys.readouterr().err
