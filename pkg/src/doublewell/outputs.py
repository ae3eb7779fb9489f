"""CSV and summary writers.

All numeric cells use ``repr`` of the Python float: the shortest decimal form
that round-trips exactly, so files are both stable and lossless.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(fmt(cell) for cell in row) + "\n")


def write_spectrum_csv(path, pairs, slopes, region_weights, classes) -> None:
    rows = [
        (
            n, p.energy, slopes[n],
            region_weights[n][0], region_weights[n][1], region_weights[n][2],
            classes[n], p.residual_norm,
        )
        for n, p in enumerate(pairs)
    ]
    write_csv(path, ["n", "E", "slope", "w_I", "w_II", "w_III", "class", "residual"], rows)


def write_timeseries_csv(path, series) -> None:
    rows = zip(series.times, series.p0, series.p1, series.p2, series.n_left)
    write_csv(path, ["t", "P0", "P1", "P2", "N_L"], rows)


def write_frequencies_csv(path, components, dominant_set) -> None:
    rows = [
        (c.omega, c.amplitude, c.m, c.n, 1 if c in dominant_set else 0)
        for c in components
    ]
    write_csv(path, ["omega", "A", "m", "n", "dominant_flag"], rows)


def write_summary(outdir, entries: dict) -> None:
    out = Path(outdir)
    with open(out / "summary.txt", "w") as f:
        for key, value in entries.items():
            f.write(f"{key} = {fmt(value)}\n")
    with open(out / "summary.json", "w") as f:
        json.dump(entries, f, indent=2, default=float)
        f.write("\n")


class ScanCsvWriter:
    """Streams scan.csv one strength at a time so interrupted sweeps keep
    every completed record."""

    HEADER = ["U", "n", "E", "branch_id", "slope", "class", "weight"]

    def __init__(self, path):
        self._f = open(path, "w", newline="")
        self._f.write(",".join(self.HEADER) + "\n")

    def write_point(self, i: int, scan) -> None:
        u = scan.u_grid[i]
        for n in range(scan.n_levels):
            row = (
                u, n, scan.energies[i, n], scan.branch_ids[i, n],
                scan.slopes[i, n], scan.classes[i, n], scan.weights[i, n],
            )
            self._f.write(",".join(fmt(cell) for cell in row) + "\n")
        self._f.flush()

    def close(self) -> None:
        if not self._f.closed:
            self._f.close()


def write_crossings_csv(path, crossings) -> None:
    rows = [
        (
            c.u_center, c.gap,
            ";".join(str(b) for b in c.participants),
            ";".join(c.types),
        )
        for c in crossings
    ]
    write_csv(path, ["U_center", "gap", "participants", "types"], rows)


def write_dominant_vs_u_csv(path, records) -> None:
    """records: iterable of (u, omega, amplitude, component_id)."""
    write_csv(path, ["U", "omega", "A", "component_id"], records)


def write_initial_energy_csv(path, u_grid, energies) -> None:
    write_csv(path, ["U", "E_init"], zip(u_grid, energies))


def write_oracle_csv(path, energies) -> None:
    write_csv(path, ["n", "E"], enumerate(energies))
