"""CSV readers and writers for profiles, densities, trajectories and descent logs.

Floats are written with 17 significant digits so every file reads back to
the identical binary value.
"""

import csv
from pathlib import Path

import numpy as np

from .exceptions import ParameterError
from .payoff_transform import DensityField, PayoffGrid
from .point_queue import ArrivalProfile, DepartureProfile, TimeGrid


def _fmt(v):
    return format(float(v), ".17g")


def _write_rows(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def _read_columns(path, header):
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        got = next(reader, None)
        if got is None or [h.strip() for h in got] != list(header):
            raise ParameterError(f"{path}: expected header {','.join(header)}, got {got}")
        rows = [[float(v) for v in r] for r in reader if r]
    return np.array(rows, dtype=float).reshape(-1, len(header))


def write_profile(path, profile):
    """``t,rate`` with ``t`` the left edge of each bin."""
    return _write_rows(path, ("t", "rate"), zip(profile.grid.edges[:-1], profile.rates))


def read_profile(path, kind=ArrivalProfile):
    data = _read_columns(path, ("t", "rate"))
    if data.shape[0] < 1:
        raise ParameterError(f"{path}: no rows")
    t, rate = data[:, 0], data[:, 1]
    dt = float(t[1] - t[0]) if t.size > 1 else 1.0
    if t.size > 1 and not np.allclose(np.diff(t), dt, rtol=1e-9, atol=1e-12):
        raise ParameterError(f"{path}: times are not uniformly spaced")
    return kind(TimeGrid(float(t[0]), dt, t.size), rate)


def read_departures(path):
    return read_profile(path, DepartureProfile)


def write_density(path, field):
    """``x,k`` with ``x`` the cell center."""
    return _write_rows(path, ("x", "k"), zip(field.grid.centers, field.k))


def read_density(path):
    data = _read_columns(path, ("x", "k"))
    x, k = data[:, 0], data[:, 1]
    if x.size < 1:
        raise ParameterError(f"{path}: no rows")
    dx = float(x[1] - x[0]) if x.size > 1 else None
    if dx is None:
        raise ParameterError(f"{path}: need at least two cells to infer dx")
    grid = PayoffGrid(float(x[-1] + 0.5 * dx), dx, x.size)
    return DensityField(grid, k)


def write_trajectory(path, states):
    """Long format ``day,x,k``."""
    rows = (
        (s.day, x, k)
        for s in states
        for x, k in zip(s.field.grid.centers, s.field.k)
    )
    return _write_rows(path, ("day", "x", "k"), rows)


def read_trajectory(path):
    """Returns ``[(day, DensityField), ...]``."""
    data = _read_columns(path, ("day", "x", "k"))
    out = []
    for day in np.unique(data[:, 0]):
        block = data[data[:, 0] == day]
        x, k = block[:, 1], block[:, 2]
        dx = float(x[1] - x[0])
        out.append((float(day), DensityField(PayoffGrid(float(x[-1] + 0.5 * dx), dx, x.size), k)))
    return out


def write_descent(path, records):
    rows = ((r.day, r.phi, r.flux_integral, r.phi_discrete_rate) for r in records)
    return _write_rows(path, ("day", "phi", "flux_integral", "phi_rate"), rows)


def read_descent(path):
    from .lyapunov import DescentRecord

    data = _read_columns(path, ("day", "phi", "flux_integral", "phi_rate"))
    return [DescentRecord(*map(float, row)) for row in data]


def write_table(path, mapping):
    """One-row CSV of named scalars."""
    return _write_rows(path, tuple(mapping), [tuple(mapping.values())])
