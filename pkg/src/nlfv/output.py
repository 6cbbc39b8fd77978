"""CSV writers; floats carry 17 significant digits so files round-trip."""
from __future__ import annotations

import csv
from pathlib import Path


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return format(float(x), ".17g")


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return path


def write_snapshot(path, state, grid):
    x = grid.centers
    rows = ((state.t, k, x[i], state.u[k, i])
            for k in range(state.u.shape[0]) for i in range(state.u.shape[1]))
    return write_csv(path, ["t", "lane", "x_center", "u"], rows)


def write_diagnostics(path, diagnostics):
    n_lanes = len(diagnostics[0]["mass"])
    header = (["step", "t", "mass_total"] + [f"mass_lane{k}" for k in range(n_lanes)]
              + [f"tv_lane{k}" for k in range(n_lanes)] + ["min_u", "max_u"])
    rows = ([d["step"], d["t"], d["mass_total"], *d["mass"], *d["tv"], d["min_u"], d["max_u"]]
            for d in diagnostics)
    return write_csv(path, header, rows)


def write_rate_table(path, rows):
    return write_csv(path, ["dx", "e", "alpha"], ((r.dx, r.e, r.alpha) for r in rows))


def write_weights(path, weights):
    return write_csv(path, ["p", "zeta"], ((p, z) for p, z in enumerate(weights.zeta)))
