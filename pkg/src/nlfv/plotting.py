"""Static SVG figures (snapshots and the refinement table)."""
from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "nlfv"
_META = {"Date": None, "Creator": None}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=_META)
    plt.close(fig)
    return path


def plot_snapshots(path, trajectory, labels=None):
    grid = trajectory.grid
    snaps = trajectory.snapshots
    fig, axes = plt.subplots(1, len(snaps), figsize=(3.2 * len(snaps), 3), sharey=True, squeeze=False)
    for ax, state in zip(axes[0], snaps):
        for k in range(state.u.shape[0]):
            name = labels[k] if labels else f"lane {k + 1}"
            ax.plot(grid.centers, state.u[k], lw=1, label=name)
        ax.set_title(f"t = {state.t:g}")
        ax.set_xlabel("x")
    axes[0][0].set_ylabel("density")
    axes[0][0].legend()
    fig.tight_layout()
    return _save(fig, path)


def plot_rate_table(path, rows):
    dx = [r.dx for r in rows]
    e = [r.e for r in rows]
    fig, ax = plt.subplots(figsize=(4.5, 3.5))
    ax.loglog(dx, e, "o-", label="observed")
    if len(rows) > 1:
        slope = math.log(e[0] / e[-1]) / math.log(dx[0] / dx[-1])
        ax.loglog(dx, [e[0] * (d / dx[0]) ** slope for d in dx], "--",
                  label=f"fitted slope {slope:.2f}")
    ax.loglog(dx, [e[0] * (d / dx[0]) ** 0.5 for d in dx], ":", label="slope 0.5")
    ax.set_xlabel("dx")
    ax.set_ylabel("e")
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)


def plot_local_limit(path, result, t):
    fig, axes = plt.subplots(1, 2, figsize=(8, 3), sharey=True)
    keys = [k for k in result.snapshots if k != "local"] + ["local"]
    for k in keys:
        tr = result.snapshots[k]
        state = tr.at(t)
        name = "local" if k == "local" else f"eta = {k:g}"
        for lane, ax in enumerate(axes):
            ax.plot(tr.grid.centers, state.u[lane], lw=1, label=name)
    for lane, ax in enumerate(axes):
        ax.set_title(f"lane {lane + 1}, t = {t:g}")
        ax.set_xlabel("x")
    axes[0].legend()
    fig.tight_layout()
    return _save(fig, path)
