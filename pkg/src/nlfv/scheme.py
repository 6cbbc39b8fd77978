"""Explicit Lax-Friedrichs-type marching scheme for the multilane system."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import NonPositiveCfl, RangeViolation, SupportOverflow
from .initial import as_profile
from .kernel import KernelWeights, center_values, convolve_interfaces, weights_for_grid
from .model import SystemSpec, exchange_rates

log = logging.getLogger(__name__)

RANGE_TOL = 1e-12
SUPPORT_TOL = 1e-10
GRID_RTOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Uniform mesh on ``[x_min, x_max]`` with ``dt = lam * dx``.

    ``lam=None`` means "use the computed CFL bound" and is resolved by
    :func:`run`.
    """

    x_min: float
    x_max: float
    dx: float
    t_final: float
    beta: float = 1.0 / 3.0
    lam: Optional[float] = None

    def __post_init__(self):
        if not self.dx > 0:
            raise ValueError("dx must be positive")
        length = self.x_max - self.x_min
        n = int(round(length / self.dx))
        if n < 1 or abs(n * self.dx - length) > GRID_RTOL * abs(length):
            raise ValueError(f"dx={self.dx!r} does not divide [{self.x_min}, {self.x_max}]")
        if not 0.0 < self.beta < 2.0 / 3.0:
            raise ValueError(f"beta={self.beta!r} outside (0, 2/3)")
        if self.t_final < 0:
            raise ValueError("t_final must be non-negative")
        if self.lam is not None and not self.lam > 0:
            raise ValueError("lambda must be positive")

    @property
    def n_cells(self) -> int:
        return int(round((self.x_max - self.x_min) / self.dx))

    @property
    def dt(self) -> float:
        if self.lam is None:
            raise ValueError("lambda not resolved yet")
        return self.lam * self.dx

    @property
    def edges(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_cells + 1)

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + self.dx * (np.arange(self.n_cells) + 0.5)

    def with_lambda(self, lam) -> "GridSpec":
        return replace(self, lam=lam)


@dataclass(frozen=True)
class SystemState:
    t: float
    u: np.ndarray  # (n_lanes, n_cells)

    @property
    def n_lanes(self) -> int:
        return self.u.shape[0]


def project_initial_data(u0: Sequence, grid: GridSpec) -> SystemState:
    """Cell averages of each lane's initial profile."""
    edges = grid.edges
    rows = [as_profile(p).integrals(edges) / grid.dx for p in u0]
    u = np.array(rows, dtype=float)
    if np.any(u < -RANGE_TOL) or np.any(u > 1.0 + RANGE_TOL):
        k, i = np.unravel_index(np.argmax(np.abs(u - 0.5)), u.shape)
        raise RangeViolation(f"initial average {u[k, i]!r} at lane {k}, cell {i} outside [0, 1]")
    return SystemState(0.0, u)


def cfl_bound(dx: float, beta: float, spec: SystemSpec, dt: Optional[float] = None) -> float:
    """Right-hand side of the CFL restriction; ``dt=None`` drops the source term."""
    terms = [1.0, 4.0 - 6.0 * beta, 6.0 * beta]
    if dt is not None:
        terms.append(1.0 - 2.0 * dt * spec.source_lipschitz)
    speed = max(l.lip_f * l.nu_sup for l in spec.lanes)
    return min(terms) / (1.0 + 6.0 * speed)


def cfl_time_step(grid: GridSpec, spec: SystemSpec):
    """Admissible ``(lam, dt)``: one fixed-point pass for the source term."""
    lam0 = cfl_bound(grid.dx, grid.beta, spec)
    if lam0 <= 0:
        raise NonPositiveCfl(f"CFL bound {lam0!r} is not positive")
    lam1 = cfl_bound(grid.dx, grid.beta, spec, dt=lam0 * grid.dx)
    lam = min(lam0, lam1)
    if lam <= 0:
        raise NonPositiveCfl(f"CFL bound {lam!r} is not positive")
    return lam, lam * grid.dx


def _lwr_flux(u):
    return u * (1.0 - u)


def lf_flux(u_l, u_r, nu_iface, beta, lam, f: Callable = _lwr_flux):
    """Numerical flux ``nu/2 (f(u_l) + f(u_r)) - beta/(2 lam) (u_r - u_l)``."""
    u_l = np.asarray(u_l, dtype=float)
    u_r = np.asarray(u_r, dtype=float)
    return 0.5 * nu_iface * (f(u_l) + f(u_r)) - beta / (2.0 * lam) * (u_r - u_l)


class StepParts(NamedTuple):
    """Everything one step computes, kept for diagnostics."""

    lam: float
    h: float
    padded: np.ndarray    # (N, n + 2): one zero ghost cell either side
    c_half: np.ndarray    # (N, n + 1): interfaces x_{-1/2} .. x_{n-1/2}
    c_center: np.ndarray  # (N, n)
    nu_half: np.ndarray   # (N, n + 1)
    flux: np.ndarray      # (N, n + 1)
    source: np.ndarray    # (N, n): R^k per cell
    exchange: np.ndarray  # (N + 1, n): S^0 .. S^N
    u_new: np.ndarray     # (N, n)


def check_support(u: np.ndarray, n_eta: int = 1, tol: float = SUPPORT_TOL):
    """Fail if mass is about to leave through either boundary cell.

    The zero ghost zone stands in for the solution beyond the domain, which
    is only faithful while the boundary cells themselves are (numerically)
    empty. ``n_eta`` is accepted for symmetry with the ghost-zone width.
    """
    right = u[:, -1]
    left = u[:, 0]
    if np.any(right > tol) or np.any(left > tol):
        side = "right" if np.any(right > tol) else "left"
        raise SupportOverflow(
            f"density above {tol:g} in the {side} boundary cell; enlarge the domain")


def step_parts(u: np.ndarray, w: KernelWeights, spec: SystemSpec, grid: GridSpec, h: float, *,
               kahan: bool = False, center: str = "symmetric", convection: bool = True,
               source: bool = True, check: bool = True) -> StepParts:
    n_lanes, n = u.shape
    m = w.n_eta
    if check:
        check_support(u, m)
    lam = h / grid.dx
    ext = np.zeros((n_lanes, n + m + 2))
    ext[:, 1:n + 1] = u
    c_full = convolve_interfaces(ext[:, 1:], w, kahan)  # interfaces x_{-1/2} .. x_{n+1/2}
    c_half = c_full[:, :n + 1]
    c_center = center_values(c_full, center)[:, :n]
    padded = ext[:, :n + 2]
    x_half = grid.edges
    nu_half = np.empty((n_lanes, n + 1))
    flux = np.zeros((n_lanes, n + 1))
    for k, lane in enumerate(spec.lanes):
        nu_half[k] = lane.nu(x_half, c_half[k])
        if convection:
            flux[k] = lf_flux(padded[k, :-1], padded[k, 1:], nu_half[k], grid.beta, lam, lane.f)
    if source:
        exchange = exchange_rates(spec, grid.centers, u, c_center)
    else:
        exchange = np.zeros((n_lanes + 1, n))
    r = exchange[:-1] - exchange[1:]
    u_new = u - lam * (flux[:, 1:] - flux[:, :-1]) + h * r
    return StepParts(lam, h, padded, c_half, c_center, nu_half, flux, r, exchange, u_new)


def step(state: SystemState, w: KernelWeights, spec: SystemSpec, grid: GridSpec,
         h: Optional[float] = None, **kwargs) -> SystemState:
    """Advance one marching step of size ``h`` (default ``grid.dt``)."""
    h = grid.dt if h is None else h
    parts = step_parts(state.u, w, spec, grid, h, **kwargs)
    return SystemState(state.t + h, parts.u_new)


@dataclass
class RunConfig:
    system: SystemSpec
    grid: GridSpec
    initial: Sequence
    snapshot_times: Sequence[float] = ()
    integrator: str = "unsplit"
    kahan: bool = False
    center: str = "symmetric"
    record_diagnostics: bool = False
    on_step: Optional[Callable] = None  # on_step(n, state_before, state_after, parts)


@dataclass
class Trajectory:
    grid: GridSpec
    weights: KernelWeights
    snapshots: list
    diagnostics: list = field(default_factory=list)
    n_steps: int = 0
    lam_bound: float = math.nan

    @property
    def final(self) -> SystemState:
        return self.snapshots[-1]

    def at(self, t: float) -> SystemState:
        for s in self.snapshots:
            if abs(s.t - t) <= 1e-12 * max(1.0, abs(t)):
                return s
        raise KeyError(t)


def resolve_lambda(grid: GridSpec, spec: SystemSpec):
    """Return the grid with a concrete lambda and the computed bound."""
    bound, _ = cfl_time_step(grid, spec)
    if grid.lam is None:
        return grid.with_lambda(bound), bound
    if grid.lam > bound:
        log.warning("lambda=%g exceeds the computed CFL bound %g", grid.lam, bound)
    return grid, bound


def _targets(snapshot_times, t_final):
    ts = sorted({float(t) for t in snapshot_times if 0.0 <= t <= t_final} | {float(t_final)})
    return ts


def diagnostic_row(n: int, state: SystemState, dx: float) -> dict:
    from .diagnostics import total_mass, total_variation
    per_lane, total = total_mass(state, dx)
    return {
        "step": n,
        "t": state.t,
        "mass_total": total,
        "mass": per_lane,
        "tv": total_variation(state),
        "min_u": float(state.u.min()),
        "max_u": float(state.u.max()),
    }


def run(config: RunConfig) -> Trajectory:
    """March from the projected initial data to ``t_final``.

    Steps are truncated to land exactly on every snapshot time and on the
    horizon. The result is deterministic for a fixed configuration.
    """
    from .splitting import split_step_parts

    spec = config.system
    grid, bound = resolve_lambda(config.grid, spec)
    w = weights_for_grid(spec.kernel, grid.dx)
    state = project_initial_data(config.initial, grid)
    opts = dict(kahan=config.kahan, center=config.center)
    advance = split_step_parts if config.integrator == "split" else step_parts
    if config.integrator not in ("split", "unsplit"):
        raise ValueError(f"unknown integrator {config.integrator!r}")

    traj = Trajectory(grid, w, [], lam_bound=bound)
    targets = _targets(config.snapshot_times, grid.t_final)
    if targets and targets[0] == 0.0:
        traj.snapshots.append(state)
        targets = targets[1:]
    if config.record_diagnostics:
        traj.diagnostics.append(diagnostic_row(0, state, grid.dx))

    dt = grid.dt
    n = 0
    for target in targets:
        while state.t < target:
            remaining = target - state.t
            last = remaining <= dt * (1.0 + 1e-9)
            h = remaining if last else dt
            parts = advance(state.u, w, spec, grid, h, **opts)
            new = SystemState(target if last else state.t + h, parts.u_new)
            if config.on_step is not None:
                config.on_step(n, state, new, parts)
            state = new
            n += 1
            if config.record_diagnostics:
                traj.diagnostics.append(diagnostic_row(n, state, grid.dx))
        traj.snapshots.append(state)
    traj.n_steps = n
    return traj
