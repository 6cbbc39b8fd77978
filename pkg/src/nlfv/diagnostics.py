"""Discrete stability properties of the scheme, measured on actual runs."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NonNestedGrids
from .kernel import KernelWeights
from .model import SystemSpec, source_exchange
from .scheme import GridSpec, StepParts, SystemState, cfl_time_step, lf_flux, step_parts

DEFAULT_ALPHAS = tuple(np.round(np.linspace(0.0, 1.0, 11), 12))
ENTROPY_TOL = 1e-12
TELESCOPE_RTOL = 1e-15


def _values(state):
    return state.u if isinstance(state, SystemState) else np.atleast_2d(np.asarray(state, float))


def total_mass(state, dx: float):
    """Per-lane masses ``dx * sum_i u_i`` and their total."""
    per_lane = dx * np.sum(_values(state), axis=1)
    return per_lane, float(np.sum(per_lane))


def total_variation(state) -> np.ndarray:
    """Per-lane TV, counting the jumps to the zero ghost cells at both ends."""
    u = _values(state)
    padded = np.pad(u, ((0, 0), (1, 1)))
    return np.sum(np.abs(np.diff(padded, axis=1)), axis=1)


def _sgn(x):
    return np.sign(x)  # sign(0) == 0


def entropy_residual_from_parts(parts: StepParts, u_np1, alpha, spec: SystemSpec,
                                beta: float) -> np.ndarray:
    """Left minus right side of the discrete Kruzkov inequality, per lane and cell."""
    lam, h = parts.lam, parts.h
    a, b = parts.padded[:, :-1], parts.padded[:, 1:]
    u_n = parts.padded[:, 1:-1]
    res = np.empty_like(u_n)
    for k, lane in enumerate(spec.lanes):
        nu = parts.nu_half[k]
        g = (lf_flux(np.maximum(a[k], alpha), np.maximum(b[k], alpha), nu, beta, lam, lane.f)
             - lf_flux(np.minimum(a[k], alpha), np.minimum(b[k], alpha), nu, beta, lam, lane.f))
        s = _sgn(u_np1[k] - alpha)
        f_alpha = float(lane.f(np.array(alpha)))
        res[k] = (np.abs(u_np1[k] - alpha) - np.abs(u_n[k] - alpha)
                  + lam * (g[1:] - g[:-1])
                  + lam * s * f_alpha * (nu[1:] - nu[:-1])
                  - h * s * parts.source[k])
    return res


def entropy_residual(state_n: SystemState, state_np1: SystemState, alpha, w: KernelWeights,
                     spec: SystemSpec, grid: GridSpec, **kwargs) -> np.ndarray:
    """Residual of the discrete entropy inequality for one step; should be <= 0."""
    h = state_np1.t - state_n.t
    parts = step_parts(state_n.u, w, spec, grid, h, **kwargs)
    return entropy_residual_from_parts(parts, state_np1.u, alpha, spec, grid.beta)


def source_telescoping(parts: StepParts):
    """``(|sum_k R^k|, max_k |S^k|)`` per cell."""
    return np.abs(np.sum(parts.source, axis=0)), np.max(np.abs(parts.exchange), axis=0)


@dataclass
class StepMonitor:
    """``on_step`` hook collecting every per-step property of a run.

    Violations are stored as ``(kind, step, lane, cell, alpha, value)``.
    """

    spec: SystemSpec
    beta: float
    alphas: tuple = DEFAULT_ALPHAS
    entropy: bool = True
    data_extremes: bool = True
    max_entropy_residual: float = -math.inf
    max_telescope_ratio: float = 0.0
    lipschitz_constant: float = 0.0
    min_u: float = math.inf
    max_u: float = -math.inf
    steps: int = 0
    violations: list = field(default_factory=list)

    def __call__(self, n, before: SystemState, after: SystemState, parts: StepParts):
        self.steps += 1
        u = after.u
        self.min_u = min(self.min_u, float(u.min()))
        self.max_u = max(self.max_u, float(u.max()))
        dx = parts.h / parts.lam
        lip = dx * np.sum(np.abs(u - before.u), axis=1) / parts.h
        self.lipschitz_constant = max(self.lipschitz_constant, float(lip.max()))

        total, scale = source_telescoping(parts)
        bad = total > TELESCOPE_RTOL * scale
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(scale > 0, total / scale, np.where(total > 0, np.inf, 0.0))
        self.max_telescope_ratio = max(self.max_telescope_ratio, float(ratio.max()))
        for i in np.nonzero(bad)[0][:10]:
            self.violations.append(("telescoping", n, -1, int(i), None, float(total[i])))

        if self.entropy:
            alphas = list(self.alphas)
            if self.data_extremes:
                alphas += [float(before.u.min()), float(before.u.max())]
            for alpha in alphas:
                res = entropy_residual_from_parts(parts, u, alpha, self.spec, self.beta)
                worst = float(res.max())
                self.max_entropy_residual = max(self.max_entropy_residual, worst)
                if worst > ENTROPY_TOL:
                    k, i = np.unravel_index(np.argmax(res), res.shape)
                    self.violations.append(("entropy", n, int(k), int(i), alpha, worst))

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass
class ProbeReport:
    trials: int
    violations: list

    @property
    def passed(self) -> bool:
        return not self.violations


PROBE_ARGS = ("u_left", "u_center", "u_right", "u_lower", "u_upper")


def _updated_cell(spec, lane_idx, args, frozen, beta, lam, dt):
    """Marching-formula update of one cell with the convolved fields held fixed."""
    ul, uc, ur, ulo, uhi = args
    nu_l, nu_r, c_lo, c_k, c_hi = frozen
    lane = spec.lanes[lane_idx]
    k = lane_idx + 1  # lanes numbered from 1 in source_exchange
    flux_r = lf_flux(uc, ur, nu_r, beta, lam, lane.f)
    flux_l = lf_flux(ul, uc, nu_l, beta, lam, lane.f)
    s_in = source_exchange(spec, k - 1, 0.0, ulo, uc, c_lo, c_k)
    s_out = source_exchange(spec, k, 0.0, uc, uhi, c_k, c_hi)
    return float(uc - lam * (flux_r - flux_l) + dt * (s_in - s_out))


def monotonicity_probe(spec: SystemSpec, grid: GridSpec, trials: int = 1000, *,
                       lam: Optional[float] = None, eps: float = 1e-7, tol: float = 1e-12,
                       seed: int = 0) -> ProbeReport:
    """Finite-difference check that a cell update is non-decreasing in its five
    density arguments, for random states with frozen nonlocal averages."""
    rng = np.random.default_rng(seed)
    if lam is None:
        lam, _ = cfl_time_step(grid, spec)
    dt = lam * grid.dx
    n_lanes = spec.n_lanes
    violations = []
    for t in range(trials):
        k = int(rng.integers(n_lanes))
        args = list(rng.random(5))
        cs = rng.random(5)  # c_{i-1/2}, c_{i+1/2}, c_i^{k-1}, c_i^k, c_i^{k+1}
        lane = spec.lanes[k]
        x = grid.x_min
        frozen = (lane.nu(x, cs[0]), lane.nu(x, cs[1]), cs[2], cs[3], cs[4])
        base = _updated_cell(spec, k, args, frozen, grid.beta, lam, dt)
        for j, name in enumerate(PROBE_ARGS):
            bumped = list(args)
            bumped[j] = min(1.0, bumped[j] + eps)
            change = _updated_cell(spec, k, bumped, frozen, grid.beta, lam, dt) - base
            if change < -tol:
                violations.append((t, k, name, change))
    return ProbeReport(trials, violations)


def l1_distance(a, b, dx_a: float, dx_b: float, sum_lanes: bool = False):
    """L1 distance after injecting the coarser state onto the finer grid."""
    ua, ub = _values(a), _values(b)
    if ua.shape[0] != ub.shape[0]:
        raise ValueError("states have different lane counts")
    if ua.shape[1] > ub.shape[1]:
        ua, ub, dx_a, dx_b = ub, ua, dx_b, dx_a
    if ua.shape[1] == ub.shape[1] and math.isclose(dx_a, dx_b, rel_tol=1e-12):
        fine, coarse, dx = ub, ua, dx_b
    elif ub.shape[1] == 2 * ua.shape[1] and math.isclose(dx_a, 2 * dx_b, rel_tol=1e-12):
        fine, coarse, dx = ub, np.repeat(ua, 2, axis=1), dx_b
    else:
        raise NonNestedGrids(f"cannot nest {ua.shape[1]} cells (dx={dx_a}) "
                             f"into {ub.shape[1]} cells (dx={dx_b})")
    per_lane = dx * np.sum(np.abs(fine - coarse), axis=1)
    return float(per_lane.sum()) if sum_lanes else per_lane


def tv_envelope(diagnostics: list, fit_steps: int = 10):
    """Fit ``K`` on the first steps and return ``(K, bound(t), tv(t))`` for the
    exponential total-variation envelope ``exp(K t) (TV0 + 1) - 1``.

    ``K`` is a growth rate and is clamped at zero when TV starts out decaying.
    """
    tv = np.array([float(np.sum(d["tv"])) for d in diagnostics])
    t = np.array([d["t"] for d in diagnostics])
    tv0 = tv[0]
    sel = slice(1, fit_steps + 1)
    rates = np.log((tv[sel] + 1.0) / (tv0 + 1.0)) / t[sel]
    k_fit = max(0.0, float(rates.max())) if rates.size else 0.0
    return k_fit, np.exp(k_fit * t) * (tv0 + 1.0) - 1.0, tv
