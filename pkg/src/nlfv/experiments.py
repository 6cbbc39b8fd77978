"""The two-lane experiments: scenario runs, refinement study, local limit,
and the split-versus-unsplit comparison."""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .diagnostics import l1_distance
from .errors import DegenerateStudy
from .initial import two_lane_initial_data
from .local import local_run
from .model import LaneModel, SystemSpec, two_lane_system
from .scheme import GridSpec, RunConfig, Trajectory, cfl_time_step, run

DOMAIN = (-4.0, 4.0)
REFERENCE_BETA = 0.3333
REFERENCE_LAMBDA = 0.1286
SNAPSHOT_TIMES = (0.0, 0.017, 0.33, 0.5)
REFERENCE_RATES = (1.9386, 1.9664, 1.9804, 1.9862)
THEORY_RATE = 0.5


def worker_count(requested: Optional[int] = None) -> int:
    cap = os.environ.get("NLFV_THREADS")
    n = requested if requested is not None else (os.cpu_count() or 1)
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def _map(fn, items, workers):
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def two_lane_config(dx: float, eta: float, *, t_final: float = 0.5,
                    lambda_override: Optional[float] = None, lane=LaneModel.lwr,
                    snapshot_times: Sequence[float] = SNAPSHOT_TIMES,
                    beta: float = REFERENCE_BETA, domain=DOMAIN, **kwargs) -> RunConfig:
    """Two lanes with speeds 1.5 and 2.5, the linear look-ahead kernel and
    the sin^2 / cos^2 bumps on (-2, 2)."""
    spec = two_lane_system(eta=eta, lane=lane)
    grid = GridSpec(domain[0], domain[1], dx, t_final, beta=beta, lam=lambda_override)
    return RunConfig(spec, grid, two_lane_initial_data(), snapshot_times=snapshot_times, **kwargs)


def two_lane_scenario(dx: float, eta: float, lambda_override: Optional[float] = None,
                      **kwargs) -> Trajectory:
    return run(two_lane_config(dx, eta, lambda_override=lambda_override, **kwargs))


@dataclass(frozen=True)
class RateTableRow:
    dx: float
    e: float
    alpha: Optional[float] = None


def rate_table(solutions: Sequence) -> list:
    """Rows from ``[(dx, u_final), ...]`` ordered coarse to fine."""
    errors = []
    for (dx_a, ua), (dx_b, ub) in zip(solutions, solutions[1:]):
        e = l1_distance(ua, ub, dx_a, dx_b, sum_lanes=True)
        if not e > 0:
            raise DegenerateStudy(f"zero distance between dx={dx_a} and dx={dx_b}")
        errors.append((dx_a, e))
    rows = []
    for j, (dx, e) in enumerate(errors):
        alpha = math.log2(e / errors[j + 1][1]) if j + 1 < len(errors) else None
        rows.append(RateTableRow(dx, e, alpha))
    return rows


def _final_solution(args):
    dx, eta, t_final, lam = args
    cfg = two_lane_config(dx, eta, t_final=t_final, lambda_override=lam, snapshot_times=())
    start = time.perf_counter()
    u = run(cfg).final.u
    return dx, u, time.perf_counter() - start


def refinement_solutions(dx_coarsest: float = 0.00625, levels: int = 5, eta: float = 0.0625,
                         t_final: float = 0.5, lambda_override: Optional[float] = None,
                         workers: Optional[int] = None) -> list:
    """``[(dx, u_final, seconds), ...]`` for ``dx_coarsest / 2**j``, ``j = 0..levels``."""
    if levels < 1:
        raise DegenerateStudy("need at least one level")
    jobs = [(dx_coarsest / 2**j, eta, t_final, lambda_override) for j in range(levels + 1)]
    return _map(_final_solution, jobs, worker_count(workers))


def convergence_study(dx_coarsest: float = 0.00625, levels: int = 5, eta: float = 0.0625,
                      t_final: float = 0.5, lambda_override: Optional[float] = None,
                      workers: Optional[int] = None) -> list:
    """One row per level; each level compares ``dx`` with ``dx / 2``, so
    ``levels + 1`` resolutions are run."""
    sols = refinement_solutions(dx_coarsest, levels, eta, t_final, lambda_override, workers)
    return rate_table([(dx, u) for dx, u, _ in sols])


@dataclass
class LocalLimitResult:
    dx: float
    eta_cells: tuple
    distances: dict            # eta -> summed L1 distance to the local solution at T
    snapshots: dict = field(default_factory=dict)  # eta or "local" -> Trajectory


def _nl2l_run(args):
    dx, n_eta, t_final, lam, snaps = args
    eta = dx if n_eta == "local" else n_eta * dx
    cfg = two_lane_config(dx, eta, t_final=t_final, lambda_override=lam, snapshot_times=snaps)
    if n_eta == "local":
        return n_eta, local_run(cfg)
    return n_eta, run(cfg)


def nonlocal_to_local_study(dx: float = 0.00625, eta_cells: Sequence[int] = (100, 50, 10),
                            t_final: float = 0.5, lambda_override: Optional[float] = None,
                            snapshot_times: Sequence[float] = (0.33, 0.5),
                            workers: Optional[int] = None) -> LocalLimitResult:
    jobs = [(dx, "local", t_final, lambda_override, snapshot_times)]
    jobs += [(dx, n, t_final, lambda_override, snapshot_times) for n in eta_cells]
    results = dict(_map(_nl2l_run, jobs, worker_count(workers)))
    ref = results.pop("local")
    distances = {}
    for n in eta_cells:
        distances[n * dx] = l1_distance(results[n].final, ref.final, dx, dx, sum_lanes=True)
    snaps = {n * dx: tr for n, tr in results.items()}
    snaps["local"] = ref
    return LocalLimitResult(dx, tuple(eta_cells), distances, snaps)


@dataclass
class SplitComparison:
    dts: list
    distances: list

    @property
    def slope(self) -> float:
        d = np.asarray(self.distances)
        if np.all(d == 0):
            return math.inf
        return float(np.polyfit(np.log2(self.dts), np.log2(d), 1)[0])


def split_compare(spec: SystemSpec, dx: float = 0.0125, t_final: float = 0.5,
                  refinements: int = 4, initial=None, beta: float = REFERENCE_BETA,
                  domain=(-8.0, 8.0)) -> SplitComparison:
    """``||split - unsplit||_L1`` at ``t_final`` for ``dt, dt/2, ...`` at fixed ``dx``.

    Halving ``dt`` at fixed ``dx`` raises the scheme's numerical diffusion,
    hence the wider default domain.
    """
    initial = two_lane_initial_data()[:spec.n_lanes] if initial is None else initial
    grid = GridSpec(domain[0], domain[1], dx, t_final, beta=beta)
    lam0, _ = cfl_time_step(grid, spec)
    dts, dists = [], []
    for j in range(refinements):
        g = grid.with_lambda(lam0 / 2**j)
        base = RunConfig(spec, g, initial)
        unsplit = run(base).final
        split = run(replace(base, integrator="split")).final
        dts.append(g.dt)
        dists.append(l1_distance(split, unsplit, dx, dx, sum_lanes=True))
    return SplitComparison(dts, dists)


def linear_two_lane(eta: float = 0.0625) -> SystemSpec:
    """Two lanes with ``f(u) = u`` and decreasing velocities: the class for
    which the splitting argument is made."""
    return two_lane_system(eta=eta, lane=LaneModel.linear)
