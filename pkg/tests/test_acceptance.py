"""Acceptance criteria, one printed PASS/FAIL line each.

The refinement studies take several minutes; they run once per module.
"""
import time
from dataclasses import replace

import numpy as np
import pytest

from nlfv.diagnostics import StepMonitor, l1_distance, monotonicity_probe, total_mass
from nlfv.experiments import (REFERENCE_BETA, REFERENCE_LAMBDA, REFERENCE_RATES, THEORY_RATE,
                              linear_two_lane, nonlocal_to_local_study, rate_table,
                              refinement_solutions, split_compare, two_lane_config)
from nlfv.kernel import discretize
from nlfv.local import local_run
from nlfv.model import KernelSpec, LaneModel, SystemSpec, two_lane_system
from nlfv.scheme import GridSpec, SystemState, cfl_time_step, run, step
from nlfv.kernel import weights_for_grid
from oracles import marching_step

DX = 0.00625
RANGE_TOL = 1e-12


@pytest.fixture(scope="module")
def scenario_config():
    return two_lane_config(DX, 100 * DX, snapshot_times=())


def test_1_invariant_region_and_conservation(scenario_config, acceptance_report):
    start = time.perf_counter()
    traj = run(replace(scenario_config, record_diagnostics=True))
    elapsed = time.perf_counter() - start
    lo = min(d["min_u"] for d in traj.diagnostics)
    hi = max(d["max_u"] for d in traj.diagnostics)
    m0 = traj.diagnostics[0]["mass_total"]
    drift = max(abs(d["mass_total"] - m0) for d in traj.diagnostics) / m0
    ok = -RANGE_TOL <= lo and hi <= 1 + RANGE_TOL and drift <= 1e-10 and elapsed <= 10.0
    acceptance_report("1 invariant region + conservation", ok,
                      f"u in [{lo:.3e}, {hi:.6f}], mass drift {drift:.2e}, {elapsed:.2f} s")
    assert ok


def test_2_source_telescoping(scenario_config, acceptance_report):
    monitor = StepMonitor(scenario_config.system, scenario_config.grid.beta, entropy=False)
    run(replace(scenario_config, on_step=monitor))
    ok = monitor.ok and monitor.max_telescope_ratio <= 1e-15
    acceptance_report("2 source telescoping", ok,
                      f"max |sum R| / max |S| = {monitor.max_telescope_ratio:.2e} "
                      f"over {monitor.steps} steps")
    assert ok


def test_3_discrete_entropy_inequality(acceptance_report):
    cfg = two_lane_config(0.025, 0.075, domain=(-8.0, 8.0), snapshot_times=())
    monitor = StepMonitor(cfg.system, cfg.grid.beta)
    run(replace(cfg, on_step=monitor))
    ok = monitor.max_entropy_residual <= 1e-12 and monitor.ok
    acceptance_report("3 discrete entropy inequality", ok,
                      f"max residual {monitor.max_entropy_residual:.2e} over {monitor.steps} "
                      f"steps, {len(monitor.violations)} violations")
    assert ok


def test_4_monotonicity(acceptance_report):
    spec = two_lane_system()
    grid = GridSpec(-4, 4, DX, 0.5, beta=REFERENCE_BETA)
    probe = monotonicity_probe(spec, grid, trials=1000, tol=1e-12)
    lam, _ = cfl_time_step(grid, spec)
    control = monotonicity_probe(spec, grid, trials=1000, lam=10 * lam, tol=1e-12)
    ok = probe.passed and len(control.violations) >= 1
    acceptance_report("4 monotonicity", ok,
                      f"{len(probe.violations)} violations in 1000 trials; "
                      f"10x lambda control: {len(control.violations)} violations")
    assert ok


@pytest.fixture(scope="module")
def refinement():
    return refinement_solutions(DX, levels=5, eta=0.0625, t_final=0.5)


@pytest.fixture(scope="module")
def refinement_reference_lambda():
    return refinement_solutions(DX, levels=5, eta=0.0625, t_final=0.5,
                                lambda_override=REFERENCE_LAMBDA)


def _table(sols):
    return rate_table([(dx, u) for dx, u, _ in sols])


def _fmt(values, spec=".4f"):
    return ", ".join(format(v, spec) for v in values)


def test_5i_rate_at_least_half(refinement, acceptance_report):
    rows = _table(refinement)
    alphas = [r.alpha for r in rows if r.alpha is not None]
    finest = refinement[-1][2]
    ok = all(a >= THEORY_RATE for a in alphas) and finest <= 15 * 60
    acceptance_report("5(i) every alpha >= 0.5", ok,
                      f"alpha = {_fmt(alphas)}; finest level {finest:.0f} s")
    assert ok


def test_5ii_error_ratio_per_halving(refinement, acceptance_report):
    rows = _table(refinement)
    ratios = [a.e / b.e for a, b in zip(rows, rows[1:])]
    ok = all(r >= 3.5 for r in ratios)
    acceptance_report("5(ii) e ratio >= 3.5 per halving", ok,
                      f"e = {_fmt([r.e for r in rows], '.4e')}; ratios = {_fmt(ratios, '.3f')}")
    assert ok


def test_5iii_reference_rates_report_only(refinement_reference_lambda, acceptance_report):
    rows = _table(refinement_reference_lambda)
    alphas = [r.alpha for r in rows if r.alpha is not None]
    within = all(abs(a - p) <= 0.15 for a, p in zip(alphas, REFERENCE_RATES))
    acceptance_report("5(iii) reference rates +-0.15 (informative)", within,
                      f"alpha = {_fmt(alphas)} vs {_fmt(REFERENCE_RATES)}; not gating")


def test_6_nonlocal_to_local(acceptance_report):
    res = nonlocal_to_local_study(DX, (100, 50, 10), t_final=0.5, snapshot_times=())
    d = [res.distances[n * DX] for n in (100, 50, 10)]
    cfg = two_lane_config(DX, DX, snapshot_times=())
    d_local = l1_distance(run(cfg).final, local_run(cfg).final, DX, DX, sum_lanes=True)
    ok = d[0] > d[1] > d[2] and d_local == 0.0
    acceptance_report("6 nonlocal-to-local", ok,
                      f"d(100dx, 50dx, 10dx) = {_fmt(d, '.4e')}; d(dx) = {d_local!r}")
    assert ok


def test_7_splitting_order(acceptance_report):
    single = SystemSpec((LaneModel.linear(1.5),), KernelSpec(eta=0.0625))
    one = split_compare(single, refinements=4)
    two = split_compare(linear_two_lane(0.0625), refinements=4)
    ok = one.slope >= 0.9 and two.slope >= 0.9
    acceptance_report("7 splitting order", ok,
                      f"single lane distances {_fmt(one.distances, '.1e')} (slope {one.slope}); "
                      f"two lanes slope {two.slope:.4f}")
    assert ok


@pytest.mark.parametrize("n_eta", [1, 10, 80, 100])
def test_8_kernel_quadrature(n_eta, acceptance_report):
    eta = 0.0625
    zeta = discretize(KernelSpec(eta=eta), eta / n_eta, n_eta).zeta
    p = np.arange(n_eta)
    closed = 2.0 / n_eta**2 * (n_eta - p - 0.5)
    err = float(np.max(np.abs(zeta - closed)))
    total = abs(float(zeta.sum()) - 1.0)
    ok = err <= 1e-14 and total <= 1e-14
    acceptance_report(f"8 kernel quadrature N_eta={n_eta}", ok,
                      f"max |zeta - closed form| = {err:.1e}, |sum - 1| = {total:.1e}")
    assert ok


def test_9_oracle_equivalence(acceptance_report):
    lane = LaneModel(v_scale=1.0, g=lambda u: 1 - u, g_derivative=lambda u: -np.ones_like(u),
                     shape=lambda c: np.ones_like(np.asarray(c, dtype=float)),
                     lip_f=1.0, nu_sup=1.0)
    spec = SystemSpec((lane,), KernelSpec("constant", 1.0))
    grid = GridSpec(0, 3, 1.0, 1.0, beta=1 / 3, lam=1 / 16)
    u0 = [0.0, 1.0, 0.0]
    new = step(SystemState(0.0, np.array([u0])), weights_for_grid(spec.kernel, 1.0), spec, grid)
    ref = marching_step([u0], [1.0], [1.0], 1 / 3, 1 / 16, 1 / 16, nu=lambda k, c: 1.0)
    err = float(np.max(np.abs(new.u - np.array(ref))))
    ok = err <= 1e-15
    acceptance_report("9 oracle equivalence", ok, f"max deviation {err:.1e}, u = {new.u[0]}")
    assert ok
