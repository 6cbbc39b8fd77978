"""Command-line front end.

Exit codes: 0 success, 1 a diagnostic or assertion failed, 2 bad configuration.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import experiments as ex
from .config import parse_config, with_overrides
from .diagnostics import StepMonitor, monotonicity_probe, total_mass
from .errors import ConfigParseError, ConfigValidationError, NlfvError
from .kernel import weights_for_grid
from .model import LaneModel, KernelSpec, SystemSpec
from .output import (write_csv, write_diagnostics, write_rate_table, write_snapshot,
                     write_weights)
from .scheme import RANGE_TOL, resolve_lambda, run

log = logging.getLogger("nlfv")

OK, FAILED, CONFIG_ERROR = 0, 1, 2
MASS_RTOL = 1e-10


def _load(args):
    cfg = parse_config(args.config)
    return with_overrides(cfg, lam=ex.REFERENCE_LAMBDA if args.paper_lambda else None,
                          kahan=True if args.kahan else None, center=args.center_convention)


def cmd_run(args) -> int:
    cfg = _load(args)
    traj = run(cfg)
    out = Path(args.out_dir)
    for j, state in enumerate(traj.snapshots):
        write_snapshot(out / f"snapshot_{j:02d}.csv", state, traj.grid)
    if traj.diagnostics:
        write_diagnostics(out / "diagnostics.csv", traj.diagnostics)
    if args.svg:
        from .plotting import plot_snapshots
        plot_snapshots(out / "snapshots.svg", traj)
    print(f"{traj.n_steps} steps, lambda={traj.grid.lam:.6g}, "
          f"{len(traj.snapshots)} snapshots written to {out}")
    return OK


def cmd_check(args) -> int:
    cfg = _load(args)
    out = Path(args.out_dir)
    spec = cfg.system
    grid, _ = resolve_lambda(cfg.grid, spec)
    if args.dump_weights:
        write_weights(out / "weights.csv", weights_for_grid(spec.kernel, grid.dx))
    monitor = StepMonitor(spec, grid.beta)
    traj = run(replace(cfg, on_step=monitor, snapshot_times=(0.0,)))
    failures = list(monitor.violations)
    _, m0 = total_mass(traj.snapshots[0], grid.dx)
    _, m1 = total_mass(traj.final, grid.dx)
    drift = abs(m1 - m0) / m0 if m0 else abs(m1)
    lines = [
        ("invariant region", -RANGE_TOL <= monitor.min_u and monitor.max_u <= 1 + RANGE_TOL,
         f"[{monitor.min_u:.3e}, {monitor.max_u:.17g}]"),
        ("conservation", drift <= MASS_RTOL, f"relative drift {drift:.3e}"),
        ("source telescoping", monitor.max_telescope_ratio <= 1e-15,
         f"max ratio {monitor.max_telescope_ratio:.3e}"),
        ("entropy inequality", monitor.max_entropy_residual <= 1e-12,
         f"max residual {monitor.max_entropy_residual:.3e}"),
    ]
    probe = monotonicity_probe(spec, grid, trials=args.trials)
    lines.append(("monotonicity", probe.passed, f"{len(probe.violations)} violations"))
    for name, ok, detail in lines:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        if not ok and name in ("invariant region", "conservation", "monotonicity"):
            failures.append((name, traj.n_steps, -1, -1, None, detail))
    write_csv(out / "violations.csv", ["kind", "step", "lane", "cell", "alpha", "value"],
              failures)
    return OK if not failures else FAILED


def cmd_converge(args) -> int:
    lam = ex.REFERENCE_LAMBDA if args.paper_lambda else None
    rows = ex.convergence_study(args.dx, args.levels, args.eta, args.t_final, lam)
    out = Path(args.out_dir)
    write_rate_table(out / "rate_table.csv", rows)
    if args.svg:
        from .plotting import plot_rate_table
        plot_rate_table(out / "rate_table.svg", rows)
    ok = True
    for j, r in enumerate(rows):
        ratio = r.e / rows[j + 1].e if j + 1 < len(rows) else None
        ref = ex.REFERENCE_RATES[j] if j < len(ex.REFERENCE_RATES) else None
        parts = [f"dx={r.dx:.8g}", f"e={r.e:.6e}"]
        if r.alpha is not None:
            parts.append(f"alpha={r.alpha:.4f}")
            ok &= r.alpha >= ex.THEORY_RATE
        if ratio is not None:
            parts.append(f"ratio={ratio:.3f}")
        if ref is not None and r.alpha is not None:
            parts.append(f"reference alpha={ref}")
        print("  ".join(parts))
    print(("PASS" if ok else "FAIL") + f"  every alpha >= {ex.THEORY_RATE}")
    return OK if ok else FAILED


def cmd_nl2l(args) -> int:
    lam = ex.REFERENCE_LAMBDA if args.paper_lambda else None
    res = ex.nonlocal_to_local_study(args.dx, tuple(args.eta_cells), args.t_final, lam)
    local = ex.nonlocal_to_local_study(args.dx, (1,), args.t_final, lam, snapshot_times=())
    d = dict(res.distances)
    d_local = local.distances[args.dx]
    out = Path(args.out_dir)
    rows = sorted(d.items(), reverse=True) + [(args.dx, d_local)]
    write_csv(out / "nl2l.csv", ["eta", "distance"], rows)
    if args.svg:
        from .plotting import plot_local_limit
        for t in (0.33, 0.5):
            if t <= args.t_final:
                plot_local_limit(out / f"nl2l_t{t:g}.svg", res, t)
    dist = [v for _, v in sorted(d.items(), reverse=True)]
    ordered = all(a > b for a, b in zip(dist, dist[1:]))
    for eta, v in rows:
        print(f"eta={eta:.6g}  d={v:.6e}")
    print(("PASS" if ordered else "FAIL") + "  distance decreases with eta")
    print(("PASS" if d_local == 0 else "FAIL") + "  eta=dx reproduces the local solver")
    return OK if ordered and d_local == 0 else FAILED


def cmd_split_compare(args) -> int:
    out = Path(args.out_dir)
    variants = {
        "single_lane": SystemSpec((LaneModel.linear(1.5),), KernelSpec(eta=args.eta)),
        "two_lane": ex.linear_two_lane(args.eta),
    }
    rows, ok = [], True
    for name, spec in variants.items():
        cmp_ = ex.split_compare(spec, args.dx, args.t_final, args.refinements)
        rows += [(name, dt, d) for dt, d in zip(cmp_.dts, cmp_.distances)]
        passed = cmp_.slope >= 0.9
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}: slope={cmp_.slope:.4f} "
              f"distances={['%.3e' % d for d in cmp_.distances]}")
    write_csv(out / "split_compare.csv", ["variant", "dt", "distance"], rows)
    return OK if ok else FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nlfv", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("config")
        sp.add_argument("--out-dir", default="out")
        sp.add_argument("--paper-lambda", action="store_true",
                        help=f"use lambda={ex.REFERENCE_LAMBDA} instead of the computed CFL bound")
        sp.add_argument("--svg", action="store_true")
        sp.add_argument("--kahan", action="store_true")
        sp.add_argument("--center-convention", choices=["symmetric", "paper-proof"])

    sp = sub.add_parser("run", help="run a configuration and write snapshot CSVs")
    common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("check", help="run with every discrete-property check enabled")
    common(sp)
    sp.add_argument("--dump-weights", action="store_true")
    sp.add_argument("--trials", type=int, default=1000)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("converge", help="grid refinement study of the two-lane scenario")
    common(sp, config=False)
    sp.add_argument("--dx", type=float, default=0.00625)
    sp.add_argument("--levels", type=int, default=5)
    sp.add_argument("--eta", type=float, default=0.0625)
    sp.add_argument("--t-final", type=float, default=0.5)
    sp.set_defaults(func=cmd_converge)

    sp = sub.add_parser("nl2l", help="distance to the local model for shrinking kernels")
    common(sp, config=False)
    sp.add_argument("--dx", type=float, default=0.00625)
    sp.add_argument("--eta-cells", type=int, nargs="+", default=[100, 50, 10])
    sp.add_argument("--t-final", type=float, default=0.5)
    sp.set_defaults(func=cmd_nl2l)

    sp = sub.add_parser("split-compare", help="split versus unsplit integrator under dt refinement")
    common(sp, config=False)
    sp.add_argument("--dx", type=float, default=0.0125)
    sp.add_argument("--eta", type=float, default=0.0625)
    sp.add_argument("--t-final", type=float, default=0.5)
    sp.add_argument("--refinements", type=int, default=4)
    sp.set_defaults(func=cmd_split_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigParseError, ConfigValidationError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    except NlfvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
