"""Local multilane model, obtained as the nonlocal solver with a one-cell kernel.

With ``eta = dx`` the only weight is ``zeta[0] = 1``, so ``c_{i+1/2} = u_{i+1}``
and the scheme becomes a Lax-Friedrichs-type discretization of
``u_t + (u g(u) nu(u))_x = R(u, u)``.
"""
from __future__ import annotations

from dataclasses import replace

from .model import SystemSpec
from .scheme import RunConfig, Trajectory, run


def localize(spec: SystemSpec, dx: float) -> SystemSpec:
    return spec.with_kernel(spec.kernel.with_eta(dx))


def local_run(config: RunConfig) -> Trajectory:
    cfg = replace(config, system=localize(config.system, config.grid.dx))
    return run(cfg)
