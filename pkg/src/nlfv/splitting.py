"""Lie splitting of convection and lane exchange.

One split step is a convection-only marching step followed by a forward
Euler step of the exchange ODE, both over the full step ``dt``.
"""
from __future__ import annotations

import numpy as np

from .kernel import KernelWeights, center_values, convolve_interfaces
from .model import SystemSpec, exchange_rates
from .scheme import GridSpec, StepParts, SystemState, check_support, step_parts


def exchange_field(u, w: KernelWeights, spec: SystemSpec, x, *, kahan=False, center="symmetric"):
    """Return ``(R, S, c_center)`` for lane densities ``u`` of shape (N, n)."""
    n_lanes, n = u.shape
    ext = np.zeros((n_lanes, n + w.n_eta + 1))
    ext[:, :n] = u
    c_full = convolve_interfaces(ext, w, kahan)  # interfaces x_{-1/2} .. x_{n+1/2}
    c_center = center_values(c_full, center)[:, :n]
    s = exchange_rates(spec, x, u, c_center)
    return s[:-1] - s[1:], s, c_center


def convective_substep(state: SystemState, w: KernelWeights, spec: SystemSpec,
                       grid: GridSpec, dt=None, **kwargs) -> SystemState:
    dt = grid.dt if dt is None else dt
    parts = step_parts(state.u, w, spec, grid, dt, source=False, **kwargs)
    return SystemState(state.t + dt, parts.u_new)


def source_substep(state: SystemState, w: KernelWeights, spec: SystemSpec, dt,
                   grid: GridSpec = None, **kwargs) -> SystemState:
    """Forward Euler on ``u_t = R(u, c(u))``; the clock does not advance."""
    x = 0.0 if grid is None else grid.centers
    r, _, _ = exchange_field(state.u, w, spec, x, **kwargs)
    return SystemState(state.t, state.u + dt * r)


def split_step_parts(u, w: KernelWeights, spec: SystemSpec, grid: GridSpec, h, *,
                     kahan=False, center="symmetric", check=True) -> StepParts:
    conv = step_parts(u, w, spec, grid, h, kahan=kahan, center=center, source=False, check=check)
    v = conv.u_new
    if check:
        check_support(v, w.n_eta)
    r, s, c_center = exchange_field(v, w, spec, grid.centers, kahan=kahan, center=center)
    return conv._replace(source=r, exchange=s, c_center=c_center, u_new=v + h * r)


def split_step(state: SystemState, w: KernelWeights, spec: SystemSpec, grid: GridSpec,
               dt=None, **kwargs) -> SystemState:
    """``source_substep(convective_substep(state))`` over one step."""
    dt = grid.dt if dt is None else dt
    parts = split_step_parts(state.u, w, spec, grid, dt, **kwargs)
    return SystemState(state.t + dt, parts.u_new)
