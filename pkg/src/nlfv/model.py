"""Traffic system definition: lanes, look-ahead kernel and lane-exchange terms.

Lanes follow the convention ``f(u) = u * g(u)`` with the convective velocity
``nu(x, c) = v_scale * eta_factor(x) * shape(c)`` evaluated at the nonlocal
average ``c`` of the lane's own density.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

ArrayFn = Callable[[np.ndarray], np.ndarray]

MONOTONE_SAMPLES = 1001
FD_STEP = 1e-6

KERNEL_SHAPES = ("linear_decreasing", "constant", "tabulated")


def _lwr_g(u):
    return 1.0 - np.asarray(u, dtype=float)


def _lwr_dg(u):
    return np.full_like(np.asarray(u, dtype=float), -1.0)


def _unit_g(u):
    return np.ones_like(np.asarray(u, dtype=float))


def _unit_dg(u):
    return np.zeros_like(np.asarray(u, dtype=float))


def _one_minus(c):
    return 1.0 - np.asarray(c, dtype=float)


def central_difference(fn: ArrayFn, h: float = FD_STEP) -> ArrayFn:
    def deriv(u):
        u = np.asarray(u, dtype=float)
        return (fn(u + h) - fn(u - h)) / (2.0 * h)

    return deriv


@dataclass(frozen=True)
class LaneModel:
    """One lane: flux factor ``g``, velocity scale and velocity shape.

    ``lip_f`` and ``nu_sup`` are derived by sampling on [0, 1] when not given.
    """

    v_scale: float
    g: ArrayFn = _lwr_g
    g_derivative: Optional[ArrayFn] = None
    shape: ArrayFn = _one_minus
    eta_factor: Optional[Callable[[np.ndarray], np.ndarray]] = None
    lip_f: Optional[float] = None
    nu_sup: Optional[float] = None
    name: str = "custom"

    def __post_init__(self):
        if self.g_derivative is None:
            object.__setattr__(self, "g_derivative", central_difference(self.g))
        u = np.linspace(0.0, 1.0, MONOTONE_SAMPLES)
        if self.lip_f is None:
            lip = float(np.max(np.abs(self.f_prime(u))))
            object.__setattr__(self, "lip_f", lip)
        if self.nu_sup is None:
            sup_shape = float(np.max(np.abs(self.shape(u))))
            sup_factor = 1.0
            if self.eta_factor is not None:
                xs = np.linspace(-10.0, 10.0, 2001)
                sup_factor = float(np.max(np.abs(self.eta_factor(xs))))
            object.__setattr__(self, "nu_sup", abs(self.v_scale) * sup_shape * sup_factor)

    @classmethod
    def lwr(cls, v_scale: float, **kwargs) -> "LaneModel":
        """Greenshields lane: ``g(u) = 1 - u``, ``nu = v_scale * (1 - c)``."""
        return cls(v_scale=v_scale, g=_lwr_g, g_derivative=_lwr_dg,
                   lip_f=1.0, name="lwr", **kwargs)

    @classmethod
    def linear(cls, v_scale: float, **kwargs) -> "LaneModel":
        """Lane with ``g = 1`` so ``f(u) = u``; the class used for the local limit."""
        return cls(v_scale=v_scale, g=_unit_g, g_derivative=_unit_dg,
                   lip_f=1.0, name="linear", **kwargs)

    def f(self, u):
        u = np.asarray(u, dtype=float)
        return u * self.g(u)

    def f_prime(self, u):
        u = np.asarray(u, dtype=float)
        return self.g(u) + u * self.g_derivative(u)

    def nu(self, x, c):
        val = self.v_scale * self.shape(c)
        if self.eta_factor is not None:
            val = val * self.eta_factor(np.asarray(x, dtype=float))
        return val

    def max_abs_g_derivative(self) -> float:
        u = np.linspace(0.0, 1.0, MONOTONE_SAMPLES)
        return float(np.max(np.abs(self.g_derivative(u))))


@dataclass(frozen=True)
class KernelSpec:
    """Look-ahead kernel on [0, eta].

    ``linear_decreasing`` is ``2 (eta - s) / eta**2`` and ``constant`` is
    ``1 / eta``. ``tabulated`` takes equispaced samples on [0, eta] joined by
    straight lines and scaled to unit mass unless ``pre_normalized``.
    """

    shape: str = "linear_decreasing"
    eta: float = 0.0625
    samples: Optional[Sequence[float]] = None
    pre_normalized: bool = False

    def __post_init__(self):
        if self.shape not in KERNEL_SHAPES:
            raise ValueError(f"unknown kernel shape {self.shape!r}")
        if self.shape == "tabulated":
            if self.samples is None or len(self.samples) < 2:
                raise ValueError("tabulated kernel needs at least two samples")
            object.__setattr__(self, "samples", tuple(float(s) for s in self.samples))

    def with_eta(self, eta: float) -> "KernelSpec":
        return KernelSpec(self.shape, eta, self.samples, self.pre_normalized)

    def _raw_mass(self) -> float:
        s = np.asarray(self.samples)
        h = self.eta / (len(s) - 1)
        return float(h * (s.sum() - 0.5 * (s[0] + s[-1])))

    def density(self, s):
        """Normalized kernel value at ``s``; zero outside [0, eta]."""
        s = np.asarray(s, dtype=float)
        inside = (s >= 0.0) & (s <= self.eta)
        if self.shape == "linear_decreasing":
            val = 2.0 * (self.eta - s) / self.eta**2
        elif self.shape == "constant":
            val = np.full_like(s, 1.0 / self.eta)
        else:
            nodes = np.linspace(0.0, self.eta, len(self.samples))
            val = np.interp(s, nodes, self.samples)
            if not self.pre_normalized:
                val = val / self._raw_mass()
        return np.where(inside, val, 0.0)


@dataclass(frozen=True)
class SystemSpec:
    """Ordered lanes sharing one kernel.

    ``source_lipschitz`` defaults to ``2 * max(v_scale) * max(1, max|g'|)``
    and to zero for a single lane. ``exchange=False`` switches the lane
    exchange off entirely.
    """

    lanes: tuple
    kernel: KernelSpec = field(default_factory=KernelSpec)
    source_lipschitz: Optional[float] = None
    exchange: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lanes", tuple(self.lanes))
        if self.source_lipschitz is None:
            if len(self.lanes) < 2 or not self.exchange:
                lip = 0.0
            else:
                vmax = max(abs(l.v_scale) for l in self.lanes)
                gmax = max(l.max_abs_g_derivative() for l in self.lanes)
                lip = 2.0 * vmax * max(1.0, gmax)
            object.__setattr__(self, "source_lipschitz", lip)

    @property
    def n_lanes(self) -> int:
        return len(self.lanes)

    @property
    def has_source(self) -> bool:
        return self.exchange and len(self.lanes) > 1

    def with_kernel(self, kernel: KernelSpec) -> "SystemSpec":
        return SystemSpec(self.lanes, kernel, self.source_lipschitz, self.exchange)


def two_lane_system(eta: float = 0.0625, v_scales=(1.5, 2.5), lane=LaneModel.lwr,
                    kernel_shape: str = "linear_decreasing") -> SystemSpec:
    """The two-lane road used throughout the experiments (second lane fastest)."""
    lanes = tuple(lane(v) for v in v_scales)
    return SystemSpec(lanes, KernelSpec(kernel_shape, eta))


@dataclass(frozen=True)
class Violation:
    assumption: str
    message: str
    witness: object = None

    def __str__(self):
        return f"{self.assumption}: {self.message} (witness={self.witness})"


def validate_system(spec: SystemSpec, x_samples=None, tol: float = 1e-12) -> list:
    """Return every violated modelling assumption; an empty list means valid."""
    report = []
    if len(spec.lanes) < 1:
        report.append(Violation("N", "system needs at least one lane"))
    u = np.linspace(0.0, 1.0, MONOTONE_SAMPLES)
    xs = np.linspace(-10.0, 10.0, 201) if x_samples is None else np.asarray(x_samples, float)
    for k, lane in enumerate(spec.lanes):
        g1 = float(lane.g(np.array([1.0]))[0])
        if abs(g1) > tol:
            report.append(Violation("A1", f"lane {k}: g(1) = {g1!r} != 0", 1.0))
        gu = lane.g(u)
        rises = np.nonzero(np.diff(gu) > tol)[0]
        if rises.size:
            j = int(rises[0])
            report.append(Violation("A1", f"lane {k}: g increases", (u[j], u[j + 1])))
        fp = np.abs(lane.f_prime(u))
        if lane.lip_f + tol < fp.max():
            j = int(np.argmax(fp))
            report.append(Violation("A1", f"lane {k}: lip_f={lane.lip_f} below |f'|={fp[j]}", u[j]))
        X, C = np.meshgrid(xs, u[::10], indexing="ij")
        nu = np.asarray(lane.nu(X, C), dtype=float)
        if not np.all(np.isfinite(nu)):
            report.append(Violation("A2", f"lane {k}: velocity not finite"))
        elif np.max(np.abs(nu)) > lane.nu_sup * (1 + 1e-9) + tol:
            idx = np.unravel_index(np.argmax(np.abs(nu)), nu.shape)
            report.append(Violation("A2", f"lane {k}: |nu| exceeds nu_sup={lane.nu_sup}",
                                    (X[idx], C[idx])))
        if lane.eta_factor is not None:
            fac = np.asarray(lane.eta_factor(xs), dtype=float)
            if not np.all(np.isfinite(fac)):
                report.append(Violation("A3", f"lane {k}: eta_factor not finite"))
    report.extend(_kernel_violations(spec.kernel, tol))
    return report


def _kernel_violations(kernel: KernelSpec, tol: float) -> list:
    out = []
    if not kernel.eta > 0:
        return [Violation("A4", "kernel support eta must be positive", kernel.eta)]
    if kernel.shape == "tabulated":
        s = np.asarray(kernel.samples)
        neg = np.nonzero(s < 0)[0]
        if neg.size:
            out.append(Violation("A4", "kernel sample negative", int(neg[0])))
        rises = np.nonzero(np.diff(s) > tol)[0]
        if rises.size:
            j = int(rises[0])
            out.append(Violation("A4", "kernel increases between samples", (j, j + 1)))
    else:
        s = np.linspace(0.0, kernel.eta, MONOTONE_SAMPLES)
        w = kernel.density(s)
        if np.any(w < 0) or np.any(np.diff(w) > tol):
            out.append(Violation("A4", "kernel not non-negative and non-increasing"))
    return out


def source_exchange(spec: SystemSpec, k: int, x, a, b, A, B):
    """Rate ``S^k`` of cars leaving lane ``k`` for lane ``k + 1``.

    Lanes are numbered 1..N here, so ``k = 0`` and ``k = N`` are the road
    edges where nothing crosses. ``a, b`` are the lane densities and
    ``A, B`` their nonlocal averages.
    """
    n = spec.n_lanes
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if k <= 0 or k >= n or not spec.exchange:
        return np.zeros(np.broadcast(a, b, np.asarray(A), np.asarray(B)).shape)
    lo, hi = spec.lanes[k - 1], spec.lanes[k]
    dv = hi.g(b) * hi.nu(x, B) - lo.g(a) * lo.nu(x, A)
    return np.maximum(dv, 0.0) * a - np.maximum(-dv, 0.0) * b


def exchange_rates(spec: SystemSpec, x, u, c):
    """All boundary rates ``S^0..S^N`` for lane arrays ``u, c`` of shape (N, n)."""
    n_lanes, n = u.shape
    s = np.zeros((n_lanes + 1, n))
    if spec.has_source:
        for k in range(1, n_lanes):
            s[k] = source_exchange(spec, k, x, u[k - 1], u[k], c[k - 1], c[k])
    return s


def source_terms(spec: SystemSpec, x, u, c):
    """Net inflow ``R^k = S^{k-1} - S^k`` per lane; shape (N, n)."""
    s = exchange_rates(spec, x, u, c)
    return s[:-1] - s[1:]
