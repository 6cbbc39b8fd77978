"""Cell-exact kernel weights and the discrete look-ahead averages."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GhostZoneTooSmall, MismatchedSupport, NegativeWeight
from .model import KernelSpec

SUPPORT_RTOL = 1e-12
SUM_TOL = 1e-14

# 5-point Gauss-Legendre nodes/weights on [-1, 1]
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(5)

CENTER_CONVENTIONS = ("symmetric", "paper-proof")


@dataclass(frozen=True)
class KernelWeights:
    """Integrals ``zeta[p]`` of the kernel over ``[p dx, (p+1) dx]``."""

    zeta: np.ndarray
    eta: float
    n_eta: int

    def __post_init__(self):
        z = np.asarray(self.zeta, dtype=float)
        z.setflags(write=False)
        object.__setattr__(self, "zeta", z)


@dataclass(frozen=True)
class ConvolvedField:
    c_half: np.ndarray
    c_center: np.ndarray


def n_eta_for(eta: float, dx: float) -> int:
    """Number of cells covering the kernel support; raises if not an integer."""
    n = int(round(eta / dx))
    if n < 1 or abs(n * dx - eta) > SUPPORT_RTOL * eta:
        raise MismatchedSupport(f"eta={eta!r} is not an integer multiple of dx={dx!r}")
    return n


def gauss_cell_integrals(fn, edges: np.ndarray) -> np.ndarray:
    """Integrate ``fn`` over each ``[edges[j], edges[j+1]]`` with 5-point Gauss."""
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    return half * (fn(pts) @ _GL_WEIGHTS)


def discretize(kernel: KernelSpec, dx: float, n_eta: int) -> KernelWeights:
    if n_eta < 1:
        raise MismatchedSupport("n_eta must be at least 1")
    if abs(kernel.eta - n_eta * dx) > SUPPORT_RTOL * kernel.eta:
        raise MismatchedSupport(
            f"eta={kernel.eta!r} differs from n_eta*dx={n_eta * dx!r}")
    p = np.arange(n_eta, dtype=float)
    if kernel.shape == "linear_decreasing":
        # closed-form cell integral of 2 (eta - s) / eta^2
        zeta = (2.0 * (n_eta - p) - 1.0) / float(n_eta) ** 2
    elif kernel.shape == "constant":
        zeta = np.full(n_eta, 1.0 / n_eta)
    else:
        edges = np.linspace(0.0, kernel.eta, n_eta + 1)
        zeta = gauss_cell_integrals(kernel.density, edges)
        if np.any(zeta < 0):
            bad = int(np.nonzero(zeta < 0)[0][0])
            raise NegativeWeight(f"zeta[{bad}] = {zeta[bad]!r} < 0")
    total = zeta.sum()
    if not (kernel.pre_normalized and abs(total - 1.0) <= SUM_TOL):
        zeta = zeta / total
    return KernelWeights(zeta, kernel.eta, n_eta)


def weights_for_grid(kernel: KernelSpec, dx: float) -> KernelWeights:
    return discretize(kernel, dx, n_eta_for(kernel.eta, dx))


def _correlate(u: np.ndarray, zeta: np.ndarray, kahan: bool) -> np.ndarray:
    m = zeta.size
    n_out = u.shape[-1] - m + 1
    if not kahan:
        if u.ndim == 1:
            return np.correlate(u, zeta, "valid")
        return np.stack([np.correlate(row, zeta, "valid") for row in u])
    # compensated summation, p = 0..m-1 for every interface
    s = np.zeros(u.shape[:-1] + (n_out,))
    comp = np.zeros_like(s)
    for p in range(m):
        y = zeta[p] * u[..., p:p + n_out] - comp
        t = s + y
        comp = (t - s) - y
        s = t
    return s


def convolve_interfaces(u, w: KernelWeights, kahan: bool = False) -> np.ndarray:
    """Look-ahead averages ``c[j] = sum_p zeta[p] * u[j + p]``.

    ``u`` holds cell values (last axis) ending in a zero ghost zone of at
    least ``n_eta`` cells; ``c[j]`` sits on the left edge of cell ``j``.
    Works lane-wise on 2-D input.
    """
    u = np.asarray(u, dtype=float)
    m = w.n_eta
    if u.shape[-1] < m + 1:
        raise GhostZoneTooSmall(f"need more than {m} cells, got {u.shape[-1]}")
    if np.any(u[..., -m:] != 0.0):
        raise GhostZoneTooSmall(f"last {m} cells must be a zero ghost zone")
    return _correlate(u, w.zeta, kahan)


def center_values(c_half, convention: str = "symmetric") -> np.ndarray:
    """Cell-centred averages from interface values along the last axis.

    ``symmetric`` averages the two edges of a cell and returns one value
    fewer than given; ``paper-proof`` averages the right edge with the next
    interface and returns two fewer.
    """
    c = np.asarray(c_half, dtype=float)
    if convention == "symmetric":
        return 0.5 * (c[..., :-1] + c[..., 1:])
    if convention == "paper-proof":
        return 0.5 * (c[..., 1:-1] + c[..., 2:])
    raise ValueError(f"unknown center convention {convention!r}")
