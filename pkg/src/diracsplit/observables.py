"""Mass, density, current, energy and error norms.

All quadratures are the nodal rule ``h^dim * sum_nodes``, matching the
discrete l2 norm used for the errors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, SpinorField, derivative_array
from .model import SIGMA, SIGMA3, PhysParams, PotentialSamples

__all__ = [
    "ObservableRecord",
    "mass",
    "density",
    "current",
    "energy",
    "l2_norm",
    "l2_error",
    "subsample",
    "conservation_residual",
]


@dataclass(frozen=True)
class ObservableRecord:
    t: float
    mass: float
    energy: float
    e_phi: float | None = None
    e_rho: float | None = None
    e_J: float | None = None
    relative: bool = False

    def __post_init__(self):
        if self.mass < 0:
            raise ValueError("mass must be non-negative")
        vals = [self.t, self.mass, self.energy, self.e_phi, self.e_rho, self.e_J]
        if not all(np.isfinite(v) for v in vals if v is not None):
            raise ValueError(f"non-finite entry in observable record {self}")


def _bilinear(values: np.ndarray, mat: np.ndarray, other: np.ndarray | None = None) -> np.ndarray:
    """Nodewise ``u^* mat v`` for component-leading arrays."""
    other = values if other is None else other
    return np.einsum("i...,ij,j...->...", np.conj(values), mat, other)


def mass(f: SpinorField) -> float:
    return float(f.grid.cell_volume * np.sum(np.abs(f.values) ** 2))


def density(f: SpinorField) -> np.ndarray:
    """``rho = |phi_1|^2 + |phi_2|^2`` at each node."""
    return np.sum(np.abs(f.values) ** 2, axis=0)


def current(f: SpinorField, params: PhysParams) -> np.ndarray:
    """``J_l = Phi^* sigma_l Phi / eps`` for ``l = 1..dim``; shape ``(dim, *grid.shape)``."""
    scale = float(np.max(np.abs(f.values) ** 2))
    out = []
    for l in range(f.grid.dim):
        J = _bilinear(f.values, SIGMA[l])
        resid = float(np.max(np.abs(J.imag))) if J.size else 0.0
        assert resid <= 1e-14 * scale, f"current has imaginary residual {resid:.3e}"
        out.append(J.real / params.epsilon)
    return np.stack(out)


def energy(f: SpinorField, samples: PotentialSamples, params: PhysParams) -> float:
    """Total energy with spectral derivatives."""
    if samples.grid != f.grid:
        raise ValueError("potentials and field live on different grids")
    g = f.grid
    eps, delta, nu = params.epsilon, params.delta, params.nu
    v = f.values
    dens = np.sum(np.abs(v) ** 2, axis=0)
    e = nu / eps**2 * _bilinear(v, SIGMA3) + samples.V * dens
    for j in range(g.dim):
        dv = derivative_array(v, g, j + 1)
        e = e - 1j * delta / eps * _bilinear(v, SIGMA[j], dv) - samples.A[j] * _bilinear(v, SIGMA[j])
    total = complex(g.cell_volume * np.sum(e))
    assert abs(total.imag) <= 1e-10 * (1 + abs(total.real)), f"energy has imaginary part {total.imag:.3e}"
    return total.real


def subsample(ref: np.ndarray, fine: Grid, coarse: Grid) -> np.ndarray:
    """Nodal values of a fine-grid array at the nodes of a nested coarse grid."""
    r = fine.refines(coarse)
    idx = (slice(None),) * (ref.ndim - fine.dim) + (slice(None, None, r),) * fine.dim
    return ref[idx]


def l2_norm(values: np.ndarray, grid: Grid) -> float:
    return float(np.sqrt(grid.cell_volume * np.sum(np.abs(values) ** 2)))


def l2_error(num: SpinorField, ref: SpinorField, relative: bool = False, quantity: str = "phi",
             params: PhysParams | None = None) -> float:
    """Discrete l2 distance between ``num`` and ``ref`` on ``num``'s grid.

    ``quantity`` selects the wave function (``"phi"``), the density
    (``"rho"``) or the current (``"J"``, needs ``params``).  A reference on a
    finer nested grid is subsampled; non-nesting grids are rejected.
    """
    g = num.grid
    ref_vals = ref.values if ref.grid == g else subsample(ref.values, ref.grid, g)
    if quantity == "phi":
        a, b = num.values, ref_vals
    elif quantity == "rho":
        a, b = density(num), np.sum(np.abs(ref_vals) ** 2, axis=0)
    elif quantity == "J":
        if params is None:
            raise ValueError("current errors need the physical parameters")
        a, b = current(num, params), current(SpinorField(g, ref_vals), params)
    else:
        raise ValueError(f"quantity must be 'phi', 'rho' or 'J', got {quantity!r}")
    err = l2_norm(a - b, g)
    if relative:
        nrm = l2_norm(b, g)
        if nrm == 0:
            raise ZeroDivisionError("relative error against a zero reference")
        err /= nrm
    return err


def conservation_residual(before: SpinorField, now: SpinorField, after: SpinorField, dt: float,
                          params: PhysParams) -> float:
    """l2 norm of ``d_t rho + div J`` at the middle time.

    ``d_t rho`` is the centered difference over ``2*dt`` and the divergence
    is spectral.
    """
    g = now.grid
    drho = (density(after) - density(before)) / (2 * dt)
    J = current(now, params)
    div = sum(derivative_array(J[l][None].astype(complex), g, l + 1)[0].real for l in range(g.dim))
    return l2_norm(drho + div, g)
