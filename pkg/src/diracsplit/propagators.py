"""Exact flows of the split operators.

With the equation written as ``d_t Phi = (T + W) Phi``,

* ``W = -(i/delta)(V - sum_j A_j sigma_j)`` acts pointwise in physical space,
* ``T = -(1/eps) sum_j sigma_j d_j - i nu/(delta eps^2) sigma_3`` is diagonal
  in Fourier space with per-mode symbol ``Gamma_l``,
* ``W_hat = W + tau^2/48 [W, [T, W]]`` is the commutator-corrected potential
  flow (1D only).

Every propagator is a field of 2x2 unitary matrices stored as an array of
shape ``(2, 2, *grid.shape)``.  Matrices are assembled from closed-form
eigendecompositions ``-i P Lambda P^*`` of the (anti-Hermitian) generators.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Grid, SpinorField, fft, ifft
from .model import PhysParams, PotentialSamples

__all__ = [
    "PointwisePropagator",
    "SymbolPropagator",
    "WhatPropagator",
    "build_w_propagator",
    "build_t_propagator",
    "build_what_propagator",
    "apply_pointwise",
    "apply_symbol",
    "w_eigensystem",
    "t_eigensystem",
    "what_eigensystem",
]

_HALF = np.sqrt(0.5)


@dataclass(frozen=True, eq=False)
class _MatrixField:
    grid: Grid
    matrices: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.matrices.shape != (2, 2) + self.grid.shape:
            raise ValueError(f"matrix field shape {self.matrices.shape} does not match grid {self.grid.shape}")

    def inverse(self):
        """Inverse flow; for unitary factors this is the conjugate transpose."""
        return self._replace(np.conj(np.swapaxes(self.matrices, 0, 1)))

    def compose(self, other):
        """Matrix product ``self @ other`` node by node (``other`` acts first)."""
        return self._replace(np.einsum("ik...,kj...->ij...", self.matrices, other.matrices))

    def unitarity_defect(self) -> float:
        """max over nodes of ``|U^* U - I|`` entrywise."""
        U = self.matrices
        G = np.einsum("ki...,kj...->ij...", np.conj(U), U)
        G[0, 0] -= 1
        G[1, 1] -= 1
        return float(np.abs(G).max())

    def _replace(self, matrices):
        return type(self)(self.grid, matrices)


class PointwisePropagator(_MatrixField):
    """Per-node ``exp(c*tau*W(x_j))``."""


class SymbolPropagator(_MatrixField):
    """Per-mode ``exp(c*tau*Gamma_l)`` in FFT storage order."""


@dataclass(frozen=True, eq=False)
class WhatPropagator(_MatrixField):
    """Per-node ``exp((2/3)*tau*W_hat(x_j))``; ``tau`` is kept for bookkeeping."""

    tau: float = 0.0

    def _replace(self, matrices):
        return WhatPropagator(self.grid, matrices, self.tau)


def _from_eigen(P: np.ndarray, phases: np.ndarray) -> np.ndarray:
    """``P diag(phases) P^*`` with P of shape (2, 2, ...) and phases (2, ...)."""
    return np.einsum("ik...,k...,jk...->ij...", P, phases, np.conj(P))


def _sigma1_frame(shape) -> np.ndarray:
    P = np.empty((2, 2) + shape, dtype=complex)
    P[0, 0] = P[0, 1] = P[1, 1] = _HALF
    P[1, 0] = -_HALF
    return P


# ---------------------------------------------------------------------------
# W
# ---------------------------------------------------------------------------

def _require_w_supported(samples: PotentialSamples):
    if samples.grid.dim > 1 and samples.magnetic:
        raise ValueError(
            "potential flows in 2D are only supported without magnetic potential "
            "(a magnetic 2D step needs nonuniform transforms, which are not implemented)"
        )


def w_eigensystem(samples: PotentialSamples, params: PhysParams) -> tuple[np.ndarray, np.ndarray]:
    """``(P, lam)`` with ``W(x) = -i P diag(lam) P^*`` at every node."""
    _require_w_supported(samples)
    shape = samples.grid.shape
    V = samples.V / params.delta
    if samples.grid.dim == 1:
        A = samples.A[0] / params.delta
        return _sigma1_frame(shape), np.stack([V + A, V - A]).astype(complex)
    P = np.zeros((2, 2) + shape, dtype=complex)
    P[0, 0] = P[1, 1] = 1
    return P, np.stack([V, V]).astype(complex)


def build_w_propagator(samples: PotentialSamples, c_tau: float, params: PhysParams) -> PointwisePropagator:
    """Pointwise flow ``exp(c_tau * W)``.

    In 2D (no magnetic potential) this is the scalar phase ``exp(-i c_tau V/delta)``.
    """
    P, lam = w_eigensystem(samples, params)
    grid = samples.grid
    if grid.dim == 2:
        phase = np.exp(-1j * c_tau * lam[0])
        U = np.zeros((2, 2) + grid.shape, dtype=complex)
        U[0, 0] = U[1, 1] = phase
        return PointwisePropagator(grid, U)
    return PointwisePropagator(grid, _from_eigen(P, np.exp(-1j * c_tau * lam)))


# ---------------------------------------------------------------------------
# T
# ---------------------------------------------------------------------------

def t_eigensystem(grid: Grid, params: PhysParams) -> tuple[np.ndarray, np.ndarray]:
    """1D ``(Q, D)`` with ``Gamma_l = -i Q_l diag(D_l) Q_l^*``.

    Degenerate modes (``nu = mu_l = 0``) get ``Q = I``, ``D = 0``.
    """
    if grid.dim != 1:
        raise ValueError("the explicit eigensystem of the kinetic symbol is 1D only")
    eps, delta, nu = params.epsilon, params.delta, params.nu
    mu = grid.wavenumbers
    s = delta * eps * mu
    eta = np.sqrt(nu**2 + s**2)
    norm2 = 2 * eta * (eta + nu)
    degenerate = norm2 < 1e-300
    inv = np.where(degenerate, 0.0, 1 / np.sqrt(np.where(degenerate, 1.0, norm2)))
    c = np.where(degenerate, 1.0, (eta + nu) * inv)
    sn = s * inv
    Q = np.array([[c, -sn], [sn, c]], dtype=complex)
    D = np.stack([eta, -eta]) / (delta * eps**2)
    return Q, D.astype(complex)


def _symbol_vector(grid: Grid, params: PhysParams) -> tuple[np.ndarray, ...]:
    """Components of H_l with ``Gamma_l = -i (h1 sigma1 + h2 sigma2 + h3 sigma3)``."""
    eps = params.epsilon
    mus = grid.mu()
    h3 = np.full(grid.shape, params.nu / (params.delta * eps**2))
    if grid.dim == 1:
        return mus[0] / eps, np.zeros(grid.shape), h3
    return mus[0] / eps, mus[1] / eps, h3


def build_t_propagator(grid: Grid, params: PhysParams, c_tau: float) -> SymbolPropagator:
    """Per-mode ``exp(c_tau * Gamma_l)``."""
    if grid.dim == 1:
        Q, D = t_eigensystem(grid, params)
        return SymbolPropagator(grid, _from_eigen(Q, np.exp(-1j * c_tau * D)))
    h1, h2, h3 = _symbol_vector(grid, params)
    r = np.sqrt(h1**2 + h2**2 + h3**2)
    zero = r < 1e-14 * max(1.0, params.nu / (params.delta * params.epsilon**2))
    safe = np.where(zero, 1.0, r)
    cos = np.cos(c_tau * r)
    sinc = np.where(zero, 0.0, np.sin(c_tau * r) / safe)
    U = np.empty((2, 2) + grid.shape, dtype=complex)
    U[0, 0] = cos - 1j * sinc * h3
    U[1, 1] = cos + 1j * sinc * h3
    U[0, 1] = -1j * sinc * (h1 - 1j * h2)
    U[1, 0] = -1j * sinc * (h1 + 1j * h2)
    return SymbolPropagator(grid, U)


def symbol_generator(grid: Grid, params: PhysParams) -> np.ndarray:
    """The symbol ``Gamma_l`` itself, shape (2, 2, *grid.shape)."""
    h1, h2, h3 = _symbol_vector(grid, params)
    G = np.empty((2, 2) + grid.shape, dtype=complex)
    G[0, 0] = -1j * h3
    G[1, 1] = 1j * h3
    G[0, 1] = -1j * (h1 - 1j * h2)
    G[1, 0] = -1j * (h1 + 1j * h2)
    return G


# ---------------------------------------------------------------------------
# W_hat
# ---------------------------------------------------------------------------

def what_eigensystem(samples: PotentialSamples, params: PhysParams, tau: float) -> tuple[np.ndarray, np.ndarray]:
    """``(P2, lam2)`` with ``W_hat(x) = -i P2 diag(lam2) P2^*`` (1D)."""
    if samples.grid.dim != 1:
        raise ValueError("the corrected potential flow is implemented in 1D only")
    eps, delta, nu = params.epsilon, params.delta, params.nu
    A = samples.A[0]
    beta1 = np.sqrt(144 * delta**4 * eps**4 + nu**2 * tau**4 * A**2)
    beta2 = nu * tau**2 * A
    assert np.all(beta1 >= np.abs(beta2))
    p = np.sqrt((beta1 + beta2) / (2 * beta1))
    q = np.sqrt((beta1 - beta2) / (2 * beta1))
    P = np.array([[p, q], [-q, p]], dtype=complex)
    V = samples.V / delta
    split = A * beta1 / (12 * delta**3 * eps**2)
    return P, np.stack([V + split, V - split]).astype(complex)


def build_what_propagator(samples: PotentialSamples, params: PhysParams, tau: float) -> WhatPropagator:
    """Per-node ``exp((2/3) tau W_hat)``; identical to the plain W flow when A = 0."""
    c_tau = 2.0 / 3.0 * tau
    if not samples.magnetic:
        return WhatPropagator(samples.grid, build_w_propagator(samples, c_tau, params).matrices, tau)
    P, lam = what_eigensystem(samples, params, tau)
    return WhatPropagator(samples.grid, _from_eigen(P, np.exp(-1j * c_tau * lam)), tau)


# ---------------------------------------------------------------------------
# application
# ---------------------------------------------------------------------------

def _matvec(U: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = np.empty_like(v)
    out[0] = U[0, 0] * v[0] + U[0, 1] * v[1]
    out[1] = U[1, 0] * v[0] + U[1, 1] * v[1]
    return out


def _check_grid(p: _MatrixField, f: SpinorField):
    if p.grid != f.grid:
        raise ValueError("propagator and field live on different grids")


def apply_pointwise_array(p: _MatrixField, values: np.ndarray) -> np.ndarray:
    return _matvec(p.matrices, values)


def apply_symbol_array(p: SymbolPropagator, values: np.ndarray) -> np.ndarray:
    d = p.grid.dim
    return ifft(_matvec(p.matrices, fft(values, d)), d)


def apply_pointwise(p: PointwisePropagator | WhatPropagator, f: SpinorField) -> SpinorField:
    _check_grid(p, f)
    return f.with_values(apply_pointwise_array(p, f.values))


def apply_symbol(p: SymbolPropagator, f: SpinorField) -> SpinorField:
    _check_grid(p, f)
    return f.with_values(apply_symbol_array(p, f.values))
