"""Periodic grids, the discrete Fourier transform and spectral derivatives.

Conventions
-----------
Nodes are ``x_j = a + j*h`` for ``j = 0..M-1`` (``x_M`` is identified with
``x_0``).  Fourier coefficients follow

    U~_l = (1/M) * sum_j U_j exp(-2i*pi*j*l/M),   l = -M/2 .. M/2-1
    U_j  = sum_l U~_l exp(i*mu_l*(x_j - a)),      mu_l = 2*pi*l/(b - a)

so the forward transform carries the ``1/M`` factor.  Coefficient arrays are
stored in FFT order (``l = 0, 1, .., M/2-1, -M/2, .., -1``); use
:meth:`Grid.mode_indices` to map storage position to ``l``.  The unpaired
mode ``l = -M/2`` is kept in every transform and derivative.

Field arrays have the spinor component as leading axis: ``(ncomp, M)`` in 1D
and ``(ncomp, M, M)`` in 2D, where the last axis is the x2 index (so x2
varies fastest in C order).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as sfft

__all__ = [
    "Grid",
    "SpinorField",
    "SpectralField",
    "build_grid",
    "dft_forward",
    "dft_inverse",
    "spectral_derivative",
]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic tensor grid on ``[a, b)^dim``."""

    a: float
    b: float
    M: int
    dim: int = 1

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if int(self.M) != self.M or self.M < 4 or self.M % 2:
            raise ValueError(f"M must be an even integer >= 4, got {self.M}")
        if not self.b > self.a:
            raise ValueError(f"need b > a, got a={self.a}, b={self.b}")
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.M

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.M,) * self.dim

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    @cached_property
    def nodes(self) -> np.ndarray:
        """1D node coordinates ``x_j`` (shared by every axis)."""
        return self.a + np.arange(self.M) * self.h

    @cached_property
    def mode_indices(self) -> np.ndarray:
        """Integer mode ``l`` at each FFT storage position."""
        return np.fft.fftfreq(self.M, d=1.0 / self.M).astype(int)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """``mu_l = 2*pi*l/(b-a)`` in FFT storage order."""
        return 2 * np.pi * self.mode_indices / self.length

    def coords(self) -> tuple[np.ndarray, ...]:
        """Full coordinate arrays, one per axis, each of shape ``self.shape``."""
        if self.dim == 1:
            return (self.nodes,)
        return tuple(np.meshgrid(self.nodes, self.nodes, indexing="ij"))

    def mu(self) -> tuple[np.ndarray, ...]:
        """Full wavenumber arrays per axis, broadcast to ``self.shape``."""
        if self.dim == 1:
            return (self.wavenumbers,)
        return tuple(np.meshgrid(self.wavenumbers, self.wavenumbers, indexing="ij"))

    def refines(self, coarse: "Grid") -> int:
        """Return the node stride ``r`` if ``coarse`` nodes are every r-th node of self."""
        if coarse.dim != self.dim or coarse.a != self.a or coarse.b != self.b:
            raise ValueError("grids do not share a domain")
        if self.M % coarse.M:
            raise ValueError(f"grid with M={coarse.M} does not nest in M={self.M}")
        return self.M // coarse.M


def build_grid(a: float, b: float, M: int, dim: int = 1) -> Grid:
    return Grid(a, b, M, dim)


def _axes(dim: int) -> tuple[int, ...]:
    return tuple(range(-dim, 0))


def fft(values: np.ndarray, dim: int) -> np.ndarray:
    """Forward transform of a component-leading array with the 1/M^dim factor."""
    return sfft.fftn(values, axes=_axes(dim), norm="forward")


def ifft(coeffs: np.ndarray, dim: int) -> np.ndarray:
    return sfft.ifftn(coeffs, axes=_axes(dim), norm="forward")


def _check_shape(grid: Grid, arr: np.ndarray):
    if arr.ndim != grid.dim + 1 or arr.shape[1:] != grid.shape:
        raise ValueError(f"array of shape {arr.shape} does not match grid shape {grid.shape}")


@dataclass(frozen=True, eq=False)
class SpinorField:
    """Multi-component complex field sampled on grid nodes.

    ``values`` has shape ``(ncomp, *grid.shape)``; ``ncomp`` is 2 for the
    two-component model, 4 is accepted for the four-component commutator checks.
    """

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        _check_shape(self.grid, vals)
        if not np.all(np.isfinite(vals)):
            bad = np.argwhere(~np.isfinite(vals))[0]
            raise ValueError(f"non-finite field value at index {tuple(bad)}")
        object.__setattr__(self, "values", vals)

    @property
    def ncomp(self) -> int:
        return self.values.shape[0]

    def with_values(self, values: np.ndarray) -> "SpinorField":
        return SpinorField(self.grid, values)

    @classmethod
    def from_components(cls, grid: Grid, *components) -> "SpinorField":
        shape = grid.shape
        return cls(grid, np.stack([np.broadcast_to(np.asarray(c, dtype=complex), shape) for c in components]))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients of a :class:`SpinorField` in FFT storage order."""

    grid: Grid
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_shape(self.grid, np.asarray(self.coefficients))

    def coefficient(self, *l: int) -> np.ndarray:
        """Coefficient vector for mode(s) ``l`` with ``-M/2 <= l < M/2``."""
        M = self.grid.M
        if len(l) != self.grid.dim or any(not -M // 2 <= li < M // 2 for li in l):
            raise IndexError(f"mode {l} outside the grid's mode range")
        return self.coefficients[(slice(None), *[li % M for li in l])]


def dft_forward(f: SpinorField) -> SpectralField:
    return SpectralField(f.grid, fft(f.values, f.grid.dim))


def dft_inverse(F: SpectralField) -> SpinorField:
    return SpinorField(F.grid, ifft(F.coefficients, F.grid.dim))


def derivative_array(values: np.ndarray, grid: Grid, axis: int) -> np.ndarray:
    """Spectral derivative along 1-based ``axis`` of a component-leading array."""
    if not 1 <= axis <= grid.dim:
        raise ValueError(f"axis must be in 1..{grid.dim}, got {axis}")
    mu = grid.mu()[axis - 1]
    return ifft(1j * mu * fft(values, grid.dim), grid.dim)


def spectral_derivative(f: SpinorField, axis: int = 1) -> SpinorField:
    return SpinorField(f.grid, derivative_array(f.values, f.grid, axis))
