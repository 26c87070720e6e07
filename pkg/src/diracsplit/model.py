"""Physical parameters, Dirac/Pauli matrices, potentials, initial data and
closed-form reference solutions for the dimensionless Dirac equation

    i*delta*d_t Phi = (-i*delta/eps * sum_j sigma_j d_j + nu/eps^2 sigma_3) Phi
                      + (V I - sum_j A_j sigma_j) Phi.

The two-component field ``Phi`` is the reduction of the four-component spinor
to either ``(psi_1, psi_4)`` or ``(psi_2, psi_3)``; both pairs obey the same
two-component equation, so nothing here depends on that choice.
"""
from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .grid import Grid, SpinorField, derivative_array

__all__ = [
    "PhysParams",
    "PotentialSpec",
    "PotentialSamples",
    "sample_potentials",
    "potential_preset",
    "initial_preset",
    "plane_wave_solution",
    "plane_wave_frequency",
    "gauge_shift_reference",
    "I2", "SIGMA1", "SIGMA2", "SIGMA3", "SIGMA",
    "I4", "ALPHA1", "ALPHA2", "ALPHA3", "ALPHA", "BETA", "GAMMA",
]

I2 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA = (SIGMA1, SIGMA2, SIGMA3)

_Z2 = np.zeros((2, 2), dtype=complex)
I4 = np.eye(4, dtype=complex)
ALPHA1, ALPHA2, ALPHA3 = (np.block([[_Z2, s], [s, _Z2]]) for s in SIGMA)
ALPHA = (ALPHA1, ALPHA2, ALPHA3)
BETA = np.block([[I2, _Z2], [_Z2, -I2]])
GAMMA = np.block([[_Z2, I2], [I2, _Z2]])


def representation(ncomp: int):
    """``(identity, (a_1, a_2, a_3), mass matrix)`` for 2 or 4 components."""
    if ncomp == 2:
        return I2, SIGMA, SIGMA3
    if ncomp == 4:
        return I4, ALPHA, BETA
    raise ValueError(f"representation must have 2 or 4 components, got {ncomp}")


@dataclass(frozen=True)
class PhysParams:
    """Dimensionless parameters: eps (velocity ratio), delta (scaled Planck
    constant) and nu (mass ratio).  ``nu = 0`` is the massless limit."""

    epsilon: float = 1.0
    delta: float = 1.0
    nu: float = 1.0

    def __post_init__(self):
        if not (0 < self.epsilon <= 1 and 0 < self.delta <= 1):
            raise ValueError(f"epsilon and delta must lie in (0, 1], got {self}")
        if not 0 <= self.nu <= 1:
            raise ValueError(f"nu must lie in [0, 1], got {self.nu}")


Func = Callable[..., np.ndarray]


@dataclass(frozen=True)
class PotentialSpec:
    """Electric potential ``V`` and magnetic potentials ``A``.

    Functions take one coordinate array per dimension.  ``dV[m]`` is the
    partial of V along axis m+1 and ``dA[k][m]`` the partial of ``A[k]`` along
    axis m+1; both are optional and fall back to spectral differentiation.
    """

    V: Func
    A: tuple[Func, ...] = ()
    dV: tuple[Func, ...] | None = None
    dA: tuple[tuple[Func, ...], ...] | None = None
    name: str = "custom"


@dataclass(frozen=True, eq=False)
class PotentialSamples:
    grid: Grid
    V: np.ndarray
    A: tuple[np.ndarray, ...]
    dV: tuple[np.ndarray, ...]
    dA: tuple[tuple[np.ndarray, ...], ...]
    name: str = "custom"

    @property
    def magnetic(self) -> bool:
        return any(np.any(a != 0) for a in self.A)

    def with_shift(self, V0: float) -> "PotentialSamples":
        return PotentialSamples(self.grid, self.V + V0, self.A, self.dV, self.dA, self.name)


def _evaluate(func: Func, coords, what: str, grid: Grid) -> np.ndarray:
    vals = np.broadcast_to(np.asarray(func(*coords), dtype=float), grid.shape).copy()
    if not np.all(np.isfinite(vals)):
        idx = tuple(int(i) for i in np.argwhere(~np.isfinite(vals))[0])
        x = tuple(float(c[idx]) for c in coords)
        raise ValueError(f"{what} is not finite at node {idx} (x = {x})")
    return vals


def _spectral_partial(arr: np.ndarray, grid: Grid, axis: int) -> np.ndarray:
    return derivative_array(arr[None].astype(complex), grid, axis)[0].real


def sample_potentials(spec: PotentialSpec, grid: Grid) -> PotentialSamples:
    """Evaluate the potentials (and their first partials) at the grid nodes."""
    coords = grid.coords()
    d = grid.dim
    V = _evaluate(spec.V, coords, "V", grid)
    A = [_evaluate(f, coords, f"A{k + 1}", grid) for k, f in enumerate(spec.A[:d])]
    A += [np.zeros(grid.shape) for _ in range(d - len(A))]
    if spec.dV is not None:
        dV = [_evaluate(f, coords, f"d{m + 1}V", grid) for m, f in enumerate(spec.dV[:d])]
    else:
        dV = [_spectral_partial(V, grid, m + 1) for m in range(d)]
    dA = []
    for k in range(d):
        if spec.dA is not None and k < len(spec.dA):
            dA.append(tuple(_evaluate(f, coords, f"d{m + 1}A{k + 1}", grid)
                            for m, f in enumerate(spec.dA[k][:d])))
        else:
            dA.append(tuple(_spectral_partial(A[k], grid, m + 1) for m in range(d)))
    return PotentialSamples(grid, V, tuple(A), tuple(dV), tuple(dA), spec.name)


# ---------------------------------------------------------------------------
# Named potentials
# ---------------------------------------------------------------------------

def _zero(*x):
    return np.zeros_like(x[0], dtype=float)


def _const(c):
    return lambda *x: np.full_like(x[0], c, dtype=float)


def paper_1d_potential() -> PotentialSpec:
    """V = (1-x)/(1+x^2), A1 = (x+1)^2/(1+x^2)."""
    return PotentialSpec(
        V=lambda x: (1 - x) / (1 + x**2),
        A=(lambda x: (x + 1) ** 2 / (1 + x**2),),
        dV=(lambda x: (x**2 - 2 * x - 1) / (1 + x**2) ** 2,),
        dA=((lambda x: 2 * (1 - x**2) / (1 + x**2) ** 2,),),
        name="paper-1d",
    )


_HONEY_K = 4 * np.pi / np.sqrt(3)
_HONEY_E = ((-1.0, 0.0), (0.5, np.sqrt(3) / 2), (0.5, -np.sqrt(3) / 2))


def honeycomb_potential() -> PotentialSpec:
    """Honeycomb lattice potential sum_k cos(4*pi/sqrt(3) e_k . x), A = 0."""

    def V(x, y):
        return sum(np.cos(_HONEY_K * (e1 * x + e2 * y)) for e1, e2 in _HONEY_E)

    def dV(m):
        return lambda x, y: sum(-_HONEY_K * e[m] * np.sin(_HONEY_K * (e[0] * x + e[1] * y)) for e in _HONEY_E)

    return PotentialSpec(V=V, A=(_zero, _zero), dV=(dV(0), dV(1)),
                         dA=((_zero, _zero), (_zero, _zero)), name="honeycomb-2d")


def magnetic_test_potential() -> PotentialSpec:
    """Smooth 2D test potentials with nonzero, spatially varying A (analytic partials).

    With ``g = exp(-|x|^2/8)``: ``V = (1 + x/4) g``, ``A1 = (y/2) g``,
    ``A2 = (1 - x/3) g``.
    """

    def g(x, y):
        return np.exp(-(x**2 + y**2) / 8)

    return PotentialSpec(
        V=lambda x, y: (1 + x / 4) * g(x, y),
        A=(lambda x, y: y / 2 * g(x, y), lambda x, y: (1 - x / 3) * g(x, y)),
        dV=(lambda x, y: (0.25 - x * (1 + x / 4) / 4) * g(x, y),
            lambda x, y: -y / 4 * (1 + x / 4) * g(x, y)),
        dA=((lambda x, y: -x * y / 8 * g(x, y), lambda x, y: (0.5 - y**2 / 8) * g(x, y)),
            (lambda x, y: (-1 / 3 - x * (1 - x / 3) / 4) * g(x, y), lambda x, y: -y / 4 * (1 - x / 3) * g(x, y))),
        name="magnetic-test-2d",
    )


def zero_potential(dim: int = 1) -> PotentialSpec:
    z = tuple(_zero for _ in range(dim))
    return PotentialSpec(V=_zero, A=z, dV=z, dA=tuple(z for _ in range(dim)), name="zero")


def constant_potential(V0: float, A0: Sequence[float] | float = 0.0, dim: int = 1) -> PotentialSpec:
    A0 = np.atleast_1d(np.asarray(A0, dtype=float))
    if A0.size == 1 and dim > 1:
        A0 = np.repeat(A0, dim)
    if A0.size != dim:
        raise ValueError(f"constant A0 needs {dim} entries, got {A0.size}")
    z = tuple(_zero for _ in range(dim))
    return PotentialSpec(V=_const(V0), A=tuple(_const(a) for a in A0), dV=z,
                         dA=tuple(z for _ in range(dim)), name=f"constant({V0},{list(A0)})")


_CALL = re.compile(r"^\s*([a-z][a-z0-9-]*)\s*(?:\((.*)\))?\s*$", re.I)


def parse_preset(text: str) -> tuple[str, tuple]:
    m = _CALL.match(text)
    if not m:
        raise ValueError(f"cannot parse preset {text!r}")
    name, args = m.group(1).lower(), m.group(2)
    if args is None or not args.strip():
        return name, ()
    parsed = ast.literal_eval(f"({args},)")
    return name, tuple(parsed)


def potential_preset(name: str, dim: int = 1) -> PotentialSpec:
    """Resolve ``paper-1d``, ``honeycomb-2d``, ``magnetic-test-2d``, ``zero`` or ``constant(V0, A0)``."""
    key, args = parse_preset(name)
    if key == "paper-1d":
        if dim != 1:
            raise ValueError("paper-1d is a 1D potential")
        return paper_1d_potential()
    if key == "honeycomb-2d":
        if dim != 2:
            raise ValueError("honeycomb-2d is a 2D potential")
        return honeycomb_potential()
    if key == "magnetic-test-2d":
        if dim != 2:
            raise ValueError("magnetic-test-2d is a 2D potential")
        return magnetic_test_potential()
    if key == "zero":
        return zero_potential(dim)
    if key == "constant":
        V0 = float(args[0]) if args else 0.0
        A0 = args[1] if len(args) > 1 else 0.0
        return constant_potential(V0, A0, dim)
    raise ValueError(f"unknown potential preset {name!r}")


# ---------------------------------------------------------------------------
# Initial data
# ---------------------------------------------------------------------------

def gaussian_initial(grid: Grid) -> SpinorField:
    """phi1 = exp(-|x|^2/2), phi2 = exp(-((x1-1)^2 + ...)/2)."""
    xs = grid.coords()
    r2 = sum(x**2 for x in xs)
    shifted = (xs[0] - 1) ** 2 + sum(x**2 for x in xs[1:])
    return SpinorField.from_components(grid, np.exp(-r2 / 2), np.exp(-shifted / 2))


def wkb_initial(grid: Grid, params: PhysParams) -> SpinorField:
    """Semiclassical WKB data with phase S0(x) = (1 + cos(2*pi*x))/40."""
    if grid.dim != 1:
        raise ValueError("wkb initial data is 1D")
    (x,) = grid.coords()
    S0 = (1 + np.cos(2 * np.pi * x)) / 40
    dS0 = -2 * np.pi * np.sin(2 * np.pi * x) / 40
    amp = 0.5 * np.exp(-4 * x**2) * np.exp(1j * S0 / params.delta)
    return SpinorField.from_components(grid, amp * (1 + np.sqrt(1 + dS0**2)), amp * dS0)


def initial_preset(name: str, grid: Grid, params: PhysParams, potential: PotentialSpec | None = None) -> SpinorField:
    """Resolve ``gaussian``, ``wkb`` or ``plane-wave(l[, branch])``.

    The plane wave uses mode ``l`` along every axis and reads the constant
    potential values off ``potential`` at the first node.
    """
    key, args = parse_preset(name)
    if key == "gaussian":
        return gaussian_initial(grid)
    if key == "wkb":
        return wkb_initial(grid, params)
    if key == "plane-wave":
        l = int(args[0]) if args else 1
        branch = str(args[1]) if len(args) > 1 else "+"
        V0, A0 = constant_values(potential, grid)
        k = (2 * np.pi * l / grid.length,) * grid.dim
        return plane_wave_solution(k, V0, A0, params, branch, 0.0, grid)
    raise ValueError(f"unknown initial-data preset {name!r}")


def constant_values(potential: PotentialSpec | None, grid: Grid) -> tuple[float, tuple[float, ...]]:
    if potential is None:
        return 0.0, (0.0,) * grid.dim
    s = sample_potentials(potential, grid)
    V0 = float(s.V.flat[0])
    A0 = tuple(float(a.flat[0]) for a in s.A)
    if np.ptp(s.V) > 0 or any(np.ptp(a) > 0 for a in s.A):
        raise ValueError("plane waves need constant potentials")
    return V0, A0


# ---------------------------------------------------------------------------
# Analytic references
# ---------------------------------------------------------------------------

def _wavevector(k, dim: int) -> np.ndarray:
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if k.size != dim:
        raise ValueError(f"wavevector needs {dim} components, got {k.size}")
    return k


def plane_wave_frequency(k, V0: float, A0, params: PhysParams, branch: str = "+") -> float:
    """Dispersion relation omega(k) = V0 +- sqrt(nu^2 + eps^2 |delta k - eps A0|^2)/eps^2."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    A0 = np.atleast_1d(np.asarray(A0, dtype=float))
    eps, delta, nu = params.epsilon, params.delta, params.nu
    root = np.sqrt(nu**2 + eps**2 * np.sum((delta * k - eps * A0) ** 2)) / eps**2
    return V0 + root if branch == "+" else V0 - root


def plane_wave_amplitude(k, V0: float, A0, params: PhysParams, branch: str = "+") -> tuple[float, np.ndarray]:
    """Eigenpair (omega, B) of the constant-coefficient symbol.

    B has unit norm and its first nonzero entry is real and positive.
    """
    if branch not in ("+", "-"):
        raise ValueError(f"branch must be '+' or '-', got {branch!r}")
    k = np.atleast_1d(np.asarray(k, dtype=float))
    A0 = np.atleast_1d(np.asarray(A0, dtype=float))
    eps, delta, nu = params.epsilon, params.delta, params.nu
    H = V0 * I2 + nu / eps**2 * SIGMA3
    for j in range(k.size):
        H = H + (delta * k[j] / eps - A0[j]) * SIGMA[j]
    w, v = np.linalg.eigh(H)
    B = v[:, 1] if branch == "+" else v[:, 0]
    lead = B[np.flatnonzero(np.abs(B) > 1e-14)[0]]
    B = B * (abs(lead) / lead)
    return float(w[1] if branch == "+" else w[0]), B / np.linalg.norm(B)


def plane_wave_solution(k, V0: float, A0, params: PhysParams, branch: str, t: float, grid: Grid) -> SpinorField:
    """Exact plane wave ``B exp(i(k.x - omega t/delta))`` under constant potentials."""
    k = _wavevector(k, grid.dim)
    A0 = _wavevector(A0 if np.ndim(A0) else [A0] * grid.dim, grid.dim)
    l = k * grid.length / (2 * np.pi)
    if np.any(np.abs(l - np.round(l)) > 1e-9) or np.any(l < -grid.M // 2 - 1e-9) or np.any(l >= grid.M // 2):
        raise ValueError(f"wavevector {k} is not on the grid's wavenumber lattice")
    omega, B = plane_wave_amplitude(k, V0, A0, params, branch)
    phase = np.exp(1j * (sum(kj * x for kj, x in zip(k, grid.coords())) - omega * t / params.delta))
    return SpinorField(grid, B.reshape((2,) + (1,) * grid.dim) * phase)


def gauge_shift_reference(f: SpinorField, V0: float, t: float, params: PhysParams) -> SpinorField:
    """Solution under ``V + V0``: the solution under ``V`` times ``exp(-i V0 t/delta)``."""
    return f.with_values(f.values * np.exp(-1j * V0 * t / params.delta))
