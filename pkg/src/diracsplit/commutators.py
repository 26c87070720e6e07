"""The double commutator ``[W, [T, W]]`` in closed form and by brute force.

The closed form is a first-order operator

    [W, [T, W]] = F_0(x) + sum_k F_k(x) d_k,

    F_k = 4/(delta^2 eps) * (A_k sum_j A_j a_j - |A|^2 a_k),

where ``a_j`` are the Pauli matrices (two components) or the ``alpha_j``
(four components).  ``F_0`` collects the terms with derivatives of the
potentials and the mass term ``-4 i nu/(delta^3 eps^2) |A|^2 beta``.  With
no magnetic potential every coefficient vanishes.

Two variants of ``F_0`` are provided.  ``"corrected"`` (default) is the one
verified against the brute-force evaluation; ``"uncorrected"`` keeps an
alternative grouping of the magnetic-gradient terms that does not agree with
the brute force whenever ``A`` varies in space, kept only for comparison.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .grid import Grid, SpinorField, derivative_array
from .model import (ALPHA, BETA, GAMMA, I2, I4, SIGMA, SIGMA3, PhysParams,
                    PotentialSamples)

__all__ = [
    "CommutatorClosedForm",
    "closed_form_commutator",
    "commutator_coefficients",
    "apply_commutator",
    "brute_force_commutator",
    "brute_force_symbol",
    "verify_commutator_linearity",
    "LinearityReport",
]

VARIANTS = ("corrected", "uncorrected")


@dataclass(frozen=True, eq=False)
class CommutatorClosedForm:
    """Coefficient matrix fields of the closed form.

    ``F0`` has shape ``(n, n, *pts)`` and ``F[k]`` the same shape, where ``n``
    is the number of spinor components and ``pts`` the sample layout.
    """

    d: int
    ncomp: int
    F0: np.ndarray = field(repr=False)
    F: tuple[np.ndarray, ...] = field(repr=False)
    grid: Grid | None = None

    def is_zero(self, atol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.F0) <= atol) and all(np.all(np.abs(f) <= atol) for f in self.F))


def _pad(arrs: Sequence, d: int, shape) -> list:
    out = [np.asarray(a, dtype=float) for a in arrs[:d]]
    return out + [np.zeros(shape) for _ in range(d - len(out))]


def _scalar_terms(V, A, dV, dA, params: PhysParams, d: int, variant: str) -> dict[str, np.ndarray]:
    """Scalar coefficients of the derivative-free part in the Dirac-matrix basis.

    Keys: ``a1..a3`` (alpha_k), ``g`` (gamma), ``ga1..ga3`` (gamma alpha_k), ``b`` (beta).
    ``dA[k][m]`` is the partial of ``A_k`` along axis ``m``.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    eps, delta, nu = params.epsilon, params.delta, params.nu
    c = 4.0 / (delta**2 * eps)
    A2sum = sum(a * a for a in A)
    terms: dict[str, np.ndarray] = {"b": -4j * nu / (delta**3 * eps**2) * A2sum}
    if d == 1:
        return terms
    half = 0.5 if variant == "corrected" else 1.0
    for k in range(d):
        acc = 0.0
        for j in range(d):
            if j == k:
                continue
            if variant == "corrected":
                acc = acc + 0.5 * (A[k] * dA[j][j] + A[j] * dA[k][j]) - A[j] * dA[j][k]
            else:
                acc = acc + A[k] * dA[j][j] - A[j] * dA[j][k]
        terms[f"a{k + 1}"] = c * acc
    # gamma alpha_m terms carry the electric-field components
    cyc = ((0, 2, 1), (1, 0, 2), (2, 1, 0))  # (m, p, q): A_p dV_q - A_q dV_p
    for m, p, q in cyc:
        if max(p, q) < d:
            terms[f"ga{m + 1}"] = 1j * c * (A[p] * dV[q] - A[q] * dV[p])
    if d == 3:
        curl = (A[0] * (dA[2][1] - dA[1][2]) + A[1] * (dA[0][2] - dA[2][0])
                + A[2] * (dA[1][0] - dA[0][1]))
        terms["g"] = 1j * half * c * curl
    return terms


def commutator_coefficients(V, A, dV, dA, params: PhysParams, representation: int = 2,
                            variant: str = "corrected") -> tuple[np.ndarray, tuple[np.ndarray, ...]]:
    """``(F0, (F_1, .., F_d))`` at arbitrary sample points, ``d = len(A)``.

    ``V`` and each ``A[k]`` are arrays of a common shape; ``dV[m]`` and
    ``dA[k][m]`` are first partials (only used for ``d >= 2``).
    """
    d = len(A)
    if d not in (1, 2, 3):
        raise ValueError(f"dimension must be 1, 2 or 3, got {d}")
    if representation not in (2, 4):
        raise ValueError(f"representation must be 2 or 4, got {representation}")
    if representation == 2 and d == 3:
        raise ValueError("the three-dimensional commutator needs the 4-component representation")
    V = np.asarray(V, dtype=float)
    shape = V.shape
    A = [np.asarray(a, dtype=float) for a in A]
    if d >= 2:
        if dV is None or dA is None:
            raise ValueError("derivative samples of V and A are required for d >= 2")
        dV = _pad(dV, d, shape)
        dA = [_pad(row, d, shape) for row in dA]
    terms = _scalar_terms(V, A, dV, dA, params, d, variant)

    if representation == 4:
        basis = {f"a{k + 1}": ALPHA[k] for k in range(3)}
        basis.update({f"ga{k + 1}": GAMMA @ ALPHA[k] for k in range(3)})
        basis.update(g=GAMMA, b=BETA)
        alphas = ALPHA
    else:
        basis = {"a1": SIGMA[0], "a2": SIGMA[1], "ga3": SIGMA3, "b": SIGMA3}
        alphas = SIGMA
    n = representation
    F0 = np.zeros((n, n) + shape, dtype=complex)
    for key, coef in terms.items():
        F0 += _outer(basis[key], coef)
    c = 4.0 / (params.delta**2 * params.epsilon)
    A2sum = sum(a * a for a in A)
    F = []
    for k in range(d):
        Fk = np.zeros((n, n) + shape, dtype=complex)
        for j in range(d):
            coef = A[k] * A[j] - (A2sum if j == k else 0.0)
            Fk += _outer(alphas[j], c * coef)
        F.append(Fk)
    return F0, tuple(F)


def _outer(mat: np.ndarray, coef) -> np.ndarray:
    coef = np.asarray(coef)
    return mat.reshape(mat.shape + (1,) * coef.ndim) * coef


def closed_form_commutator(samples: PotentialSamples, params: PhysParams, d: int | None = None,
                           representation: int = 2, variant: str = "corrected") -> CommutatorClosedForm:
    """Closed-form coefficient fields from sampled potentials.

    ``d`` defaults to the number of magnetic components carried by
    ``samples``; passing ``d = 3`` with three components evaluates the
    three-dimensional form at the sample points (matrix level only).
    """
    d = len(samples.A) if d is None else d
    if len(samples.A) < d:
        raise ValueError(f"samples carry {len(samples.A)} magnetic components, d={d} requested")
    dV = samples.dV if d >= 2 else None
    dA = samples.dA if d >= 2 else None
    F0, F = commutator_coefficients(samples.V, samples.A[:d], dV, dA, params, representation, variant)
    return CommutatorClosedForm(d, representation, F0, F, samples.grid)


def _matvec(M: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.einsum("ij...,j...->i...", M, v)


def apply_commutator(cf: CommutatorClosedForm, f: SpinorField) -> SpinorField:
    """``F0 f + sum_k F_k d_k f`` with spectral derivatives."""
    if cf.grid is None or cf.grid != f.grid:
        raise ValueError("closed form and field live on different grids")
    if cf.d > f.grid.dim:
        raise ValueError("the 3D closed form is available at matrix level only")
    if f.ncomp != cf.ncomp:
        raise ValueError(f"closed form has {cf.ncomp} components, field has {f.ncomp}")
    out = _matvec(cf.F0, f.values)
    for k, Fk in enumerate(cf.F):
        out = out + _matvec(Fk, derivative_array(f.values, f.grid, k + 1))
    return f.with_values(out)


# ---------------------------------------------------------------------------
# brute force
# ---------------------------------------------------------------------------

def _rep(ncomp: int):
    return (I2, SIGMA, SIGMA3) if ncomp == 2 else (I4, ALPHA, BETA)


def w_matrix_field(samples: PotentialSamples, params: PhysParams, ncomp: int = 2) -> np.ndarray:
    """``W(x) = -(i/delta)(V I - sum_j A_j a_j)`` as an ``(n, n, *shape)`` field."""
    I, al, _ = _rep(ncomp)
    M = _outer(I, samples.V)
    for j, a in enumerate(samples.A):
        M = M - _outer(al[j], a)
    return -1j / params.delta * M


def _apply_T(values: np.ndarray, grid: Grid, params: PhysParams, a1: float = 1.0, a2: float = 1.0) -> np.ndarray:
    """``(a1 T_1 + a2 T_2) f`` with T_1 the derivative part and T_2 the mass part."""
    _, al, mass = _rep(values.shape[0])
    out = np.zeros_like(values)
    if a1:
        for k in range(grid.dim):
            out -= a1 / params.epsilon * _matvec(al[k], derivative_array(values, grid, k + 1))
    if a2:
        out -= a2 * 1j * params.nu / (params.delta * params.epsilon**2) * _matvec(mass, values)
    return out


def brute_force_commutator(samples: PotentialSamples, params: PhysParams, f: SpinorField,
                           a1: float = 1.0, a2: float = 1.0) -> SpinorField:
    """``(2WTW - WWT - TWW) f`` composed from the operator actions.

    ``a1``/``a2`` weight the derivative and mass parts of T.
    """
    if samples.grid != f.grid:
        raise ValueError("potentials and field live on different grids")
    W = w_matrix_field(samples, params, f.ncomp)
    g = f.grid

    def T(v):
        return _apply_T(v, g, params, a1, a2)

    def Wm(v):
        return _matvec(W, v)

    v = f.values
    out = 2 * Wm(T(Wm(v))) - Wm(Wm(T(v))) - T(Wm(Wm(v)))
    return f.with_values(out)


def brute_force_symbol(V, A, dV, dA, k, params: PhysParams, representation: int = 4) -> np.ndarray:
    """``(2WTW - WWT - TWW)`` acting on ``exp(i k.x) u``, as a matrix in ``u``.

    All inputs are values at a single point (or broadcastable arrays of
    points along a trailing axis).  Only the local data ``W``, ``dW`` and the
    wavevector enter; second derivatives of the potentials never appear.
    """
    I, al, mass = _rep(representation)
    d = len(A)
    eps, delta, nu = params.epsilon, params.delta, params.nu
    V = np.asarray(V, dtype=float)
    W = -1j / delta * (_outer(I, V) - sum(_outer(al[j], A[j]) for j in range(d)))
    dW = [-1j / delta * (_outer(I, dV[m]) - sum(_outer(al[j], dA[j][m]) for j in range(d))) for m in range(d)]
    Tk = sum(_outer(al[j], -1j / eps * np.asarray(k[j], dtype=float)) for j in range(d))
    Tk = Tk + _outer(-1j * nu / (delta * eps**2) * mass, np.ones_like(V))
    mm = lambda X, Y: np.einsum("ij...,jk...->ik...", X, Y)
    # T(M e^{ikx}u) = e^{ikx}(T_k M u - (1/eps) sum_m a_m (d_m M) u)
    D1 = -(1 / eps) * sum(mm(_outer(al[m], np.ones_like(V)), dW[m]) for m in range(d))
    D2 = -(1 / eps) * sum(mm(_outer(al[m], np.ones_like(V)), mm(dW[m], W) + mm(W, dW[m])) for m in range(d))
    return 2 * mm(W, mm(Tk, W) + D1) - mm(mm(W, W), Tk) - (mm(Tk, mm(W, W)) + D2)


def closed_form_symbol(V, A, dV, dA, k, params: PhysParams, representation: int = 4,
                       variant: str = "corrected") -> np.ndarray:
    """``F0 + sum_j i k_j F_j`` at the same points as :func:`brute_force_symbol`."""
    F0, F = commutator_coefficients(V, A, dV, dA, params, representation, variant)
    return F0 + sum(1j * np.asarray(k[j], dtype=float) * F[j] for j in range(len(F)))


@dataclass(frozen=True)
class LinearityReport:
    a1: float
    a2: float
    residual: float
    """``|C(a1 T1 + a2 T2) f - a1 C(T1) f - a2 C(T2) f| / max(1, |C f|)``."""
    derivative_part_norm: float
    mass_part_norm: float

    @property
    def ok(self) -> bool:
        return self.residual <= 1e-10


def _norm(v: np.ndarray, grid: Grid) -> float:
    return float(np.sqrt(grid.cell_volume * np.sum(np.abs(v) ** 2)))


def verify_commutator_linearity(samples: PotentialSamples, params: PhysParams, f: SpinorField,
                                a1: float = 1.0, a2: float = 1.0) -> LinearityReport:
    """Check that the double commutator is linear in the kinetic operator."""
    both = brute_force_commutator(samples, params, f, a1, a2).values
    d_part = brute_force_commutator(samples, params, f, 1.0, 0.0).values
    m_part = brute_force_commutator(samples, params, f, 0.0, 1.0).values
    res = _norm(both - a1 * d_part - a2 * m_part, f.grid) / max(1.0, _norm(both, f.grid))
    return LinearityReport(a1, a2, res, _norm(d_part, f.grid), _norm(m_part, f.grid))
