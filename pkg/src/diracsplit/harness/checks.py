"""Closed-form vs brute-force double-commutator comparison."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..commutators import (apply_commutator, brute_force_commutator, brute_force_symbol,
                           closed_form_commutator, closed_form_symbol)
from ..grid import Grid, SpinorField
from ..model import PhysParams, magnetic_test_potential, paper_1d_potential, sample_potentials

__all__ = ["CommutatorCheck", "commutator_check", "smooth_test_field"]

FIELD_TOL = 1e-7
SYMBOL_TOL = 1e-12


@dataclass(frozen=True)
class CommutatorCheck:
    dim: int
    representation: int
    variant: str
    error: float
    """Relative l2 error (field level) or max entrywise error (symbol level)."""
    tolerance: float
    samples: int

    @property
    def passed(self) -> bool:
        return self.error <= self.tolerance


def smooth_test_field(grid: Grid, ncomp: int, rng: np.random.Generator) -> SpinorField:
    """Random superposition of shifted, modulated Gaussians, one per component."""
    xs = grid.coords()
    comps = []
    for _ in range(ncomp):
        c = rng.uniform(-0.5, 0.5, grid.dim)
        k = rng.uniform(-2, 2, grid.dim)
        w = rng.uniform(0.35, 0.5)
        amp = rng.normal() + 1j * rng.normal()
        r2 = sum((x - ci) ** 2 for x, ci in zip(xs, c))
        phase = sum(ki * x for ki, x in zip(k, xs))
        comps.append(amp * np.exp(-r2 / (2 * w**2) + 1j * phase))
    return SpinorField.from_components(grid, *comps)


def commutator_check(dim: int, representation: int = 2, M: int = 128, params: PhysParams | None = None,
                     variant: str = "corrected", n_fields: int = 20, n_points: int = 100,
                     seed: int = 0) -> CommutatorCheck:
    """Compare the closed form with the brute force composition.

    ``dim`` 1 and 2 compare on fields (worst relative l2 error over
    ``n_fields`` random smooth fields on ``(-4, 4)^dim``); ``dim = 3``
    compares the operator symbols at ``n_points`` random ``(x, k)`` points.
    """
    params = params or PhysParams()
    rng = np.random.default_rng(seed)
    if dim == 3:
        if representation != 4:
            raise ValueError("the 3D check uses the 4-component representation")
        V = rng.normal(size=n_points)
        A = rng.normal(size=(3, n_points))
        dV = rng.normal(size=(3, n_points))
        dA = rng.normal(size=(3, 3, n_points))
        k = rng.normal(scale=2.0, size=(3, n_points))
        b = brute_force_symbol(V, A, dV, dA, k, params, 4)
        c = closed_form_symbol(V, A, dV, dA, k, params, 4, variant)
        return CommutatorCheck(3, 4, variant, float(np.abs(b - c).max()), SYMBOL_TOL, n_points)
    grid = Grid(-4, 4, M, dim)
    spec = paper_1d_potential() if dim == 1 else magnetic_test_potential()
    samples = sample_potentials(spec, grid)
    cf = closed_form_commutator(samples, params, dim, representation, variant)
    worst = 0.0
    for _ in range(n_fields):
        f = smooth_test_field(grid, representation, rng)
        brute = brute_force_commutator(samples, params, f).values
        closed = apply_commutator(cf, f).values
        worst = max(worst, float(np.linalg.norm(closed - brute) / np.linalg.norm(brute)))
    return CommutatorCheck(dim, representation, variant, worst, FIELD_TOL, n_fields)
