"""Spectral time-splitting solvers for the dimensionless Dirac equation in 1D and 2D."""

__version__ = "0.1.0"

from .grid import Grid, SpectralField, SpinorField, build_grid, dft_forward, dft_inverse, spectral_derivative
from .model import PhysParams, PotentialSpec, PotentialSamples, sample_potentials, plane_wave_solution, gauge_shift_reference
from .splitting import SchemeId, build_plan, evolve, step

__all__ = [
    "__version__", "Grid", "SpectralField", "SpinorField", "build_grid", "dft_forward", "dft_inverse",
    "spectral_derivative", "PhysParams", "PotentialSpec", "PotentialSamples", "sample_potentials",
    "plane_wave_solution", "gauge_shift_reference", "SchemeId", "build_plan", "evolve", "step",
]
