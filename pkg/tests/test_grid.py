import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diracsplit.grid import (Grid, SpinorField, build_grid, dft_forward, dft_inverse, spectral_derivative)


def _random_field(grid, rng, ncomp=2):
    shape = (ncomp,) + grid.shape
    return SpinorField(grid, rng.normal(size=shape) + 1j * rng.normal(size=shape))


def _direct_dft(values, M):
    """O(M^2) forward sum with the 1/M factor, FFT storage order."""
    j = np.arange(M)
    l = np.fft.fftfreq(M, 1.0 / M)
    E = np.exp(-2j * np.pi * np.outer(l, j) / M)
    return values @ E.T / M


class TestGrid:
    def test_paper_1d(self):
        g = build_grid(-32, 32, 1024)
        assert g.h == 1 / 16
        assert np.isclose(g.wavenumbers[1], 2 * np.pi / 64)
        assert g.nodes[0] == -32 and g.nodes[-1] == 32 - 1 / 16

    def test_two_pi_box(self):
        g = build_grid(0, 2 * np.pi, 4)
        assert sorted(np.round(g.wavenumbers, 14)) == [-2, -1, 0, 1]

    def test_honeycomb_2d(self):
        g = build_grid(-10, 10, 640, 2)
        assert g.shape == (640, 640) and g.h == 1 / 32
        x1, x2 = g.coords()
        assert x1.shape == (640, 640)
        # second index varies fastest along x2
        assert x2[0, 1] - x2[0, 0] == g.h and x1[0, 1] == x1[0, 0]

    def test_unpaired_mode(self):
        g = build_grid(-1, 1, 8)
        l = sorted(g.mode_indices)
        assert l == list(range(-4, 4))
        assert -4 in l and 4 not in l

    @pytest.mark.parametrize("M", [3, 2, 0, 7])
    def test_rejects_bad_M(self, M):
        with pytest.raises(ValueError):
            build_grid(0, 1, M)

    def test_rejects_bad_interval(self):
        with pytest.raises(ValueError):
            build_grid(1, 1, 8)
        with pytest.raises(ValueError):
            build_grid(2, 1, 8)

    def test_rejects_dim(self):
        with pytest.raises(ValueError):
            Grid(0, 1, 8, 3)

    def test_refines(self):
        assert Grid(0, 1, 64).refines(Grid(0, 1, 16)) == 4
        with pytest.raises(ValueError):
            Grid(0, 1, 64).refines(Grid(0, 1, 24))


class TestTransforms:
    def test_constant_field_dc(self):
        g = build_grid(0, 1, 16)
        F = dft_forward(SpinorField.from_components(g, 1, 0))
        assert np.allclose(F.coefficient(0), [1, 0], atol=1e-15)
        F.coefficients[:, 0] = 0
        assert np.abs(F.coefficients).max() < 1e-15

    def test_single_mode(self):
        g = build_grid(-3, 5, 32)
        mu3 = 2 * np.pi * 3 / g.length
        f = SpinorField.from_components(g, 0, np.exp(1j * mu3 * (g.nodes - g.a)))
        F = dft_forward(f)
        assert np.allclose(F.coefficient(3), [0, 1], atol=1e-14)
        F.coefficients[:, 3] = 0
        assert np.abs(F.coefficients).max() < 1e-14

    def test_matches_direct_sum(self):
        g = build_grid(0, 1, 16)
        f = _random_field(g, np.random.default_rng(1))
        assert np.allclose(dft_forward(f).coefficients, _direct_dft(f.values, 16), atol=1e-14)

    @pytest.mark.parametrize("M", [8, 16, 64, 256])
    @pytest.mark.parametrize("dim", [1, 2])
    def test_round_trip(self, M, dim):
        if dim == 2 and M == 256:
            M = 128
        g = build_grid(-2, 3, M, dim)
        f = _random_field(g, np.random.default_rng(M))
        back = dft_inverse(dft_forward(f)).values
        assert np.linalg.norm(back - f.values) <= 1e-12 * np.linalg.norm(f.values)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 7), st.integers(0, 2**31), st.floats(0.5, 50))
    def test_parseval(self, log2M, seed, L):
        g = build_grid(-L / 2, L / 2, 2**log2M)
        f = _random_field(g, np.random.default_rng(seed))
        lhs = g.h * np.sum(np.abs(f.values) ** 2)
        rhs = g.length * np.sum(np.abs(dft_forward(f).coefficients) ** 2)
        assert abs(lhs - rhs) <= 1e-12 * lhs

    def test_parseval_2d(self):
        g = build_grid(-1, 1, 32, 2)
        f = _random_field(g, np.random.default_rng(5))
        lhs = g.cell_volume * np.sum(np.abs(f.values) ** 2)
        rhs = g.length**2 * np.sum(np.abs(dft_forward(f).coefficients) ** 2)
        assert abs(lhs - rhs) <= 1e-12 * lhs

    def test_shape_mismatch(self):
        g = build_grid(0, 1, 16)
        with pytest.raises(ValueError):
            SpinorField(g, np.zeros((2, 8)))

    def test_non_finite_rejected(self):
        g = build_grid(0, 1, 8)
        v = np.zeros((2, 8), complex)
        v[1, 3] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            SpinorField(g, v)


class TestDerivative:
    def test_sine_mode(self):
        g = build_grid(-1, 2, 64)
        mu2 = 2 * np.pi * 2 / g.length
        x = g.nodes - g.a
        d = spectral_derivative(SpinorField.from_components(g, np.sin(mu2 * x), 0))
        assert np.abs(d.values[0] - mu2 * np.cos(mu2 * x)).max() < 1e-12
        assert np.abs(d.values[1]).max() < 1e-14

    def test_constant(self):
        g = build_grid(-1, 2, 32, 2)
        f = SpinorField.from_components(g, 3, 1j)
        for axis in (1, 2):
            assert np.abs(spectral_derivative(f, axis).values).max() < 1e-13

    def test_gaussian_vs_finite_difference(self):
        g = build_grid(-32, 32, 1024)
        x = g.nodes
        f = SpinorField.from_components(g, np.exp(-x**2 / 2), np.exp(-x**2 / 2))
        eps = 1e-4
        fd = (np.exp(-(x + eps) ** 2 / 2) - np.exp(-(x - eps) ** 2 / 2)) / (2 * eps)
        d = spectral_derivative(f).values
        for c in range(2):
            assert np.linalg.norm(d[c] - fd) <= 1e-6 * np.linalg.norm(fd)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(-15, 15), st.integers(-15, 15))
    def test_resolved_modes_2d(self, l1, l2):
        g = build_grid(0, 4, 32, 2)
        x1, x2 = g.coords()
        m1, m2 = 2 * np.pi * l1 / 4, 2 * np.pi * l2 / 4
        e = np.exp(1j * (m1 * x1 + m2 * x2))
        f = SpinorField.from_components(g, e, 2 * e)
        assert np.abs(spectral_derivative(f, 1).values - 1j * m1 * f.values).max() < 1e-11
        assert np.abs(spectral_derivative(f, 2).values - 1j * m2 * f.values).max() < 1e-11

    def test_unpaired_mode_kept(self):
        g = build_grid(0, 2 * np.pi, 8)
        f = SpinorField.from_components(g, np.exp(-4j * g.nodes), 0)
        d = spectral_derivative(f).values[0]
        assert np.allclose(d, -4j * f.values[0], atol=1e-12)

    def test_bad_axis(self):
        g = build_grid(0, 1, 8)
        with pytest.raises(ValueError):
            spectral_derivative(SpinorField.from_components(g, 1, 1), 2)
