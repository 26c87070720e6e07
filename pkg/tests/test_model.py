import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diracsplit.commutators import _apply_T, w_matrix_field
from diracsplit.grid import SpinorField, build_grid
from diracsplit.model import (PhysParams, PotentialSpec, constant_potential, gauge_shift_reference,
                              honeycomb_potential, initial_preset, paper_1d_potential, parse_preset,
                              plane_wave_amplitude, plane_wave_frequency, plane_wave_solution,
                              potential_preset, sample_potentials, zero_potential)


class TestParams:
    def test_defaults(self):
        p = PhysParams()
        assert (p.epsilon, p.delta, p.nu) == (1, 1, 1)

    def test_massless_allowed(self):
        assert PhysParams(0.5, 0.5, 0.0).nu == 0

    @pytest.mark.parametrize("kw", [dict(epsilon=0), dict(delta=0), dict(epsilon=1.5), dict(nu=-0.1),
                                    dict(nu=1.1), dict(delta=-1)])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            PhysParams(**kw)


class TestSampling:
    def test_paper_potentials_at_origin(self):
        g = build_grid(-4, 4, 8)
        s = sample_potentials(paper_1d_potential(), g)
        j = int(np.argmin(np.abs(g.nodes)))
        assert g.nodes[j] == 0
        assert s.V[j] == 1 and s.A[0][j] == 1
        assert s.magnetic

    def test_zero(self):
        g = build_grid(-1, 1, 8, 2)
        s = sample_potentials(zero_potential(2), g)
        assert not s.magnetic
        for arr in (s.V, *s.A, *s.dV, *(d for row in s.dA for d in row)):
            assert np.all(arr == 0)

    def test_honeycomb_origin(self):
        g = build_grid(-10, 10, 64, 2)
        s = sample_potentials(honeycomb_potential(), g)
        assert s.V[32, 32] == pytest.approx(3, abs=1e-14)

    def test_spectral_fallback_periodic(self):
        g = build_grid(0, 2 * np.pi, 32)
        s = sample_potentials(PotentialSpec(V=np.sin, A=(np.cos,)), g)
        assert np.abs(s.dV[0] - np.cos(g.nodes)).max() < 1e-12
        assert np.abs(s.dA[0][0] + np.sin(g.nodes)).max() < 1e-12

    def test_paper_partials(self):
        g = build_grid(-3, 3, 16)
        s = sample_potentials(paper_1d_potential(), g)
        x, h = g.nodes, 1e-6
        spec = paper_1d_potential()
        fd_V = (spec.V(x + h) - spec.V(x - h)) / (2 * h)
        fd_A = (spec.A[0](x + h) - spec.A[0](x - h)) / (2 * h)
        assert np.allclose(s.dV[0], fd_V, atol=1e-8)
        assert np.allclose(s.dA[0][0], fd_A, atol=1e-8)

    def test_non_finite_names_node(self):
        g = build_grid(-1, 1, 8)
        spec = PotentialSpec(V=lambda x: 1 / x, A=(lambda x: 0 * x,))
        with np.errstate(divide="ignore"), pytest.raises(ValueError, match=r"V is not finite at node \(4,\)"):
            sample_potentials(spec, g)

    def test_presets(self):
        assert potential_preset("paper-1d").name == "paper-1d"
        assert potential_preset("honeycomb-2d", 2).name == "honeycomb-2d"
        g = build_grid(0, 1, 8, 2)
        s = sample_potentials(potential_preset("constant(0.5, [1, 2])", 2), g)
        assert np.all(s.V == 0.5) and np.all(s.A[0] == 1) and np.all(s.A[1] == 2)
        with pytest.raises(ValueError):
            potential_preset("paper-1d", 2)
        with pytest.raises(ValueError):
            potential_preset("nope")

    def test_parse_preset(self):
        assert parse_preset("plane-wave(3, '-')") == ("plane-wave", (3, "-"))
        assert parse_preset("zero") == ("zero", ())


class TestInitialData:
    def test_gaussian_values(self):
        g = build_grid(-32, 32, 1024)
        f = initial_preset("gaussian", g, PhysParams())
        assert np.allclose(f.values[0], np.exp(-g.nodes**2 / 2))
        assert np.allclose(f.values[1], np.exp(-(g.nodes - 1) ** 2 / 2))

    def test_wkb_shape(self):
        g = build_grid(-16, 16, 256)
        f = initial_preset("wkb", g, PhysParams(delta=0.25))
        assert f.values.shape == (2, 256)
        assert np.abs(f.values).max() <= 1.0

    def test_unknown(self):
        with pytest.raises(ValueError):
            initial_preset("nope", build_grid(0, 1, 8), PhysParams())


class TestPlaneWave:
    def test_rest_frame(self):
        p = PhysParams(0.5, 1, 0.7)
        omega, B = plane_wave_amplitude([0.0], 0.0, [0.0], p, "+")
        assert omega == pytest.approx(0.7 / 0.25)
        assert np.allclose(B, [1, 0])

    def test_unit_parameters(self):
        g = build_grid(-np.pi, np.pi, 16)
        mu1 = g.wavenumbers[1]
        assert plane_wave_frequency([mu1], 0, [0], PhysParams()) == pytest.approx(np.sqrt(1 + mu1**2))

    @settings(max_examples=30, deadline=None)
    @given(st.sampled_from([0.25, 0.5, 1.0]), st.sampled_from([0.5, 1.0]), st.floats(0, 1),
           st.integers(-6, 6), st.floats(-2, 2), st.floats(-1, 1), st.sampled_from("+-"))
    def test_dispersion_matches_eigenvalue(self, eps, delta, nu, l, V0, A0, branch):
        p = PhysParams(eps, delta, nu)
        k = 2 * np.pi * l / 8
        omega, B = plane_wave_amplitude([k], V0, [A0], p, branch)
        assert omega == pytest.approx(plane_wave_frequency([k], V0, [A0], p, branch), abs=1e-10 / eps**2)
        assert np.linalg.norm(B) == pytest.approx(1)
        lead = B[np.flatnonzero(np.abs(B) > 1e-14)[0]]
        assert lead.real > 0 and abs(lead.imag) < 1e-15

    @pytest.mark.parametrize("dim", [1, 2])
    @pytest.mark.parametrize("branch", ["+", "-"])
    def test_semi_discrete_generator(self, dim, branch):
        """(T + W) applied to the plane wave equals its time derivative."""
        p = PhysParams(0.5, 0.8, 0.6)
        g = build_grid(0, 8, 32, dim)
        V0, A0 = 0.3, (0.4, -0.2)[:dim]
        k = (2 * np.pi * 3 / 8, 2 * np.pi * -2 / 8)[:dim]
        f = plane_wave_solution(k, V0, A0, p, branch, 0.7, g)
        s = sample_potentials(constant_potential(V0, A0, dim), g)
        W = w_matrix_field(s, p)
        gen = _apply_T(f.values, g, p) + np.einsum("ij...,j...->i...", W, f.values)
        omega = plane_wave_frequency(k, V0, A0, p, branch)
        assert np.abs(gen - (-1j * omega / p.delta) * f.values).max() < 1e-10

    def test_rejects_off_lattice(self):
        g = build_grid(0, 8, 32)
        with pytest.raises(ValueError, match="lattice"):
            plane_wave_solution([1.0], 0, [0], PhysParams(), "+", 0, g)
        with pytest.raises(ValueError):
            plane_wave_solution([2 * np.pi * 16 / 8], 0, [0], PhysParams(), "+", 0, g)


class TestGauge:
    def test_zero_shift(self):
        g = build_grid(0, 1, 8)
        f = SpinorField.from_components(g, np.arange(8), 1j)
        assert np.array_equal(gauge_shift_reference(f, 0.0, 3.0, PhysParams()).values, f.values)

    def test_full_revolution(self):
        g = build_grid(0, 1, 8)
        f = SpinorField.from_components(g, np.arange(8), 1j)
        p = PhysParams(delta=0.5)
        t = 1.7
        out = gauge_shift_reference(f, 2 * np.pi * p.delta / t, t, p)
        assert np.allclose(out.values, f.values, atol=1e-14)
