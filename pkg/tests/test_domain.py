import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bogospec.domain import (
    BOX,
    TORUS,
    ExternalPotentialSpec,
    GridSpec,
    InteractionSpec,
    ModeBasis,
    convolve_density,
    fourier_coefficient,
    grid_fourier_coefficients,
    kernel_matrix,
    make_discretization,
    stencil_symbol,
    validate_positive_type,
)


class TestDiscretization:
    def test_torus_n8(self):
        g = make_discretization({"kind": "torus", "n": 8})
        assert g.h == 1 / 8
        np.testing.assert_array_equal(g.w, np.full(8, 1 / 8))

    def test_box_weights(self):
        g = make_discretization({"kind": "box", "L": 8, "n": 256})
        assert g.h == 1 / 16
        assert g.node_weights.sum() == 16.0
        assert g.size == 255

    def test_mode_cutoff(self):
        b = make_discretization({"kind": "modes", "d": 1, "K": 2})
        np.testing.assert_allclose(b.modes[:, 0], [-4 * np.pi, -2 * np.pi, 0, 2 * np.pi, 4 * np.pi])

    @pytest.mark.parametrize("cfg", [
        {"kind": "torus", "n": 7},
        {"kind": "box", "L": 0.0, "n": 64},
        {"kind": "box", "L": -1.0, "n": 64},
        {"kind": "modes", "d": 1, "K": 0},
        {"kind": "sphere", "n": 64},
    ])
    def test_rejects(self, cfg):
        with pytest.raises(ValueError):
            make_discretization(cfg)

    @given(st.integers(1, 3), st.integers(1, 3))
    def test_modes_symmetric_with_single_zero(self, d, K):
        modes = ModeBasis(d, K).modes
        assert np.sum(np.all(modes == 0, axis=1)) == 1
        assert {tuple(p) for p in modes} == {tuple(-p + 0.0) for p in modes}

    @given(st.integers(8, 400), st.floats(0.1, 50))
    def test_weights_sum_to_length(self, n, L):
        assert np.isclose(GridSpec(BOX, n, L).node_weights.sum(), 2 * L, rtol=1e-14)
        assert np.isclose(GridSpec(TORUS, n).node_weights.sum(), 1.0, rtol=1e-14)

    @given(st.integers(16, 512))
    def test_torus_quadrature(self, n):
        g = GridSpec(TORUS, n)
        assert abs(g.integrate(np.ones(n)) - 1.0) < 1e-14
        assert abs(g.integrate(np.sin(2 * np.pi * g.x) ** 2) - 0.5) < 1e-12

    def test_stencil_symbol_is_laplacian_eigenvalue(self):
        g = GridSpec(TORUS, 32)
        p = 2 * np.pi * 3
        f = np.cos(p * g.x)
        np.testing.assert_allclose(g.laplacian() @ f, stencil_symbol(p, g.h) * f, atol=1e-9)


class TestInteraction:
    @pytest.mark.parametrize("g", [1.0, 10.0])
    def test_cosine_coefficients(self, g):
        v = InteractionSpec.cosine_torus(g)
        assert fourier_coefficient(v, 0.0) == g
        assert fourier_coefficient(v, 2 * np.pi) == g / 2
        assert fourier_coefficient(v, -2 * np.pi) == g / 2
        assert fourier_coefficient(v, 4 * np.pi) == 0.0

    @given(st.floats(0.0, 20.0), st.floats(0.05, 2.0), st.floats(-5, 5))
    def test_gaussian_even_and_bounded_by_origin(self, g, s, x):
        v = InteractionSpec.gaussian(g, s)
        assert v(x) == v(-x)
        assert v(x) <= v.at_zero

    def test_positive_type_reports(self):
        torus = GridSpec(TORUS, 64)
        assert validate_positive_type(InteractionSpec.gaussian(1.0, 0.5), GridSpec(BOX, 256, 8.0)).passed
        rep = validate_positive_type(InteractionSpec.cosine_torus(10.0), torus)
        assert rep.passed and abs(rep.min_coefficient) < 1e-12
        assert validate_positive_type(InteractionSpec.cosine_series([0.0, 1.0]), torus).passed
        bad = validate_positive_type(InteractionSpec.cosine_series([0.0, -1.0]), torus)
        assert not bad.passed and bad.min_coefficient == pytest.approx(-0.5)

    @pytest.mark.parametrize("coeffs", [(1.0, 1.0), (2.0, 0.5, 0.25), (0.0, 1.0, 0.0, 3.0)])
    def test_fourier_matches_grid_dft(self, coeffs):
        v = InteractionSpec.cosine_series(coeffs)
        K = len(coeffs)
        grid = GridSpec(TORUS, 4 * K + 4)
        p, c = grid_fourier_coefficients(v, grid)
        expected = np.array([fourier_coefficient(v, q) for q in p])
        mask = np.abs(p) <= 2 * np.pi * K
        np.testing.assert_allclose(c[mask], expected[mask], atol=1e-10)

    def test_harmonic_and_quartic(self):
        assert ExternalPotentialSpec("harmonic", omega=2.0)(3.0) == 36.0
        assert ExternalPotentialSpec("quartic", kappa=0.5)(2.0) == 8.0
        assert ExternalPotentialSpec("none")(2.0) == 0.0


class TestConvolution:
    def test_zero(self):
        g = GridSpec(TORUS, 32)
        np.testing.assert_array_equal(convolve_density(InteractionSpec.zero(), np.random.default_rng(0).random(32), g), 0)

    @pytest.mark.parametrize("gval", [1.0, 10.0])
    def test_constant_density(self, gval):
        g = GridSpec(TORUS, 64)
        out = convolve_density(InteractionSpec.cosine_torus(gval), np.ones(64), g)
        np.testing.assert_allclose(out, gval, rtol=1e-13)

    def test_kernel_column(self):
        g = GridSpec(BOX, 64, 4.0)
        v = InteractionSpec.gaussian(1.0, 0.5)
        j = 17
        rho = np.zeros(g.size)
        rho[j] = 1.0 / g.w[j]
        np.testing.assert_allclose(convolve_density(v, rho, g), v(g.x - g.x[j]), rtol=1e-14)
        np.testing.assert_allclose(kernel_matrix(v, g)[:, j], v(g.x - g.x[j]), rtol=1e-14)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            convolve_density(InteractionSpec.gaussian(1.0, 0.5), np.ones(5), GridSpec(TORUS, 16))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 31))
    def test_translation_commutes(self, seed, shift):
        g = GridSpec(TORUS, 32)
        v = InteractionSpec.cosine_series([1.0, 0.7, 0.2])
        rho = np.random.default_rng(seed).random(32)
        lhs = convolve_density(v, np.roll(rho, shift), g)
        rhs = np.roll(convolve_density(v, rho, g), shift)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-13, atol=1e-13)
