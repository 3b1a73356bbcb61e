import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bogospec.domain import InteractionSpec, ModeBasis, fourier_coefficient, stencil_symbol
from bogospec.torus import torus_dispersion, torus_spectrum

import helpers

TWO_PI = 2 * np.pi


def test_dispersion_examples():
    assert torus_dispersion(TWO_PI, 0.0) == pytest.approx(TWO_PI**2, rel=1e-15)
    assert TWO_PI**2 == pytest.approx(39.478, abs=1e-3)
    assert torus_dispersion(TWO_PI, 5.0) == pytest.approx(np.sqrt(TWO_PI**4 + 10 * TWO_PI**2), rel=1e-15)
    assert torus_dispersion(TWO_PI, 5.0) == pytest.approx(44.196, abs=1e-3)
    assert torus_dispersion(0.0, 7.0) == 0.0
    with pytest.raises(ValueError):
        torus_dispersion(TWO_PI, -1.0)


def test_free_spectrum():
    sp = torus_spectrum(ModeBasis(1, 2), InteractionSpec.zero())
    np.testing.assert_allclose(sp.e, sp.p_squared, rtol=1e-15)
    assert sp.trace_sum == 0.0


def test_g10_trace_sum():
    sp = torus_spectrum(ModeBasis(1, 2), InteractionSpec.cosine_torus(10.0))
    expected = 10 + 2 * (TWO_PI**2 + 5 - np.sqrt(TWO_PI**4 + 10 * TWO_PI**2))
    assert sp.trace_sum == pytest.approx(expected, rel=1e-14)
    assert sp.trace_sum == pytest.approx(10.565, abs=2e-3)
    assert sp.trace_sum == pytest.approx(helpers.torus(10.0).bog.trace_correction, rel=1e-5)


def test_2d_constant_only():
    g = 3.0
    sp = torus_spectrum(ModeBasis(2, 1), InteractionSpec.cosine_series([g]))
    np.testing.assert_allclose(sp.e, sp.p_squared, rtol=1e-15)
    assert sp.trace_sum == pytest.approx(g, rel=1e-15)


@given(st.integers(1, 3), st.integers(1, 3), st.floats(0.0, 20.0))
def test_invariants(d, K, g):
    basis = ModeBasis(d, K)
    sp = torus_spectrum(basis, InteractionSpec.cosine_series([g, g, g / 2]))
    lookup = {tuple(p): e for p, e in zip(basis.modes, sp.e)}
    for p, e in lookup.items():
        assert lookup[tuple(-np.array(p) + 0.0)] == e
    assert np.all(sp.e >= sp.p_squared * (1 - 1e-15))
    assert len(sp.excitations()) == len(basis) - 1


def test_small_p_linearity():
    # synthetic dense lattice: vhat flat near 0, so e_p / |p| -> sqrt(2 vhat(0))
    vhat0 = 3.0
    p = np.logspace(-6, -1, 20)
    ratio = np.array([torus_dispersion(q, vhat0) for q in p]) / p
    assert abs(ratio[0] - np.sqrt(2 * vhat0)) < 1e-5
    assert np.all(np.diff(ratio) >= 0)


@pytest.mark.parametrize("g", [1.0, 10.0])
def test_pipeline_agreement(g):
    n = 256
    sp = torus_spectrum(ModeBasis(1, 2), InteractionSpec.cosine_torus(g), n=n)
    e_pipe = helpers.torus(g).bog.e
    np.testing.assert_allclose(e_pipe, sp.excitations(), rtol=1e-6)
    assert sp.trace_sum == pytest.approx(helpers.torus(g).bog.trace_correction, rel=1e-8)
    np.testing.assert_allclose(sp.p_squared, stencil_symbol(ModeBasis(1, 2).modes[:, 0], 1 / n))


def test_rows_layout():
    rows = torus_spectrum(ModeBasis(2, 1), InteractionSpec.cosine_torus(1.0)).rows()
    assert len(rows) == 9 and set(rows[0]) == {"p1", "p2", "p_squared", "vhat", "e_p"}
    assert rows[4]["vhat"] == fourier_coefficient(InteractionSpec.cosine_torus(1.0), [0.0, 0.0])
