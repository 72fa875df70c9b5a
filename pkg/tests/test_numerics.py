import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardysobolev.numerics import (
    TAIL_MISFIT,
    RealGrid,
    apply_multiplier,
    derivative_spec,
    fit_tail,
    half_line_fourier,
    hilbert_spec,
    line_integral,
    make_halfline_grid,
    make_real_grid,
    riesz_minus_spec,
    riesz_plus_spec,
    trapezoid,
)

from conftest import lorentz


# grids ---------------------------------------------------------------------


def test_real_grid_small():
    g = make_real_grid(1.0, 4)
    assert np.allclose(g.nodes, [-1.0, -0.5, 0.0, 0.5])
    assert g.h == 0.5


def test_real_grid_default_step():
    g = make_real_grid(200.0, 2**16)
    assert g.h == pytest.approx(400 / 65536, rel=1e-15)
    assert g.h * g.N == pytest.approx(2 * g.L)


@pytest.mark.parametrize("L,N", [(0.0, 8), (-1.0, 8), (1.0, 7), (1.0, 2), (np.inf, 8)])
def test_real_grid_rejects(L, N):
    with pytest.raises(ValueError):
        make_real_grid(L, N)


@given(st.floats(0.1, 1e3), st.integers(2, 12))
def test_real_grid_invariants(L, k):
    g = make_real_grid(L, 2 * k)
    x = g.nodes
    assert np.all(np.diff(x) > 0)
    assert x[0] == -L
    assert x[-1] + g.h == pytest.approx(L)
    assert g.index_of(0.0) == k


def test_refined_grid():
    g = make_real_grid(10.0, 64).refined()
    assert (g.L, g.N) == (20.0, 256)


# half line quadrature -----------------------------------------------------------


def test_gauss_laguerre_moments():
    g = make_halfline_grid("gauss-laguerre", 64)
    assert g.integrate(np.exp(-g.nodes)) == pytest.approx(1.0, abs=1e-10)
    assert g.integrate(g.nodes * np.exp(-g.nodes)) == pytest.approx(1.0, abs=1e-10)
    assert np.all(g.nodes > 0) and np.all(np.diff(g.nodes) > 0) and np.all(g.weights > 0)


def test_gauss_laguerre_scaled():
    g = make_halfline_grid("gauss-laguerre", 64, s=4.0)
    # int_0^inf exp(-t/4) dt = 4
    assert g.integrate(np.exp(-g.nodes / 4)) == pytest.approx(4.0, rel=1e-10)


def test_exp_graded_accuracy():
    g = make_halfline_grid("exp-graded", 4096)
    assert g.integrate(np.exp(-2 * g.nodes)) == pytest.approx(0.5, abs=1e-8)


def test_exp_graded_convergence():
    errs = []
    for M in (64, 128, 256):
        g = make_halfline_grid("exp-graded", M)
        errs.append(abs(g.integrate(np.exp(-2 * g.nodes)) - 0.5))
    assert errs[1] * 4 <= errs[0]
    assert errs[2] * 4 <= errs[1]


def test_uniform_scheme():
    g = make_halfline_grid("uniform", 256, T=1.0)
    assert g.integrate(g.nodes**3) == pytest.approx(0.25, rel=1e-12)
    assert g.nodes[0] > 0


def test_uniform_scheme_nonzero_at_origin():
    # the origin carries Simpson weight even though it is not a node
    errs = []
    for M in (256, 1024):
        g = make_halfline_grid("uniform", M, T=10.0)
        assert g.integrate(np.ones(M)) == pytest.approx(10.0, rel=1e-14)
        errs.append(abs(g.integrate(np.exp(-g.nodes)) - (1 - np.exp(-10.0))))
    assert errs[1] <= 1e-8
    assert errs[1] * 100 <= errs[0]


@pytest.mark.parametrize("args", [("bogus", 64), ("gauss-laguerre", 4), ("gauss-laguerre", 500), ("exp-graded", 63)])
def test_halfline_rejects(args):
    with pytest.raises(ValueError):
        make_halfline_grid(*args)


# multipliers ----------------------------------------------------------------------


def test_hilbert_of_lorentzian(grid):
    x = grid.nodes
    Hf = apply_multiplier(lorentz(x), grid, hilbert_spec())
    inner = np.abs(x) <= grid.L / 2
    assert np.max(np.abs(Hf - x / (1 + x * x))[inner]) <= 1e-4


def test_riesz_plus_of_lorentzian(grid):
    x = grid.nodes
    P = apply_multiplier(lorentz(x), grid, riesz_plus_spec())
    inner = np.abs(x) <= grid.L / 2
    assert np.max(np.abs(P - 0.5 / (1 - 1j * x))[inner]) <= 1e-4


def test_derivative_zero_is_identity(grid):
    v = np.random.default_rng(1).normal(size=grid.N)
    assert np.array_equal(apply_multiplier(v, grid, derivative_spec(0)), v.astype(complex))


def test_derivative_of_lorentzian(grid):
    x = grid.nodes
    d = apply_multiplier(lorentz(x), grid, derivative_spec(1))
    assert np.max(np.abs(d + 2 * x / (1 + x * x) ** 2)) <= 1e-6


def test_riesz_projections_sum_to_identity(small_grid):
    v = np.random.default_rng(2).normal(size=small_grid.N) + 0j
    for mode in ("periodic", "line"):
        s = apply_multiplier(v, small_grid, riesz_plus_spec(), mode=mode) + apply_multiplier(
            v, small_grid, riesz_minus_spec(), mode=mode
        )
        assert np.max(np.abs(s - v)) <= 1e-12


def _bandlimited(grid, seed):
    rng = np.random.default_rng(seed)
    xi = grid.frequencies
    spec = np.zeros(grid.N, dtype=complex)
    band = (np.abs(xi) > 0) & (np.abs(xi) < 0.5 * np.abs(xi).max())
    spec[band] = rng.normal(size=band.sum()) + 1j * rng.normal(size=band.sum())
    return np.fft.ifft(spec)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_hilbert_squared_is_minus_identity(seed):
    g = make_real_grid(10.0, 256)
    v = _bandlimited(g, seed)
    hh = apply_multiplier(apply_multiplier(v, g, hilbert_spec(), mode="periodic"), g, hilbert_spec(), mode="periodic")
    assert np.max(np.abs(hh + v)) <= 1e-10 * max(1.0, np.max(np.abs(v)))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_hilbert_commutes_with_derivative(seed):
    g = make_real_grid(10.0, 256)
    v = _bandlimited(g, seed)
    a = apply_multiplier(apply_multiplier(v, g, derivative_spec(1), mode="periodic"), g, hilbert_spec(), mode="periodic")
    b = apply_multiplier(apply_multiplier(v, g, hilbert_spec(), mode="periodic"), g, derivative_spec(1), mode="periodic")
    assert np.max(np.abs(a - b)) <= 1e-8 * max(1.0, np.max(np.abs(a)))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_parseval(seed):
    v = np.random.default_rng(seed).normal(size=512) + 1j * np.random.default_rng(seed + 1).normal(size=512)
    V = np.fft.fft(v)
    assert np.sum(np.abs(V) ** 2) / 512 == pytest.approx(np.sum(np.abs(v) ** 2), rel=1e-12)


def test_tail_diagnostic_recorded(small_grid):
    v = np.ones(small_grid.N)
    _, info = apply_multiplier(v, small_grid, hilbert_spec(), return_info=True)
    assert not info["tail_ok"]
    with pytest.warns(RuntimeWarning):
        apply_multiplier(v, small_grid, hilbert_spec(), warn=True)


def test_constant_derivative_vanishes(small_grid):
    d = apply_multiplier(np.full(small_grid.N, 3.0), small_grid, derivative_spec(1))
    assert np.max(np.abs(d)) <= 1e-10


# integration ---------------------------------------------------------------------------


def test_line_integral_tail_correction(grid):
    x = grid.nodes
    v = lorentz(x)
    # the raw trapezoid misses about 2/L of pi; the tail model recovers it
    raw = trapezoid(v, grid).real
    full = line_integral(grid, lambda x, a: a, v).real
    assert abs(raw - np.pi) > 1e-3
    assert full == pytest.approx(np.pi, rel=1e-9)


def test_tail_model_fit(grid):
    x = grid.nodes
    m = fit_tail(lorentz(x), grid, +1)
    xs = np.array([250.0, 400.0, 1e4])
    assert np.allclose(m(xs[:2]), lorentz(xs[:2]), rtol=1e-6, atol=0)
    # fifty window widths out the fit still holds to a few parts in 1e5
    assert abs(m(xs[2]) / lorentz(xs[2]) - 1) <= 1e-4


def test_oscillating_tail_is_not_extrapolated(grid):
    # e^{2ix}/(x+i)^4 integrates to zero; no algebraic tail fits it
    x = grid.nodes
    v = np.exp(1j * x) / (x + 1j) ** 2
    m = fit_tail(v, grid, +1)
    assert m.misfit > TAIL_MISFIT
    assert np.all(m.coeffs == 0)
    assert abs(line_integral(grid, lambda x, a: a * a, v)) <= 1e-8


def test_half_line_fourier_exp(grid):
    # int_0^inf e^{-t} e^{ixt} dt = 1 / (1 - ix)
    tr = half_line_fourier(lambda t: np.exp(-t), grid)
    x = grid.nodes
    assert np.max(np.abs(tr - 1 / (1 - 1j * x))) <= 1e-4
    tr1 = half_line_fourier(lambda t: np.exp(-t), grid, k=1)
    assert np.max(np.abs(tr1 - 1j / (1 - 1j * x) ** 2)) <= 1e-4
