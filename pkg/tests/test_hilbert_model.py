import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from hardysobolev.boundary import BoundarySample, sample_boundary
from hardysobolev.gallery import inverse_power_stack, modulated_stack
from hardysobolev.hardy_sobolev import HardySobolevElement
from hardysobolev.hilbert_model import (
    KERNEL_PROBES,
    GalleryCase,
    KernelHandle,
    gallery_run,
    hilbert_product_bounds,
    holomorphic_fourier,
    kernel_eval,
    kernel_gram,
    kernel_norm_bound,
    kernel_reproduce_check,
    pw_isometry_check,
    weierstrass_quotient_norms,
)
from hardysobolev.weighted_halfline import sample_spectrum

# K_n(z, w) by dense subdivided mpmath quadrature of the defining
# half-line integral (50 digits), frozen here
KERNEL_ORACLES = [
    (1, 1j, 1j, 0.063506162732179148),
    (1, 1e-3j, 1e-3j, 0.24788675395543246),
    (1, 100j, 100j, 0.00079573493865138448),
    (2, 1j, 2j, 0.044959376190191987),
    (3, 1j, 1j, 0.058054099020289402),
    (1, -1 + 0.5j, 2 + 1j, 0.027589406341175464 + 0.039045846934687911j),
    (2, 0.1j, 3 + 0.2j, 0.02359590165944203 + 0.059619764460591114j),
    (3, 10 + 0.01j, -10 + 0.01j, 8.2032345533202315e-6 - 0.0079975422575147174j),
    (1, 2j, 5 + 1j, 0.015538184867271402 + 0.022837739051450997j),
]


@pytest.mark.parametrize("n,z,w,expected", KERNEL_ORACLES)
def test_kernel_frozen_values(n, z, w, expected):
    assert abs(kernel_eval(KernelHandle(n, z), w) - expected) <= 1e-12 * max(1.0, abs(expected))


@pytest.mark.parametrize("z,w", [(1j, 1j), (2 + 0.5j, -1 + 3j), (1e-3j, 5 + 1e-2j)])
def test_kernel_n0_closed_form(z, w):
    exact = 1j / (2 * math.pi * (w - np.conj(z)))
    assert abs(kernel_eval(KernelHandle(0, z), w) - exact) <= 1e-8 * abs(exact)


def test_kernel_n0_at_i():
    assert kernel_eval(KernelHandle(0, 1j), 1j) == pytest.approx(1 / (4 * math.pi), rel=1e-12)


def test_kernel_decays_far_out():
    # K_1(z, z) ~ 1/(4 pi y) for large y
    v = kernel_eval(KernelHandle(1, 1e6j), 1e6j)
    assert v.real == pytest.approx(1 / (4 * math.pi * 1e6), rel=1e-6)


points = st.tuples(st.floats(-20, 20), st.floats(1e-2, 20)).map(lambda t: complex(*t))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 3), points, points)
def test_kernel_hermitian(n, z, w):
    a = kernel_eval(KernelHandle(n, z), w)
    b = kernel_eval(KernelHandle(n, w), z)
    assert abs(a - np.conj(b)) <= 1e-10 * max(1.0, abs(a))


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 3), st.lists(points, min_size=2, max_size=6, unique=True))
def test_kernel_gram_psd(n, pts):
    G = kernel_gram(n, pts)
    assert np.max(np.abs(G - G.conj().T)) <= 1e-10
    assert np.linalg.eigvalsh(0.5 * (G + G.conj().T)).min() >= -1e-8


def test_kernel_handle_validation():
    with pytest.raises(ValueError):
        KernelHandle(1, -1j)
    with pytest.raises(ValueError):
        KernelHandle(-1, 1j)
    with pytest.raises(ValueError):
        kernel_eval(KernelHandle(1, 1j), 2.0)


# --- reproduction -------------------------------------------------------------

SPECTRA = {
    "exp(-t)": lambda t: np.exp(-t),
    "t exp(-t)": lambda t: t * np.exp(-t),
    "exp(-2t)": lambda t: np.exp(-2 * t),
}


@pytest.mark.parametrize("name", list(SPECTRA))
@pytest.mark.parametrize("n", [0, 1, 2])
@pytest.mark.parametrize("z", [1j, 1 + 1j, 2j, -3 + 0.5j])
def test_kernel_reproduces(hl, name, n, z):
    F = HardySobolevElement.from_spectrum(sample_spectrum(SPECTRA[name], hl, n))
    assert kernel_reproduce_check(F, KernelHandle(n, z)).rel_gap <= 1e-6


def test_reproduction_example(hl):
    # int_0^inf t e^{-t} e^{itz} dt = 1/(1 - iz)^2, which is 1/9 at z = 2i
    F = HardySobolevElement.from_spectrum(sample_spectrum(SPECTRA["t exp(-t)"], hl, 2))
    rec = kernel_reproduce_check(F, KernelHandle(2, 2j))
    assert rec.point == pytest.approx(1 / 9, abs=1e-12)
    assert rec.inner == pytest.approx(1 / 9, abs=1e-7)


def test_reproduction_needs_matching_order(hl):
    F = HardySobolevElement.from_spectrum(sample_spectrum(SPECTRA["exp(-t)"], hl, 1))
    with pytest.raises(ValueError):
        kernel_reproduce_check(F, KernelHandle(2, 1j))


def test_holomorphic_fourier(hl):
    f = sample_spectrum(SPECTRA["exp(-t)"], hl, 0)
    for z in (1j, 2 + 3j):
        assert holomorphic_fourier(f, z) == pytest.approx(1 / (1 - 1j * z), abs=1e-12)
    # first derivative brings down i t
    assert holomorphic_fourier(f, 1j, k=1) == pytest.approx(1j / 4, abs=1e-12)
    with pytest.raises(ValueError):
        holomorphic_fourier(f, -1j)


# --- isometry --------------------------------------------------------------------


@pytest.mark.parametrize("n,exact", [(0, math.sqrt(math.pi)), (1, math.sqrt(1.5 * math.pi)), (2, None)])
def test_pw_isometry(hl, n, exact):
    rec = pw_isometry_check(sample_spectrum(SPECTRA["exp(-t)"], hl, n))
    assert rec.rel_gap <= 1e-3
    if exact is not None:
        assert rec.fourier_side == pytest.approx(exact, rel=1e-12)
    # the height-4h diagnostic sits below the boundary norm
    assert rec.boundary_side_at_height < rec.boundary_side


# --- norm bound --------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_kernel_norm_bound(n):
    recs = kernel_norm_bound(n)
    assert len(recs) == len(KERNEL_PROBES) == 30
    assert all(r.passed for r in recs)
    # near the axis the diagonal tends to (1/2 pi) int_0^inf dx / (1 + x^2 + ... + x^{2n}),
    # which is 1/4 for n = 1 and smaller for n > 1; the lowest probe is y = 1e-3
    limit = quad(lambda x: 1 / sum(x ** (2 * m) for m in range(n + 1)), 0, np.inf)[0] / (2 * math.pi)
    assert max(r.diag for r in recs) == pytest.approx(limit, rel=1e-2)


def test_kernel_norm_bound_needs_order_one():
    with pytest.raises(ValueError):
        kernel_norm_bound(0)


# --- product bounds -------------------------------------------------------------------


def _pairs(grid, n):
    els = [
        sample_boundary(inverse_power_stack(1.0, 2, n), grid),
        sample_boundary(modulated_stack(1.0, 2, n), grid),
        sample_boundary(inverse_power_stack(0.5j, 1, n), grid),
    ]
    els = [HardySobolevElement.from_boundary(b, check=False) for b in els]
    return [(a, b) for a in els for b in els]


@pytest.mark.parametrize("n", [1, 2])
def test_product_bounds(grid, n):
    for F, G in _pairs(grid, n):
        r = hilbert_product_bounds(F, G)
        assert r.pair_bound_pass and r.sharp_pass and r.derivative_pass


def test_product_bounds_zero_factor(grid):
    F = HardySobolevElement.from_boundary(sample_boundary(inverse_power_stack(1.0, 2, 1), grid), check=False)
    Z = HardySobolevElement.from_boundary(BoundarySample(grid, (np.zeros(grid.N),) * 2), check=False)
    r = hilbert_product_bounds(F, Z)
    assert r.fg_h2 == 0.0 and r.pair_bound_pass and r.sharp_pass


# --- gallery -------------------------------------------------------------------------------


def test_weierstrass_quotients_grow():
    q = weierstrass_quotient_norms(0.5, 7, 6)
    assert np.all(q[1:] / q[:-1] >= 3.5 * (1 - 1e-6))


def test_gallery_weierstrass():
    rep = gallery_run("weierstrass")
    assert rep["pass"] and rep["ln_norm_finite"]
    assert rep["target"] == 1.75
    assert min(rep["ratios"]) >= rep["target"]


def test_gallery_inverse_tail():
    rep = gallery_run("inverse-tail")
    assert rep["pass"]
    assert rep["slope"] == pytest.approx(2 * math.pi, rel=1e-6)
    # the truncated L^1 norms keep growing like log X
    l1 = rep["l1_truncated"]
    assert l1[1] - l1[0] == pytest.approx(math.log(2), rel=1e-6)


def test_gallery_endpoint():
    rep = gallery_run("endpoint-p1")
    assert rep["pass"]
    assert rep["log_slope"] == pytest.approx(rep["predicted_log_slope"], rel=0.05)


def test_gallery_case_validation():
    with pytest.raises(ValueError):
        GalleryCase("bogus")
    with pytest.raises(ValueError):
        GalleryCase("weierstrass", a=0.1, b=7)
    with pytest.raises(ValueError):
        GalleryCase("weierstrass", b=6)
