import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardysobolev.numerics import make_halfline_grid
from hardysobolev.weighted_halfline import (
    SpectrumSample,
    equivalence_report,
    ln_inner,
    ln_norm,
    mu_norm,
    sample_spectrum,
)

SQRT_PI = math.sqrt(math.pi)


def test_mu_norm_examples(hl):
    f = sample_spectrum(lambda t: np.exp(-t), hl, 1)
    assert mu_norm(f, 0) == pytest.approx(SQRT_PI, rel=1e-12)
    assert mu_norm(f, 1) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-12)


def test_mu_norm_general_p(hl):
    # 2 pi int e^{-3t} dt = 2 pi / 3
    f = sample_spectrum(lambda t: np.exp(-t), hl, 0, p=3.0)
    assert mu_norm(f, 0) == pytest.approx((2 * math.pi / 3) ** (1 / 3), rel=1e-12)


def test_ln_norm_examples(hl):
    assert ln_norm(sample_spectrum(lambda t: np.exp(-t), hl, 1)) == pytest.approx(math.sqrt(1.5 * math.pi), rel=1e-12)
    assert ln_norm(sample_spectrum(lambda t: np.exp(-t), hl, 0)) == pytest.approx(SQRT_PI, rel=1e-12)
    for n in range(3):
        assert ln_norm(sample_spectrum(lambda t: 0 * t, hl, n)) == 0.0


def test_mu_norm_rejects_order(hl):
    f = sample_spectrum(lambda t: np.exp(-t), hl, 1)
    with pytest.raises(ValueError):
        mu_norm(f, 2)
    with pytest.raises(ValueError):
        mu_norm(f, -1)


def test_sample_validation(hl):
    with pytest.raises(ValueError):
        SpectrumSample(hl, np.zeros(3))
    with pytest.raises(ValueError):
        SpectrumSample(hl, np.full(hl.M, np.nan))
    with pytest.raises(ValueError):
        SpectrumSample(hl, np.zeros(hl.M), n=0, p=np.inf)


def test_equivalence_examples(hl):
    r1 = equivalence_report(sample_spectrum(lambda t: np.exp(-t), hl, 1))
    assert r1.ratio == pytest.approx(1.0, abs=1e-14)
    r2 = equivalence_report(sample_spectrum(lambda t: np.exp(-t), hl, 2))
    assert 1.0 <= r2.ratio <= math.sqrt(3)
    assert r2.within_bounds
    with pytest.raises(ValueError):
        equivalence_report(sample_spectrum(lambda t: 0 * t, hl, 1))
    with pytest.raises(ValueError):
        equivalence_report(sample_spectrum(lambda t: np.exp(-t), hl, 0))


GALLERY = [
    lambda t: np.exp(-t),
    lambda t: t * np.exp(-t),
    lambda t: np.exp(-2 * t) * np.cos(t),
    lambda t: 1 / (1 + t) ** 6,
]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(range(len(GALLERY))), st.integers(1, 4), st.sampled_from([1.5, 2.0, 3.0]))
def test_pointwise_domination(i, n, p):
    g = make_halfline_grid("exp-graded", 2048)
    f = sample_spectrum(GALLERY[i], g, n, p)
    r = equivalence_report(f)
    assert r.full**p <= (n + 1) * r.two_term**p * (1 + 1e-12)
    assert r.within_bounds
    # finiteness of the two end norms carries over to every intermediate one
    assert all(np.isfinite(mu_norm(f, k)) for k in range(n + 1))


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(range(len(GALLERY))), st.sampled_from(range(len(GALLERY))), st.integers(0, 3))
def test_inner_product(i, j, n):
    g = make_halfline_grid("exp-graded", 2048)
    f = sample_spectrum(GALLERY[i], g, n)
    h = sample_spectrum(GALLERY[j], g, n)
    assert ln_inner(f, f).real == pytest.approx(ln_norm(f) ** 2, rel=1e-10)
    assert abs(ln_inner(f, f).imag) <= 1e-14 * ln_norm(f) ** 2
    assert ln_inner(f, h) == pytest.approx(np.conj(ln_inner(h, f)), rel=1e-12)


def test_embedding_chain_truncated_l1():
    # truncated L^1 masses of e^{-t} increase to 1 as the window grows
    vals = []
    for T in (10.0, 20.0, 40.0):
        g = make_halfline_grid("uniform", int(256 * T), T=T)
        v = g.integrate(np.exp(-g.nodes))
        assert v == pytest.approx(1 - math.exp(-T), abs=1e-9)
        vals.append(v)
    assert vals[0] < vals[1] < vals[2]
    assert vals[-1] == pytest.approx(1.0, abs=1e-9)


def test_shared_grid_required(hl):
    other = make_halfline_grid("gauss-laguerre", 64)
    with pytest.raises(ValueError):
        ln_inner(sample_spectrum(np.exp, hl, 0), sample_spectrum(np.exp, other, 0))
