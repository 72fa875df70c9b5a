"""The ``p = 2`` theory: holomorphic Fourier transform, reproducing kernels,
Hilbert-space product bounds and the divergence/membership gallery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .boundary import BoundarySample, lp_norm, sobolev_norm, split_levels
from .hardy_sobolev import HardySobolevElement, _leibniz, counterexample_line_norms
from .numerics import RealGrid, half_line_fourier, make_halfline_grid, make_real_grid, trapezoid
from .weighted_halfline import SpectrumSample, ln_inner, ln_norm

__all__ = [
    "KernelHandle",
    "GalleryCase",
    "holomorphic_fourier",
    "pw_isometry_check",
    "kernel_eval",
    "kernel_gram",
    "kernel_reproduce_check",
    "kernel_norm_bound",
    "hilbert_product_bounds",
    "gallery_run",
    "weierstrass_quotient_norms",
    "KERNEL_PROBES",
]

#: Probe lattice used for kernel-level checks.
KERNEL_PROBES: tuple[complex, ...] = tuple(
    complex(x, y) for y in (1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0) for x in (-10.0, -1.0, 0.0, 1.0, 10.0)
)


# --------------------------------------------------------------------------
# Paley-Wiener
# --------------------------------------------------------------------------


def holomorphic_fourier(f: SpectrumSample, z: complex, k: int = 0) -> complex:
    """``int_0^inf (i t)^k f(t) e^{i z t} dt`` by the sample's own quadrature.

    Raises
    ------
    ValueError
        If ``Im z <= 0``.
    """
    z = complex(z)
    if z.imag <= 0:
        raise ValueError(f"point {z} is not in the upper half plane")
    t = f.grid.nodes
    return complex(np.sum(f.grid.weights * (1j * t) ** k * f.values * np.exp(1j * z * t)))


@dataclass(frozen=True)
class IsometryRecord:
    fourier_side: float
    boundary_side: float
    rel_gap: float
    boundary_side_at_height: float
    height: float


def pw_isometry_check(f: SpectrumSample, n: Optional[int] = None, grid: Optional[RealGrid] = None) -> IsometryRecord:
    """Compare the weighted spectrum norm with the boundary Sobolev norm.

    The boundary traces ``F^(k)(x) = int (it)^k f(t) e^{ixt} dt`` are
    computed on ``grid`` at height zero with a Filon-type FFT, and their
    line norms include the fitted tails. The value along ``Im z = 4h`` is
    reported as well; it sits below the boundary value by a relative
    amount of order ``h``.
    """
    n = f.n if n is None else n
    f = f.with_order(n)
    grid = grid or make_real_grid(200.0, 2**16)
    fourier = ln_norm(f)
    if f.func is None:
        raise ValueError("the boundary side needs the spectrum as a callable")
    if fourier == 0.0:
        return IsometryRecord(0.0, 0.0, 0.0, 0.0, 4 * grid.h)
    y = 4 * grid.h
    b2 = h2 = 0.0
    for k in range(n + 1):
        tr = half_line_fourier(f.func, grid, k)
        b2 += lp_norm(tr, grid, 2.0) ** 2
        tr_y = half_line_fourier(lambda t: f.func(t) * np.exp(-y * t), grid, k)
        h2 += lp_norm(tr_y, grid, 2.0) ** 2
    b, hy = math.sqrt(b2), math.sqrt(h2)
    return IsometryRecord(fourier, b, abs(b - fourier) / fourier, hy, y)


# --------------------------------------------------------------------------
# reproducing kernel
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelHandle:
    """Anchor of the kernel section ``K_{n,z}``."""

    n: int
    z: complex

    def __post_init__(self):
        if complex(self.z).imag <= 0:
            raise ValueError("kernel anchor must lie in the upper half plane")
        if self.n < 0:
            raise ValueError("order must be nonnegative")


def _q_poly(x, n: int):
    # 1 + x^2 + ... + x^{2n}; the removable singularity at x = 1 never appears
    out = np.ones_like(x)
    x2 = x * x
    term = np.ones_like(x)
    for _ in range(n):
        term = term * x2
        out = out + term
    return out


def _q_deriv(x, n: int):
    return sum(2 * k * x ** (2 * k - 1) for k in range(1, n + 1))


def _poles(n: int) -> np.ndarray:
    k = np.array([k for k in range(1, 2 * n + 2) if k != n + 1])
    return np.exp(1j * np.pi * k / (n + 1))


_PANELS = 160
_PANEL_U, _PANEL_W = np.polynomial.legendre.leggauss(16)


def _ray_nodes(r_lo: float, r_hi: float) -> tuple[np.ndarray, np.ndarray]:
    # composite Gauss-Legendre in log r; the integrand varies on a relative scale
    a, b = math.log(r_lo), math.log(r_hi)
    edges = np.linspace(a, b, _PANELS + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    v = (mid + half * _PANEL_U[None, :]).ravel()
    w = (half * _PANEL_W[None, :]).ravel()
    r = np.exp(v)
    return r, w * r


def _pick_angle(zeta: complex, n: int) -> float:
    alpha0 = math.pi / 2 - math.atan2(zeta.imag, zeta.real)
    if n == 0:
        return alpha0
    angles = np.concatenate([np.angle(_poles(n)), [0.0]])
    lo, hi = max(alpha0 - 0.6, -math.pi / 2 + 0.2), min(alpha0 + 0.6, math.pi / 2 - 0.2)
    cand = np.linspace(lo, hi, 121)
    # stay away from pole directions (the real axis is harmless but costs nothing to avoid)
    dist = np.min(np.abs(cand[:, None] - angles[None, :]), axis=1)
    score = dist - 0.25 * np.abs(cand - alpha0)
    return float(cand[int(np.argmax(score))])


def _kernel_integral(zeta: complex, n: int) -> complex:
    """``int_0^inf e^{i x zeta} / Q_n(x) dx`` for ``Im zeta > 0``."""
    zeta = complex(zeta)
    if zeta.imag <= 0:
        raise ValueError("kernel integral needs Im(w - conj z) > 0")
    alpha = _pick_angle(zeta, n)
    rot = np.exp(1j * alpha)
    decay = abs(zeta) * math.cos(alpha - (math.pi / 2 - math.atan2(zeta.imag, zeta.real)))
    r, w = _ray_nodes(1e-16 / abs(zeta), 42.0 / decay)
    x = r * rot
    total = rot * np.sum(w * np.exp(1j * x * zeta) / _q_poly(x, n))
    if n > 0:
        for p in _poles(n):
            theta = math.atan2(p.imag, p.real)
            crossed = (0.0 < theta < alpha) or (alpha < theta < 0.0)
            if crossed:
                res = np.exp(1j * zeta * p) / _q_deriv(p, n)
                total += (1.0 if alpha > 0 else -1.0) * 2j * math.pi * res
    return complex(total)


def kernel_eval(handle: KernelHandle, w: complex) -> complex:
    """``K_n(z, w) = (1/2 pi) int_0^inf e^{i x (w - conj z)} / (1 + x^2 + ... + x^{2n}) dx``.

    The integral is taken along the steepest-descent ray in the complex
    ``x`` plane; residues of the poles swept over are added back.
    """
    w = complex(w)
    if w.imag <= 0:
        raise ValueError(f"point {w} is not in the upper half plane")
    zeta = w - np.conj(complex(handle.z))
    return _kernel_integral(zeta, handle.n) / (2.0 * math.pi)


def kernel_gram(n: int, points: Sequence[complex]) -> np.ndarray:
    """Matrix ``[K_n(z_i, z_j)]`` with rows indexed by ``z_i`` as the anchor."""
    pts = [complex(z) for z in points]
    G = np.empty((len(pts), len(pts)), dtype=complex)
    for i, zi in enumerate(pts):
        for j, zj in enumerate(pts):
            G[i, j] = kernel_eval(KernelHandle(n, zi), zj)
    return G


@dataclass(frozen=True)
class ReproduceRecord:
    inner: complex
    point: complex
    rel_gap: float


def kernel_reproduce_check(F: HardySobolevElement, handle: KernelHandle) -> ReproduceRecord:
    """``<f, g_z>`` against ``F(z)`` for a spectral element.

    ``g_z(t) = (1/2 pi) e^{-i t conj(z)} / (1 + t^2 + ... + t^{2n})`` is the
    spectrum of the kernel section; the weighted inner product is evaluated
    on the element's own half-line grid.
    """
    if F.representation != "fourier":
        raise ValueError("the reproduction check runs on spectral elements")
    if F.n != handle.n:
        raise ValueError("element and kernel orders differ")
    f = F.spectrum
    t = f.grid.nodes
    z = complex(handle.z)
    gz = np.exp(-1j * t * np.conj(z)) / (2.0 * math.pi * _q_poly(t, handle.n))
    g = SpectrumSample(f.grid, gz, f.n, 2.0)
    inner = ln_inner(f, g)
    point = holomorphic_fourier(f, z)
    scale = abs(point)
    gap = abs(inner - point) / scale if scale > 0 else abs(inner - point)
    return ReproduceRecord(inner, point, gap)


@dataclass(frozen=True)
class KernelBoundRecord:
    z: complex
    diag: float
    passed: bool


def kernel_norm_bound(n: int, probes: Sequence[complex] = KERNEL_PROBES) -> list[KernelBoundRecord]:
    """``K_n(z, z)`` against the bound ``1/4`` on each probe.

    Raises
    ------
    ArithmeticError
        If a diagonal value comes out non-real or negative beyond ``1e-8``.
    """
    if n < 1:
        raise ValueError("the kernel norm bound is stated for n >= 1")
    out = []
    for z in probes:
        v = kernel_eval(KernelHandle(n, z), z)
        if abs(v.imag) > 1e-8 or v.real < -1e-8:
            raise ArithmeticError(f"kernel diagonal at {z} is {v}; quadrature fault")
        out.append(KernelBoundRecord(complex(z), float(v.real), bool(v.real <= 0.25 + 1e-8)))
    return out


# --------------------------------------------------------------------------
# Hilbert-space product bounds
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductBoundsRecord:
    fg_h2: float
    half_bound: float
    pair_bound_pass: bool
    fg_hn2_sq: float
    sharp_bound: float
    sharp_pass: bool
    derivative_lhs: float
    derivative_bound: float
    derivative_pass: bool


def hilbert_product_bounds(
    F: HardySobolevElement,
    G: HardySobolevElement,
    n: Optional[int] = None,
    grid: Optional[RealGrid] = None,
) -> ProductBoundsRecord:
    """Check the ``1/2`` product bound and the ``(4^n - 1)/3`` bound.

    The product stack comes from the Leibniz rule on boundary stacks. The variant with ``G``
    replaced by its ``n``-th derivative is checked too.
    """
    n = F.n if n is None else n
    if n < 1:
        raise ValueError("product bounds need n >= 1")
    grid = grid or (F.boundary.grid if F.boundary is not None else make_real_grid(200.0, 2**16))
    bf, bg = F.boundary_sample(grid), G.boundary_sample(grid)
    fg = BoundarySample(grid, tuple(_leibniz(bf.stack[: n + 1], bg.stack[: n + 1])), 2.0)
    nf, ng = sobolev_norm(bf), sobolev_norm(bg)
    ng0 = lp_norm(bg.stack[0], grid, 2.0)
    fg0 = lp_norm(fg.stack[0], grid, 2.0)
    half = 0.5 * nf * ng0
    full_sq = sobolev_norm(fg) ** 2
    sharp = (4.0**n - 1.0) / 3.0 * nf**2 * ng**2
    dlhs = lp_norm(bf.stack[0] * bg.stack[n], grid, 2.0)
    dbound = 0.5 * nf * lp_norm(bg.stack[n], grid, 2.0)
    slack = 1.0 + 1e-9
    return ProductBoundsRecord(
        fg0, half, fg0 <= half * slack, full_sq, sharp, full_sq <= sharp * slack, dlhs, dbound, dlhs <= dbound * slack
    )


# --------------------------------------------------------------------------
# gallery
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GalleryCase:
    """Parameters of one gallery run.

    ``weierstrass`` uses ``a``, ``b`` (odd, ``0 < a < 1``, ``ab > 1``) and
    ``levels``; ``inverse-tail`` uses ``n`` and ``cutoffs``; ``hp-not-h2p``
    uses ``p`` and ``heights``; ``endpoint-p1`` uses ``half_widths``.
    """

    case: str
    a: float = 0.5
    b: int = 7
    levels: int = 5
    truncation: int = 4
    n: int = 1
    cutoffs: tuple = (10.0, 20.0, 40.0)
    p: float = 2.0
    heights: tuple = (0.1, 0.05, 0.025)
    half_widths: tuple = (50.0, 100.0, 200.0)
    grid_N: int = 2**16
    grid_L: float = 200.0

    def __post_init__(self):
        if self.case not in ("weierstrass", "inverse-tail", "hp-not-h2p", "endpoint-p1"):
            raise ValueError(f"unknown gallery case {self.case!r}")
        if self.case == "weierstrass":
            if not (0 < self.a < 1) or self.b % 2 != 1 or self.a * self.b <= 1:
                raise ValueError("Weierstrass parameters need 0 < a < 1, b odd, ab > 1")


def weierstrass_quotient_norms(a: float, b: int, levels: int, truncation: Optional[int] = None) -> np.ndarray:
    """``L^2(0,1)`` norms of ``(W(x + b^-k) - W(x)) / b^-k`` for ``k = 1..levels``.

    With ``W(x) = sum_j a^j cos(b^j pi x)`` and ``b`` odd, the functions
    ``cos(b^j pi x)``, ``sin(b^j pi x)`` are orthogonal on ``(0, 1)`` with
    squared norm ``1/2``, and a shift by ``b^-k`` flips the sign of every
    term with ``j >= k``. That gives the norms in closed form; ``truncation``
    keeps only the terms ``j <= truncation`` (``None`` sums the full series).
    """
    out = []
    for k in range(1, levels + 1):
        delta = float(b) ** (-k)
        low = sum(a ** (2 * j) * math.sin(math.pi * b ** (j - k) / 2) ** 2 for j in range(k))
        if truncation is None:
            high = a ** (2 * k) / (1 - a * a)
        else:
            high = sum(a ** (2 * j) for j in range(k, truncation + 1))
        out.append(math.sqrt(2.0 * (low + high)) / delta)
    return np.array(out)


def _weierstrass(x: np.ndarray, a: float, b: int, K: int) -> np.ndarray:
    return sum(a**j * np.cos(b**j * np.pi * x) for j in range(K + 1))


def _run_weierstrass(c: GalleryCase) -> dict:
    norms = {}
    for K in (c.truncation - 1, c.truncation):
        panels = 2 ** int(math.ceil(math.log2(40 * c.b**K)))
        grid = make_halfline_grid("uniform", panels, T=1.0)
        f = SpectrumSample(grid, _weierstrass(grid.nodes, c.a, c.b, K), c.n, 2.0)
        norms[K] = ln_norm(f)
    q = weierstrass_quotient_norms(c.a, c.b, c.levels + 1)
    ratios = q[1:] / q[:-1]
    ab = c.a * c.b
    return {
        "case": c.case,
        "parameters": {"a": c.a, "b": c.b, "levels": c.levels, "n": c.n},
        "ln_norm": norms[c.truncation],
        "ln_norm_previous_truncation": norms[c.truncation - 1],
        "ln_norm_finite": bool(np.isfinite(norms[c.truncation])),
        "quotient_norms": q.tolist(),
        "ratios": ratios.tolist(),
        "target": ab / 2,
        "pass": bool(np.isfinite(norms[c.truncation]) and np.all(ratios >= ab / 2)),
    }


def _inverse_tail(x: np.ndarray, n: int) -> np.ndarray:
    inner = sum((1 - x) ** m for m in range(n + 1))
    return np.where(x < 1, inner, 1.0 / np.maximum(x, 1e-300))


def _run_inverse_tail(c: GalleryCase) -> dict:
    # composite Simpson on (0, 1) and (1, X), so the kink at 1 sits on a node
    g0 = make_halfline_grid("uniform", 4096, T=1.0)
    t0, w0 = g0.nodes, g0.weights
    vals, l1 = [], []
    for X in c.cutoffs:
        panels = 2 * int(math.ceil(512 * (X - 1)))
        s = np.linspace(1.0, X, panels + 1)
        ws = (X - 1.0) * np.array([1.0] + [4.0, 2.0] * (panels // 2 - 1) + [4.0, 1.0]) / (3.0 * panels)
        t = np.concatenate([t0, s[1:]])
        w = np.concatenate([w0, ws[1:] + np.where(np.arange(panels) == 0, ws[0], 0.0)])
        g = _inverse_tail(t, c.n)
        vals.append(float(np.sum(w * 2 * np.pi * t**2 * g**2)))
        l1.append(float(np.sum(w * np.abs(g))))
    slope, intercept = np.polyfit(np.array(c.cutoffs), np.array(vals), 1)
    target = 2 * np.pi
    err = abs(slope - target) / target
    return {
        "case": c.case,
        "parameters": {"n": c.n, "cutoffs": list(c.cutoffs)},
        "mu1_norm_sq": vals,
        "slope": float(slope),
        "intercept": float(intercept),
        "target": target,
        "slope_rel_error": float(err),
        "l1_truncated": l1,
        "pass": bool(err <= 0.05),
    }


def _run_hp_not_h2p(c: GalleryCase) -> dict:
    grid = RealGrid(c.grid_L, c.grid_N)
    rep = counterexample_line_norms(c.p, c.heights, grid)
    return {
        "case": c.case,
        "parameters": {"p": c.p, "heights": list(c.heights)},
        "lp_norms": list(rep.lp_norms),
        "l2p_norms": list(rep.l2p_norms),
        "growth_factors": list(rep.growth_factors),
        "monotone": rep.monotone,
        "log_slope": rep.log_slope,
        "target": 1.5,
        "pass": bool(rep.monotone and rep.min_factor >= 1.5),
    }


def _bump(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    inside = np.abs(x) < 1
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


def _run_endpoint(c: GalleryCase) -> dict:
    h = 2 * c.grid_L / c.grid_N
    norms = []
    for L in c.half_widths:
        grid = RealGrid(L, int(round(2 * L / h)))
        plus, _ = split_levels([_bump(grid.nodes)], grid)
        norms.append(float(np.real(trapezoid(np.abs(plus[0]), grid))))
    slope = float(np.polyfit(np.log(c.half_widths), norms, 1)[0])
    mass = float(np.real(trapezoid(_bump(RealGrid(2.0, 2**14).nodes), RealGrid(2.0, 2**14))))
    monotone = all(b > a for a, b in zip(norms, norms[1:]))
    return {
        "case": c.case,
        "parameters": {"half_widths": list(c.half_widths), "h": h},
        "l1_norms": norms,
        "log_slope": slope,
        "predicted_log_slope": mass / math.pi,
        "pass": bool(monotone),
    }


def gallery_run(case: GalleryCase | str) -> dict:
    """Run one gallery case and return a JSON-ready report."""
    if isinstance(case, str):
        case = GalleryCase(case)
    runner = {
        "weierstrass": _run_weierstrass,
        "inverse-tail": _run_inverse_tail,
        "hp-not-h2p": _run_hp_not_h2p,
        "endpoint-p1": _run_endpoint,
    }[case.case]
    return runner(case)
