"""Grids, quadrature rules and the discrete Fourier-multiplier engine.

Two ways of applying a multiplier are provided:

``periodic``
    Plain FFT on the grid. Discrete identities such as ``H(H f) = -f`` or
    ``P+ + P- = I`` hold to rounding error, but functions with algebraic
    tails pick up a periodization error of order ``1/L``.
``line``
    The samples are first extended to a window ``extend`` times wider using
    a fitted algebraic tail model, then the operator is applied there. For
    the Hilbert transform and the Riesz projections the exact sampled
    line kernel is used instead of the circular one. This is the default,
    since it is what makes rational boundary data behave.

Integrals over the whole line (norms, inner products, Cauchy-type sums)
go through :func:`line_integral`, which adds the analytic contribution of
the fitted tails beyond the grid to an endpoint trapezoid sum.
"""

from __future__ import annotations

import functools
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import special

__all__ = [
    "RealGrid",
    "HalfLineGrid",
    "MultiplierSpec",
    "TailModel",
    "make_real_grid",
    "make_halfline_grid",
    "apply_multiplier",
    "multiplier_info",
    "hilbert_spec",
    "riesz_plus_spec",
    "riesz_minus_spec",
    "derivative_spec",
    "upper_extension_spec",
    "fit_tail",
    "TAIL_MISFIT",
    "line_integral",
    "trapezoid",
    "tail_ratio",
    "half_line_fourier",
    "GL_MAX_NODES",
]

#: Beyond roughly this many nodes the Gauss-Laguerre weights underflow.
GL_MAX_NODES = 180

TAIL_DEGREE = 5
# relative least-squares misfit above which a tail model is discarded
TAIL_MISFIT = 1e-3
DEFAULT_EXTEND = 8
DEFAULT_TAIL_BOUND = 1e-6

_GL_U, _GL_W = np.polynomial.legendre.leggauss(64)
_GL_U = 0.5 * (_GL_U + 1.0)
_GL_W = 0.5 * _GL_W


# --------------------------------------------------------------------------
# grids
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RealGrid:
    """Uniform grid ``x_j = -L + j*2L/N`` on ``[-L, L)``."""

    L: float
    N: int

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @functools.cached_property
    def nodes(self) -> np.ndarray:
        x = -self.L + self.h * np.arange(self.N)
        x.flags.writeable = False
        return x

    @functools.cached_property
    def frequencies(self) -> np.ndarray:
        """Angular frequencies matching ``numpy.fft.fft`` ordering."""
        xi = 2.0 * np.pi * np.fft.fftfreq(self.N, d=self.h)
        xi.flags.writeable = False
        return xi

    def refined(self, length_factor: int = 2, count_factor: int = 4) -> "RealGrid":
        """Grid with ``L`` and ``N`` scaled, used for convergence studies."""
        return RealGrid(self.L * length_factor, self.N * count_factor)

    def index_of(self, x: float) -> int:
        """Index of the node nearest to ``x`` (clipped to the grid)."""
        j = int(round((x + self.L) / self.h))
        return min(max(j, 0), self.N - 1)


def make_real_grid(L: float, N: int) -> RealGrid:
    """Build a :class:`RealGrid`.

    Parameters
    ----------
    L : float
        Half width, must be positive.
    N : int
        Even number of nodes, at least 4.

    Raises
    ------
    ValueError
        For non-positive ``L`` or an odd or tiny ``N``.
    """
    if not np.isfinite(L) or L <= 0:
        raise ValueError(f"half width must be positive, got {L!r}")
    if int(N) != N or N < 4 or N % 2:
        raise ValueError(f"point count must be an even integer >= 4, got {N!r}")
    return RealGrid(float(L), int(N))


@dataclass(frozen=True)
class HalfLineGrid:
    """Quadrature nodes and weights on ``(0, inf)``.

    ``sum(weights * g(nodes))`` approximates the plain integral of ``g``;
    no weight function is folded in.
    """

    scheme: str
    M: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    scale: float = 1.0

    def integrate(self, values: np.ndarray) -> complex:
        return np.sum(self.weights * values)


def _gauss_laguerre(M: int, s: float) -> tuple[np.ndarray, np.ndarray]:
    if M > GL_MAX_NODES:
        raise ValueError(f"gauss-laguerre supports at most {GL_MAX_NODES} nodes, got {M}")
    t, w = special.roots_laguerre(M)
    # absorb e^{-t} into the weights in log space to dodge overflow
    wt = np.exp(np.log(w) + t)
    return s * t, s * wt


def _simpson_weights(M: int) -> np.ndarray:
    c = np.ones(M + 1)
    c[1:-1:2] = 4.0
    c[2:-1:2] = 2.0
    return c / (3.0 * M)


def _exp_graded(M: int, s: float) -> tuple[np.ndarray, np.ndarray]:
    if M % 2:
        raise ValueError("exp-graded scheme needs an even panel count")
    t_lo, t_hi = 1e-12 * s, 60.0 * s
    v = np.linspace(0.0, 1.0, M + 1)
    log_ratio = np.log(t_hi / t_lo)
    t = t_lo * np.exp(v * log_ratio)
    w = _simpson_weights(M) * t * log_ratio
    return t, w


def _uniform(M: int, T: float) -> tuple[np.ndarray, np.ndarray]:
    if M % 2:
        raise ValueError("uniform scheme needs an even panel count")
    t = np.linspace(0.0, T, M + 1)[1:]
    full = T * _simpson_weights(M)
    w = full[1:].copy()
    # no node at the origin: its value is extrapolated by a cubic, keeping
    # the rule exact for cubics like plain Simpson
    w[:4] += full[0] * np.array([4.0, -6.0, 4.0, -1.0])
    return t, w


def make_halfline_grid(scheme: str, M: int, s: float = 1.0, *, T: Optional[float] = None) -> HalfLineGrid:
    """Quadrature grid on the half line.

    Parameters
    ----------
    scheme : {"gauss-laguerre", "exp-graded", "uniform"}
        ``gauss-laguerre`` rescales the classical rule by ``s``.
        ``exp-graded`` is composite Simpson in the variable
        ``v = log(t/t_lo) / log(T/t_lo)`` on ``(1e-12 s, 60 s)`` with
        ``M`` panels. ``uniform`` is composite Simpson on ``[0, T]`` with the
        origin value extrapolated from the first four nodes, so no node
        sits at ``t = 0``; it serves functions supported on a bounded
        interval.
    M : int
        Node count (gauss-laguerre) or panel count (the Simpson schemes).
    s : float
        Decay scale.
    T : float, optional
        Right end of the ``uniform`` scheme.
    """
    if s <= 0 or not np.isfinite(s):
        raise ValueError(f"scale must be positive, got {s!r}")
    if int(M) != M or M < 8:
        raise ValueError(f"node count must be an integer >= 8, got {M!r}")
    M = int(M)
    if scheme == "gauss-laguerre":
        t, w = _gauss_laguerre(M, s)
    elif scheme == "exp-graded":
        t, w = _exp_graded(M, s)
    elif scheme == "uniform":
        if T is None or T <= 0:
            raise ValueError("uniform scheme needs a positive right end T")
        t, w = _uniform(M, float(T))
    else:
        raise ValueError(f"unknown half-line scheme {scheme!r}")
    t.flags.writeable = False
    w.flags.writeable = False
    return HalfLineGrid(scheme, M, t, w, float(s))


# --------------------------------------------------------------------------
# tails
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TailModel:
    """Algebraic model ``sum_j c_j (x_e / x)^j`` fitted beyond one grid end.

    The ``j = 0`` term lets constants extend as constants; it is ignored
    when integrating (a nonzero constant tail has no finite integral).
    ``misfit`` is the relative residual of the fit on its window.
    """

    x_edge: float
    coeffs: np.ndarray
    misfit: float = 0.0

    def __call__(self, x, k: int = 0):
        """Evaluate the ``k``-th derivative of the model (``x`` may be complex)."""
        x = np.asarray(x)
        out = np.zeros(np.broadcast(x).shape, dtype=complex)
        for j, c in enumerate(self.coeffs):
            if j == 0:
                if k == 0:
                    out = out + c
                continue
            fall = 1.0
            for q in range(k):
                fall *= -(j + q)
            out = out + c * fall * self.x_edge**j * x ** (-(j + k))
        return out

    def decaying(self) -> "TailModel":
        c = np.array(self.coeffs, dtype=complex)
        c[0] = 0.0
        return TailModel(self.x_edge, c, self.misfit)


def fit_tail(values: np.ndarray, grid: RealGrid, side: int, degree: int = TAIL_DEGREE) -> TailModel:
    """Least-squares tail model on the outer quarter of the grid.

    Parameters
    ----------
    values : array
        Samples on ``grid``.
    side : {+1, -1}
        Right or left end.

    Notes
    -----
    Data that are not algebraic near the edge (oscillating tails, say)
    fit badly. When the relative misfit exceeds ``TAIL_MISFIT`` the
    returned model is identically zero, which is the continuation the
    plain trapezoid rule assumes anyway.
    """
    N = grid.N
    x = grid.nodes
    if side > 0:
        idx = np.arange(3 * N // 4, N)
        x_edge = x[-1]
    else:
        idx = np.arange(0, N // 4 + 1)
        x_edge = x[0]
    u = x_edge / x[idx]
    A = np.stack([u**j for j in range(degree + 1)], axis=1)
    # column scaling keeps lstsq well behaved; u is in (0, 1]
    v = np.asarray(values, dtype=complex)[idx]
    coeffs, *_ = np.linalg.lstsq(A, v, rcond=None)
    scale = np.linalg.norm(v)
    misfit = float(np.linalg.norm(A @ coeffs - v) / scale) if scale > 0 else 0.0
    if misfit > TAIL_MISFIT:
        coeffs = np.zeros_like(coeffs)
    return TailModel(float(x_edge), coeffs, misfit)


def tail_ratio(values: np.ndarray) -> float:
    """``max(|f(-L)|, |f(L)|) / max|f|``, zero for the zero signal."""
    a = np.abs(values)
    peak = a.max() if a.size else 0.0
    if peak == 0.0:
        return 0.0
    return float(max(a[0], a[-1]) / peak)


def trapezoid(values: np.ndarray, grid: RealGrid) -> complex:
    """Endpoint trapezoid sum over the grid (no tail correction)."""
    v = np.asarray(values)
    return grid.h * (v.sum() - 0.5 * v[0] - 0.5 * v[-1])


def line_integral(
    grid: RealGrid,
    integrand: Callable[..., np.ndarray],
    *arrays: np.ndarray,
    tails: bool = True,
    models: Optional[Sequence[tuple[TailModel, TailModel]]] = None,
) -> complex:
    """Integral over the real line of ``integrand(x, *arrays)``.

    Each array is a sample set on ``grid``. With ``tails`` on, every array
    is continued past both ends by its fitted tail model and the integrand
    is integrated over ``|x| > L`` with 64-point Gauss-Legendre in
    ``u = x_e / x``.

    Parameters
    ----------
    grid : RealGrid
    integrand : callable
        ``integrand(x, *vals)``; must accept complex-valued ``vals``.
    *arrays : array
        Samples on the grid.
    tails : bool
        Include the tail contribution.
    models : sequence of (left, right) TailModel, optional
        Precomputed tail models, one pair per array.
    """
    x = grid.nodes
    total = trapezoid(integrand(x, *arrays), grid)
    if not tails:
        return complex(total)
    if models is None:
        models = [(fit_tail(a, grid, -1), fit_tail(a, grid, +1)) for a in arrays]
    for side, pick in ((-1, 0), (+1, 1)):
        ms = [m[pick].decaying() for m in models]
        x_edge = ms[0].x_edge if ms else (x[0] if side < 0 else x[-1])
        xt = x_edge / _GL_U
        vals = [m(xt) for m in ms]
        g = integrand(xt, *vals)
        total = total + abs(x_edge) * np.sum(_GL_W * g / _GL_U**2)
    return complex(total)


# --------------------------------------------------------------------------
# multipliers
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MultiplierSpec:
    """Fourier multiplier ``m(xi)`` under ``f^(xi) = int f(x) e^{-i xi x} dx``.

    Attributes
    ----------
    name : str
    symbol : callable
        Vectorized map from real frequencies to complex values.
    zero_value : complex, optional
        Value used in the ``xi = 0`` bin (mean of the one-sided limits).
    line_kernel : {"hilbert", "riesz-plus", "riesz-minus"}, optional
        Selects the exact sampled line kernel in ``line`` mode.
    order : int
        Derivative order for derivative multipliers, else 0.
    """

    name: str
    symbol: Callable[[np.ndarray], np.ndarray]
    zero_value: Optional[complex] = None
    line_kernel: Optional[str] = None
    order: int = 0

    def sample(self, xi: np.ndarray) -> np.ndarray:
        m = np.asarray(self.symbol(xi), dtype=complex)
        m = np.broadcast_to(m, xi.shape).copy()
        if self.zero_value is not None:
            m[xi == 0] = self.zero_value
        return m


def hilbert_spec() -> MultiplierSpec:
    return MultiplierSpec("hilbert", lambda xi: -1j * np.sign(xi), 0.0, "hilbert")


def riesz_plus_spec() -> MultiplierSpec:
    return MultiplierSpec("riesz-plus", lambda xi: (xi > 0).astype(float), 0.5, "riesz-plus")


def riesz_minus_spec() -> MultiplierSpec:
    return MultiplierSpec("riesz-minus", lambda xi: (xi < 0).astype(float), 0.5, "riesz-minus")


def derivative_spec(k: int) -> MultiplierSpec:
    if k < 0:
        raise ValueError("derivative order must be nonnegative")
    return MultiplierSpec(f"derivative-{k}", lambda xi: (1j * xi) ** k, None, None, k)


def upper_extension_spec(y: float) -> MultiplierSpec:
    """``1_{xi>0} e^{-y xi}``: the Cauchy integral restricted to ``Im z = y``."""
    if y < 0:
        raise ValueError("height must be nonnegative")
    return MultiplierSpec(
        f"upper-extension-{y!r}",
        lambda xi: np.where(xi > 0, np.exp(-y * np.maximum(xi, 0.0)), 0.0),
        0.5,
    )


@functools.lru_cache(maxsize=8)
def _hilbert_kernel_fft(n: int) -> np.ndarray:
    # sampled line Hilbert kernel: 2/(pi m) on odd offsets, zero on even ones
    m = np.arange(1, n)
    c = np.where(m % 2 == 1, 2.0 / (np.pi * m), 0.0)
    C = np.zeros(2 * n)
    C[1:n] = c
    C[-(n - 1) :] = -c[::-1]
    out = np.fft.fft(C)
    out.flags.writeable = False
    return out


def _hilbert_line(g: np.ndarray) -> np.ndarray:
    n = g.size
    padded = np.concatenate([g, np.zeros(n, dtype=complex)])
    return np.fft.ifft(_hilbert_kernel_fft(n) * np.fft.fft(padded))[:n]


def _extend(values: np.ndarray, grid: RealGrid, factor: int) -> tuple[np.ndarray, int]:
    K = (factor - 1) * grid.N // 2
    if K == 0:
        return values.astype(complex), 0
    left, right = fit_tail(values, grid, -1), fit_tail(values, grid, +1)
    h = grid.h
    xr = grid.nodes[-1] + h * np.arange(1, K + 1)
    xl = grid.nodes[0] - h * np.arange(K, 0, -1)
    return np.concatenate([left(xl), values.astype(complex), right(xr)]), K


def multiplier_info(values: np.ndarray, tail_bound: float = DEFAULT_TAIL_BOUND) -> dict:
    """Tail diagnostics recorded alongside a multiplier application."""
    r = tail_ratio(values)
    return {"tail_ratio": r, "tail_bound": tail_bound, "tail_ok": bool(r <= tail_bound)}


def apply_multiplier(
    values: np.ndarray,
    grid: RealGrid,
    spec: MultiplierSpec,
    *,
    mode: str = "line",
    extend: int = DEFAULT_EXTEND,
    tail_bound: float = DEFAULT_TAIL_BOUND,
    return_info: bool = False,
    warn: bool = False,
):
    """Apply a Fourier multiplier to grid samples.

    Parameters
    ----------
    values : array
        Samples on ``grid``.
    grid : RealGrid
    spec : MultiplierSpec
    mode : {"line", "periodic"}
        See the module docstring.
    extend : int
        Window widening factor for ``line`` mode.
    tail_bound : float
        Relative edge magnitude above which the tail diagnostic is raised.
    return_info : bool
        Also return the diagnostic dict.
    warn : bool
        Emit a :class:`RuntimeWarning` when the tail diagnostic trips.

    Returns
    -------
    ndarray or (ndarray, dict)
    """
    v = np.asarray(values)
    if v.shape != (grid.N,):
        raise ValueError(f"expected {grid.N} samples, got shape {v.shape}")
    info = multiplier_info(v, tail_bound)
    info["mode"] = mode
    if warn and not info["tail_ok"]:
        warnings.warn(
            f"{spec.name}: edge magnitude ratio {info['tail_ratio']:.3g} exceeds {tail_bound:.1g}",
            RuntimeWarning,
            stacklevel=2,
        )
    v = v.astype(complex)
    if spec.order == 0 and spec.name == "derivative-0":
        out = v.copy()
    elif mode == "periodic":
        out = np.fft.ifft(np.fft.fft(v) * spec.sample(grid.frequencies))
    elif mode == "line":
        ext, K = _extend(v, grid, max(int(extend), 1))
        if spec.line_kernel is not None:
            Hg = _hilbert_line(ext)
            if spec.line_kernel == "hilbert":
                full = Hg
            elif spec.line_kernel == "riesz-plus":
                full = 0.5 * ext + 0.5j * Hg
            elif spec.line_kernel == "riesz-minus":
                full = 0.5 * ext - 0.5j * Hg
            else:
                raise ValueError(f"unknown line kernel {spec.line_kernel!r}")
        else:
            big = RealGrid(grid.L * ext.size / grid.N, ext.size)
            full = np.fft.ifft(np.fft.fft(ext) * spec.sample(big.frequencies))
        out = full[K : K + grid.N]
    else:
        raise ValueError(f"unknown multiplier mode {mode!r}")
    if return_info:
        return out, info
    return out


# --------------------------------------------------------------------------
# half-line Fourier transform onto a real grid
# --------------------------------------------------------------------------


def _half_hat_factor(theta: np.ndarray) -> np.ndarray:
    # int_0^1 (1 - s) e^{i theta s} ds, with a series near theta = 0
    out = np.empty(theta.shape, dtype=complex)
    small = np.abs(theta) < 1e-3
    th = theta[small]
    out[small] = 0.5 + 1j * th / 6.0 - th**2 / 24.0 - 1j * th**3 / 120.0
    th = theta[~small]
    out[~small] = 1j / th + (1.0 - np.exp(1j * th)) / th**2
    return out


def half_line_fourier(
    func: Callable[[np.ndarray], np.ndarray],
    grid: RealGrid,
    k: int = 0,
    *,
    oversample: int = 4,
) -> np.ndarray:
    """``int_0^inf (i t)^k f(t) e^{i x t} dt`` at every grid node ``x``.

    The integrand is replaced by its piecewise-linear interpolant on a
    uniform ``t`` grid and integrated exactly against the exponential
    (Filon's method), which keeps the error uniform in ``x``. The sum
    over ``t`` nodes is done with one FFT.

    Parameters
    ----------
    func : callable
        Vectorized ``f(t)``.
    grid : RealGrid
        Output nodes.
    k : int
        Power of ``i t`` in the weight.
    oversample : int
        ``t``-step refinement factor; the ``t`` range is ``2 pi / h``
        regardless.
    """
    Nt = grid.N * int(oversample)
    dt = 2.0 * np.pi / (Nt * grid.h)
    t = dt * np.arange(Nt)
    g = np.asarray(func(t), dtype=complex) * (1j * t) ** k
    x = grid.nodes
    # sum_m g_m e^{i x_j t_m} with x_j = -L + j h and h dt = 2 pi / Nt
    phase = np.exp(-1j * grid.L * t)
    sums = (Nt * np.fft.ifft(g * phase))[: grid.N]
    theta = x * dt
    interior = np.sinc(theta / (2.0 * np.pi)) ** 2
    return dt * (interior * (sums - g[0]) + _half_hat_factor(theta) * g[0])
