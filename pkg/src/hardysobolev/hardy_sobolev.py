"""Elements of the Hardy-Sobolev space on the upper half plane.

An element is stored either through its boundary derivative stack on a
:class:`~hardysobolev.numerics.RealGrid` (any ``1 <= p <= inf``) or, for
``p = 2``, through its half-line spectrum. Interior values come from the
Cauchy integral of the boundary data; norms come from the boundary stack
(or the weighted spectrum norm), which is legitimate because the boundary
map is an isometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .boundary import (
    BoundarySample,
    boundary_sample,
    hardy_residual,
    lp_norm,
    sobolev_norm,
)
from .numerics import (
    _GL_U,
    _GL_W,
    RealGrid,
    TailModel,
    apply_multiplier,
    fit_tail,
    half_line_fourier,
    line_integral,
    upper_extension_spec,
)
from .weighted_halfline import SpectrumSample, ln_norm

__all__ = [
    "EMBEDDING_CONSTANT",
    "AlgebraError",
    "HardySobolevElement",
    "ProductCheck",
    "DerivativeValue",
    "CounterexampleReport",
    "EmbeddingCheck",
    "cauchy_eval",
    "cauchy_eval_many",
    "poisson_eval",
    "derivative_eval",
    "line_values",
    "line_norm_at_height",
    "hs_norm",
    "embedding_check",
    "probe_lattice_rows",
    "product",
    "algebra_constant",
    "counterexample_line_norms",
]

EMBEDDING_CONSTANT = math.exp(1.0 / math.e)
LATTICE_HEIGHTS = (0.1, 0.5, 1.0, 5.0, 25.0)
DEFAULT_RESIDUAL_TOL = 1e-3


class AlgebraError(ValueError):
    """Raised when the pointwise product is requested for ``n = 0``."""


# --------------------------------------------------------------------------
# elements
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class HardySobolevElement:
    """Element of ``H_n^p`` on the upper half plane.

    Use :meth:`from_boundary` or :meth:`from_spectrum` rather than the
    constructor; they run the validation.
    """

    representation: str
    n: int
    p: float
    boundary: Optional[BoundarySample] = field(default=None, repr=False)
    spectrum: Optional[SpectrumSample] = field(default=None, repr=False)
    residual: float = 0.0
    _tails: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_boundary(
        cls,
        sample: BoundarySample,
        *,
        tol: float = DEFAULT_RESIDUAL_TOL,
        probes: Optional[Sequence[complex]] = None,
        check: bool = True,
    ) -> "HardySobolevElement":
        """Wrap boundary data after checking it is an upper Hardy trace.

        Raises
        ------
        ValueError
            If the Hardy residual of any stack level exceeds ``tol``.
        """
        r = hardy_residual(sample, "plus", probes) if check else float("nan")
        if check and r > tol:
            raise ValueError(f"boundary data fail the upper Hardy test: residual {r:.3e} > {tol:.1e}")
        return cls("boundary", sample.n, sample.p, sample, None, r)

    @classmethod
    def from_spectrum(cls, f: SpectrumSample) -> "HardySobolevElement":
        if f.p != 2.0:
            raise ValueError("the spectral representation is only available for p = 2")
        return cls("fourier", f.n, 2.0, None, f, 0.0)

    def boundary_sample(self, grid: Optional[RealGrid] = None) -> BoundarySample:
        """Boundary stack; a spectral element is transformed onto ``grid``."""
        if self.boundary is not None and (grid is None or grid == self.boundary.grid):
            return self.boundary
        if self.spectrum is None:
            raise ValueError("cannot move a boundary element to a different grid")
        if grid is None:
            raise ValueError("a grid is needed to build boundary data from a spectrum")
        key = ("trace", grid)
        if key not in self._tails:
            f = self.spectrum
            if f.func is None:
                raise ValueError("spectrum sample has no callable to transform")
            stack = [half_line_fourier(f.func, grid, k) for k in range(self.n + 1)]
            self._tails[key] = boundary_sample(stack, grid, 2.0, ftc_rtol=None)
        return self._tails[key]

    def to_boundary(self, grid: RealGrid) -> "HardySobolevElement":
        b = self.boundary_sample(grid)
        return HardySobolevElement("boundary", self.n, self.p, b, self.spectrum, self.residual)

    def tail_models(self, k: int) -> tuple[TailModel, TailModel]:
        """Cached (left, right) tail models of stack level ``k``."""
        key = ("tail", k)
        if key not in self._tails:
            b = self._require_boundary()
            a = b.stack[k]
            self._tails[key] = (fit_tail(a, b.grid, -1), fit_tail(a, b.grid, +1))
        return self._tails[key]

    def _require_boundary(self) -> BoundarySample:
        if self.boundary is None:
            raise ValueError("operation needs a boundary representation; call to_boundary(grid)")
        return self.boundary


def _check_point(F: HardySobolevElement, z: complex) -> complex:
    z = complex(z)
    if z.imag <= 0:
        raise ValueError(f"point {z} is not in the upper half plane")
    h = F._require_boundary().grid.h
    if z.imag < 2 * h:
        raise ValueError(f"point {z} is closer than 2h = {2 * h:.3g} to the real axis")
    return z


def _cauchy_level(F: HardySobolevElement, level: int, z: complex, power: int = 1) -> complex:
    """``(1 / 2 pi i) int D^level F_l(x) / (x - z)^power dx``."""
    b = F._require_boundary()
    a = b.stack[level]
    if F.p == np.inf:
        # bounded data: subtract the value of the kernel at -i to make it integrable
        w = -1j
        integrand = lambda x, v: v * (1.0 / (x - z) ** power - 1.0 / (x - w) ** power)  # noqa: E731
        return line_integral(b.grid, integrand, a, tails=False) / (2j * np.pi)
    val = line_integral(b.grid, lambda x, v: v / (x - z) ** power, a, models=[F.tail_models(level)])
    return val / (2j * np.pi)


def cauchy_eval(F: HardySobolevElement, z: complex) -> complex:
    """Cauchy integral of the boundary trace at ``z`` in the upper half plane.

    Examples
    --------
    With ``F_l(x) = 1/(x+i)^2`` the value at ``z = i`` is ``-1/4``.
    """
    z = _check_point(F, z)
    return complex(_cauchy_level(F, 0, z))


def poisson_eval(F: HardySobolevElement, k: int, z: complex) -> complex:
    """Poisson integral of the stack level ``D^k F_l`` at ``z = x + iy``.

    The positive sign is used for every ``k``: ``F^(k)`` has boundary trace
    ``D^k F_l`` and is the Poisson integral of it.
    """
    z = _check_point(F, z)
    if not 0 <= k <= F.n:
        raise ValueError(f"level {k} outside 0..{F.n}")
    b = F._require_boundary()
    x0, y = z.real, z.imag
    kern = lambda t, v: v * y / ((x0 - t) ** 2 + y**2)  # noqa: E731
    tails = F.p != np.inf and F.p > 1
    models = [F.tail_models(k)] if tails else None
    return complex(line_integral(b.grid, kern, b.stack[k], tails=tails, models=models) / np.pi)


@dataclass(frozen=True)
class DerivativeValue:
    value: complex
    by_parts: complex
    discrepancy: float
    flagged: bool


def derivative_eval(
    F: HardySobolevElement,
    k: int,
    z: complex,
    *,
    tol: float = 1e-4,
    return_diagnostic: bool = False,
):
    """``F^(k)(z)`` from the ``k!``-kernel Cauchy integral of ``F_l``.

    The integrated-by-parts form ``(1/2 pi i) int D^(k-1) F_l(x)/(x - z)^2 dx``
    is computed alongside; their gap is a consistency check on the stack
    (flagged above ``10 * tol``). Repeated integration by parts moves no
    sign, so both forms carry a plus sign for every ``k``. The check reads
    levels ``0`` and ``k - 1`` only, so at ``k = 1`` it is vacuous.

    Parameters
    ----------
    F : HardySobolevElement
    k : int
        ``0 <= k <= n``; ``k = 0`` is :func:`cauchy_eval`.
    z : complex
    tol : float
    return_diagnostic : bool
        Return a :class:`DerivativeValue` instead of the bare value.
    """
    if k == 0:
        v = cauchy_eval(F, z)
        return DerivativeValue(v, v, 0.0, False) if return_diagnostic else v
    z = _check_point(F, z)
    if not 1 <= k <= F.n:
        raise ValueError(f"derivative order {k} outside 1..{F.n}")
    main = math.factorial(k) * _cauchy_level(F, 0, z, power=k + 1)
    ibp = _cauchy_level(F, k - 1, z, power=2)
    gap = abs(main - ibp)
    if return_diagnostic:
        return DerivativeValue(complex(main), complex(ibp), gap, gap > 10 * tol)
    return complex(main)


def cauchy_eval_many(F: HardySobolevElement, zs: np.ndarray, level: int = 0, *, chunk: int = 256) -> np.ndarray:
    """Cauchy integral of stack level ``level`` at many points.

    Points with large imaginary part use a thinned grid (the kernel is
    smooth on the scale ``Im z``), and points beyond the grid window are
    evaluated through the analytic continuation of the tail model.
    """
    b = F._require_boundary()
    grid = b.grid
    zs = np.asarray(zs, dtype=complex)
    out = np.empty(zs.shape, dtype=complex)
    flat_z = zs.ravel()
    flat_o = out.reshape(-1)
    left, right = F.tail_models(level)
    a = b.stack[level]
    x = grid.nodes
    outside = np.abs(flat_z.real) >= grid.L * 0.999
    if np.any(outside):
        zo = flat_z[outside]
        flat_o[outside] = np.where(zo.real > 0, right(zo), left(zo))
    inside = np.flatnonzero(~outside)
    if inside.size == 0:
        return out
    if np.any(flat_z[inside].imag < 2 * grid.h):
        raise ValueError("evaluation points closer than 2h to the real axis")
    stride = np.maximum(1, np.floor(flat_z[inside].imag / (4 * grid.h))).astype(int)
    # the data themselves only need resolving on a fixed scale
    stride = np.minimum(stride, max(1, int(0.05 / grid.h)))
    for s in np.unique(stride):
        sel = inside[stride == s]
        xs, vs = x[::s], a[::s]
        wts = np.full(xs.size, grid.h * s)
        wts[0] *= 0.5
        # the thinned grid may not reach the last node; integrate to where it ends
        wts[-1] *= 0.5
        for start in range(0, sel.size, chunk):
            idx = sel[start : start + chunk]
            zc = flat_z[idx][:, None]
            core = (wts * vs / (xs - zc)).sum(axis=1)
            tails = np.zeros(idx.size, dtype=complex)
            for model, xe in ((left, xs[0]), (right, xs[-1])):
                m = model.decaying()
                u = _GL_U
                xt = xe / u
                g = m(xt)[None, :] / (xt[None, :] - zc)
                tails += abs(xe) * (g * (_GL_W / u**2)).sum(axis=1)
            flat_o[idx] = (core + tails) / (2j * np.pi)
    return out



# --------------------------------------------------------------------------
# horizontal lines
# --------------------------------------------------------------------------


def line_values(F: HardySobolevElement, y: float, k: int = 0) -> np.ndarray:
    """``F^(k)(x + i y)`` at every grid node, via the multiplier ``1_{xi>0} e^{-y xi}``."""
    b = F._require_boundary()
    if y < 0:
        raise ValueError("height must be nonnegative")
    if y == 0:
        return np.array(b.stack[k])
    return apply_multiplier(b.stack[k], b.grid, upper_extension_spec(y))


def line_norm_at_height(F: HardySobolevElement, y: float) -> float:
    """p-sum over ``k`` of ``||F^(k)(. + iy)||_p`` along the line ``Im z = y``."""
    b = F._require_boundary()
    p = F.p
    norms = [lp_norm(line_values(F, y, k), b.grid, p) for k in range(F.n + 1)]
    if p == np.inf:
        return float(sum(norms))
    return float(sum(v**p for v in norms) ** (1.0 / p))


# --------------------------------------------------------------------------
# norms, embedding, products
# --------------------------------------------------------------------------


def hs_norm(F: HardySobolevElement) -> float:
    """``H_n^p`` norm through the boundary stack or the weighted spectrum."""
    if F.representation == "fourier":
        return ln_norm(F.spectrum)
    return sobolev_norm(F.boundary)


def probe_lattice_rows(grid: RealGrid) -> tuple[np.ndarray, np.ndarray]:
    """Column indices (``|x| <= L/2`` in steps of ``16h``) and row heights."""
    x = grid.nodes
    cols = np.flatnonzero(np.abs(x) <= grid.L / 2)[::16]
    rows = np.array((4 * grid.h,) + LATTICE_HEIGHTS)
    return cols, rows


@dataclass(frozen=True)
class EmbeddingCheck:
    sup_val: float
    bound: float
    passed: bool
    argmax: complex


def embedding_check(F: HardySobolevElement, grid: Optional[RealGrid] = None) -> EmbeddingCheck:
    """Compare ``sup |F|`` on the probe lattice with ``e^{1/e} ||F||``.

    The supremum runs over the boundary grid and the lattice
    ``{x : |x| <= L/2, step 16h} x {4h, 0.1, 0.5, 1, 5, 25}``.
    """
    if F.n < 1:
        raise ValueError("the sup-norm embedding needs n >= 1")
    if F.boundary is None:
        F = F.to_boundary(grid)
    b = F.boundary
    norm = hs_norm(F)
    best, where = float(np.max(np.abs(b.stack[0]))), complex(b.grid.nodes[int(np.argmax(np.abs(b.stack[0])))])
    cols, rows = probe_lattice_rows(b.grid)
    for y in rows:
        vals = np.abs(line_values(F, y)[cols])
        j = int(np.argmax(vals))
        if vals[j] > best:
            best, where = float(vals[j]), complex(b.grid.nodes[cols[j]], y)
    bound = EMBEDDING_CONSTANT * norm
    return EmbeddingCheck(best, bound, best <= bound * (1.0 + 1e-6), where)


def algebra_constant(n: int, p: float) -> float:
    """Factor multiplying ``||F|| ||G||`` in the product inequality."""
    if p == np.inf:
        return float(2 ** (n + 1) - 1)
    return EMBEDDING_CONSTANT * ((2.0 ** (p * (n + 1)) - 1.0) / (2.0**p - 1.0)) ** (1.0 / p)


@dataclass(frozen=True)
class ProductCheck:
    lhs: float
    rhs: float
    passed: bool

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else 0.0


def _leibniz(a: Sequence[np.ndarray], b: Sequence[np.ndarray]) -> list[np.ndarray]:
    out = []
    for k in range(len(a)):
        out.append(sum(math.comb(k, j) * a[j] * b[k - j] for j in range(k + 1)))
    return out


def product(
    F: HardySobolevElement,
    G: HardySobolevElement,
    *,
    grid: Optional[RealGrid] = None,
    check_residual: bool = False,
) -> tuple[HardySobolevElement, ProductCheck]:
    """Pointwise product through the Leibniz rule on boundary stacks.

    Raises
    ------
    AlgebraError
        For ``n = 0``: the product of two ``H^p`` functions need not lie in
        ``H^p``, so no inequality of this form can hold there.
    """
    if F.n != G.n or F.p != G.p:
        raise ValueError("factors must share order and exponent")
    if F.n < 1:
        raise AlgebraError(
            "pointwise products are only controlled for n >= 1; in the classical case n = 0 "
            "the product of two H^p functions can leave H^p"
        )
    if grid is None:
        grid = (F.boundary or G.boundary).grid if (F.boundary or G.boundary) else None
    bf, bg = F.boundary_sample(grid), G.boundary_sample(grid)
    if bf.grid != bg.grid:
        raise ValueError("factors live on different grids")
    stack = _leibniz(bf.stack, bg.stack)
    sample = BoundarySample(bf.grid, tuple(stack), F.p)
    H = HardySobolevElement.from_boundary(sample, check=check_residual)
    lhs = sobolev_norm(sample)
    rhs = algebra_constant(F.n, F.p) * sobolev_norm(bf) * sobolev_norm(bg)
    return H, ProductCheck(lhs, rhs, lhs <= rhs * (1.0 + 1e-9))


# --------------------------------------------------------------------------
# the H^p / H^{2p} counterexample
# --------------------------------------------------------------------------


def counterexample_function(z: np.ndarray, p: float) -> np.ndarray:
    """``(1 / (sqrt(z) (z + i)))^{1/p}`` with principal branches on the upper half plane."""
    return (1.0 / (np.sqrt(z) * (z + 1j))) ** (1.0 / p)


def _power_tail(L: float, a: float) -> float:
    # int_{|x|>L} |x|^{-a} dx for the leading tail |F|^q ~ |x|^{-a}
    return 2.0 * L ** (1.0 - a) / (a - 1.0)


@dataclass(frozen=True)
class CounterexampleReport:
    heights: tuple
    lp_norms: tuple
    l2p_norms: tuple
    growth_factors: tuple
    log_slope: float
    monotone: bool
    min_factor: float


def counterexample_line_norms(
    p: float,
    heights: Sequence[float] = (0.1, 0.05, 0.025),
    grid: Optional[RealGrid] = None,
) -> CounterexampleReport:
    """Line norms of the counterexample at decreasing heights.

    Returns the ``L^p`` and ``L^{2p}`` norms on ``Im z = y`` for each
    height, the growth factor of the ``L^{2p}`` norm per step, and the
    slope of ``||F(. + iy)||_{2p}^{2p}`` against ``log(1/y)`` (a positive
    slope means logarithmic divergence).
    """
    if grid is None:
        grid = RealGrid(200.0, 2**16)
    heights = tuple(float(y) for y in heights)
    if min(heights) < 4 * grid.h:
        raise ValueError("heights must stay at least 4h above the axis")
    x = grid.nodes
    lp, l2p, raw2p = [], [], []
    for y in heights:
        v = np.abs(counterexample_function(x + 1j * y, p))
        ip = np.real(line_integral(grid, lambda t, a: a**p, v, tails=False)) + _power_tail(grid.L, 1.5)
        q = 2 * p
        i2 = np.real(line_integral(grid, lambda t, a: a**q, v, tails=False)) + _power_tail(grid.L, 3.0)
        lp.append(float(ip ** (1.0 / p)))
        l2p.append(float(i2 ** (1.0 / q)))
        raw2p.append(float(i2))
    factors = tuple(l2p[i + 1] / l2p[i] for i in range(len(l2p) - 1))
    slope = float(np.polyfit(np.log(1.0 / np.array(heights)), np.array(raw2p), 1)[0])
    return CounterexampleReport(
        heights,
        tuple(lp),
        tuple(l2p),
        factors,
        slope,
        bool(all(f > 1.0 for f in factors)),
        float(min(factors)) if factors else float("nan"),
    )
