"""Sobolev functions on the real line and their Plemelj splitting.

A :class:`BoundarySample` carries a function together with its derivative
stack ``(f, Df, ..., D^n f)`` on a :class:`~hardysobolev.numerics.RealGrid`.
The split ``f = f+ + f-`` uses ``f+- = f/2 +- (i/2) H f`` levelwise, which is
legitimate because the Hilbert transform commutes with differentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import special

from .numerics import (
    RealGrid,
    apply_multiplier,
    derivative_spec,
    hilbert_spec,
    line_integral,
    multiplier_info,
)

__all__ = [
    "BoundarySample",
    "DecompositionResult",
    "EndpointError",
    "FTCError",
    "DEFAULT_PROBES",
    "boundary_sample",
    "sample_boundary",
    "lift_to_sobolev",
    "sobolev_norm",
    "sobolev_inner",
    "lp_norm",
    "plemelj_split",
    "split_levels",
    "hardy_residual",
    "ftc_residual",
    "kernel_lq_norm",
]

DEFAULT_PROBES: tuple[complex, ...] = (1j, 2j, 1 + 1j, -1 + 1j, 5j)
DEFAULT_FTC_RTOL = 1e-4


class EndpointError(ValueError):
    """Raised for operations that are not available at ``p = 1`` or ``p = inf``."""


class FTCError(ValueError):
    """Raised when consecutive stack levels violate the integral law."""


@dataclass(frozen=True)
class BoundarySample:
    """Function on the real line with its derivative stack.

    Attributes
    ----------
    grid : RealGrid
    stack : tuple of ndarray
        ``stack[k]`` holds ``D^k f`` on the grid.
    p : float
        Exponent in ``[1, inf]``.
    meta : dict
        Diagnostics gathered at construction (FTC residuals, edge ratios).
    """

    grid: RealGrid
    stack: tuple = field(repr=False)
    p: float = 2.0
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        levels = []
        for lev in self.stack:
            a = np.asarray(lev, dtype=complex)
            if a.shape != (self.grid.N,):
                raise ValueError("each stack level must match the grid")
            if not np.all(np.isfinite(a)):
                raise ValueError("stack levels must be finite")
            a = a.copy()
            a.flags.writeable = False
            levels.append(a)
        if not levels:
            raise ValueError("empty derivative stack")
        if not (1.0 <= self.p <= np.inf):
            raise ValueError("exponent must lie in [1, inf]")
        object.__setattr__(self, "stack", tuple(levels))

    @property
    def n(self) -> int:
        return len(self.stack) - 1

    @property
    def values(self) -> np.ndarray:
        return self.stack[0]

    def truncated(self, n: int) -> "BoundarySample":
        """Drop the levels above ``n``."""
        if not 0 <= n <= self.n:
            raise ValueError("cannot truncate to a higher order")
        return BoundarySample(self.grid, self.stack[: n + 1], self.p, dict(self.meta))

    def with_exponent(self, p: float) -> "BoundarySample":
        return BoundarySample(self.grid, self.stack, p, dict(self.meta))

    def map_levels(self, fn: Callable[[np.ndarray], np.ndarray]) -> "BoundarySample":
        return BoundarySample(self.grid, tuple(fn(a) for a in self.stack), self.p)


@dataclass(frozen=True)
class DecompositionResult:
    f_plus: BoundarySample
    f_minus: BoundarySample
    reconstruction_error: float
    hardy_residual_plus: float
    hardy_residual_minus: float
    orthogonality_defect: Optional[float] = None
    orthogonality_relative: Optional[float] = None
    meta: dict = field(default_factory=dict, compare=False)


# --------------------------------------------------------------------------
# construction
# --------------------------------------------------------------------------


def _dyadic_pairs(grid: RealGrid, levels: int = 6) -> list[tuple[int, int]]:
    ends = {0.0}
    for j in range(1, levels + 1):
        ends.add(grid.L / 2**j)
        ends.add(-grid.L / 2**j)
    idx = sorted({grid.index_of(e) for e in ends})
    return [(a, b) for i, a in enumerate(idx) for b in idx[i + 1 :]]


def _cumtrapz(v: np.ndarray, h: float) -> np.ndarray:
    c = np.zeros(v.size, dtype=complex)
    c[1:] = np.cumsum(0.5 * h * (v[1:] + v[:-1]))
    return c


def _ftc_from_stack(stack: Sequence[np.ndarray], grid: RealGrid, k: int) -> float:
    F, G = stack[k], stack[k + 1]
    h = grid.h
    C = _cumtrapz(G, h)
    dG = np.gradient(G, h)
    worst = 0.0
    for a, b in _dyadic_pairs(grid):
        # trapezoid plus the leading Euler-Maclaurin end correction
        integral = C[b] - C[a] - h * h / 12.0 * (dG[b] - dG[a])
        worst = max(worst, abs(F[b] - F[a] - integral))
    return float(worst)


def _check_ftc(stack, grid: RealGrid, rtol: Optional[float]) -> list[float]:
    residuals = [_ftc_from_stack(stack, grid, k) for k in range(len(stack) - 1)]
    if rtol is not None:
        for k, r in enumerate(residuals):
            scale = float(np.max(np.abs(stack[k]))) if stack[k].size else 0.0
            if r > rtol * max(scale, 1e-300):
                raise FTCError(
                    f"integral law fails between levels {k} and {k + 1}: residual {r:.3e} "
                    f"exceeds {rtol:.1e} x max|D^{k} f| = {rtol * scale:.3e}; the samples do not "
                    "resolve a Sobolev function of this order"
                )
    return residuals


def boundary_sample(
    stack: Sequence[np.ndarray],
    grid: RealGrid,
    p: float = 2.0,
    *,
    ftc_rtol: Optional[float] = DEFAULT_FTC_RTOL,
) -> BoundarySample:
    """Wrap a precomputed derivative stack, checking the integral law.

    Parameters
    ----------
    stack : sequence of arrays
        ``D^k f`` for ``k = 0..n``.
    grid : RealGrid
    p : float
    ftc_rtol : float or None
        Relative tolerance for the FTC check; ``None`` skips rejection but
        still records the residuals.
    """
    stack = [np.asarray(s, dtype=complex) for s in stack]
    res = _check_ftc(stack, grid, ftc_rtol)
    return BoundarySample(grid, tuple(stack), p, {"ftc_residuals": res})


def sample_boundary(
    funcs: Sequence[Callable[[np.ndarray], np.ndarray]],
    grid: RealGrid,
    p: float = 2.0,
    **kw,
) -> BoundarySample:
    """Sample closed-form ``D^k f`` callables on the grid."""
    x = grid.nodes
    return boundary_sample([np.asarray(fn(x), dtype=complex) * np.ones_like(x) for fn in funcs], grid, p, **kw)


def lift_to_sobolev(
    values: np.ndarray,
    grid: RealGrid,
    n: int,
    p: float = 2.0,
    method: str = "spectral",
    *,
    mode: str = "line",
    ftc_rtol: Optional[float] = DEFAULT_FTC_RTOL,
) -> BoundarySample:
    """Build the derivative stack of sampled data.

    Parameters
    ----------
    values : array
        Samples on ``grid``.
    n : int
        Sobolev order.
    method : {"spectral", "finite-difference"}
        Fourier multiplier ``(i xi)^k`` or repeated second-order central
        differences.
    mode : {"line", "periodic"}
        Multiplier mode for the spectral method.
    ftc_rtol : float or None
        FTC rejection threshold relative to ``max|D^k f|``.

    Raises
    ------
    FTCError
        If consecutive levels break the integral law.
    """
    v = np.asarray(values, dtype=complex)
    if v.shape != (grid.N,) or not np.all(np.isfinite(v)):
        raise ValueError("values must be finite samples on the grid")
    if n < 0:
        raise ValueError("order must be nonnegative")
    if method == "spectral":
        stack = [v] + [apply_multiplier(v, grid, derivative_spec(k), mode=mode) for k in range(1, n + 1)]
    elif method == "finite-difference":
        stack = [v]
        for _ in range(n):
            stack.append(np.gradient(stack[-1], grid.h, edge_order=2))
    else:
        raise ValueError(f"unknown lifting method {method!r}")
    res = _check_ftc(stack, grid, ftc_rtol)
    meta = {"ftc_residuals": res, "method": method, **multiplier_info(v)}
    return BoundarySample(grid, tuple(stack), p, meta)


# --------------------------------------------------------------------------
# norms
# --------------------------------------------------------------------------


def _use_tails(p: float) -> bool:
    # |f|^p with a 1/x tail is only integrable for p > 1
    return 1.0 < p < np.inf


def lp_norm(values: np.ndarray, grid: RealGrid, p: float, *, tails: Optional[bool] = None) -> float:
    """Line ``L^p`` norm of grid samples (grid max for ``p = inf``)."""
    if p == np.inf:
        return float(np.max(np.abs(values)))
    tails = _use_tails(p) if tails is None else tails
    s = line_integral(grid, lambda x, a: np.abs(a) ** p, values, tails=tails).real
    return float(max(s, 0.0) ** (1.0 / p))


def sobolev_norm(f: BoundarySample, *, tails: Optional[bool] = None) -> float:
    """``W_n^p`` norm: p-sum of the level ``L^p`` norms (plain sum for ``p = inf``)."""
    p = f.p
    if p == np.inf:
        return float(sum(np.max(np.abs(a)) for a in f.stack))
    return float(sum(lp_norm(a, f.grid, p, tails=tails) ** p for a in f.stack) ** (1.0 / p))


def sobolev_inner(f: BoundarySample, g: BoundarySample) -> complex:
    """``W_n^2`` inner product ``sum_k int D^k f conj(D^k g)``."""
    if f.n != g.n or f.grid != g.grid:
        raise ValueError("inner product needs matching grid and order")
    return complex(sum(line_integral(f.grid, lambda x, a, b: a * np.conj(b), u, v) for u, v in zip(f.stack, g.stack)))


# --------------------------------------------------------------------------
# Hardy residuals and the split
# --------------------------------------------------------------------------


def kernel_lq_norm(y: float, q: float) -> float:
    """``L^q`` norm of ``1/(x - c)`` over the line for ``Im c = y``."""
    y = abs(y)
    if q == np.inf:
        return 1.0 / y
    if q <= 1.0:
        raise ValueError("1/(x - c) is not in L^1")
    val = y ** (1.0 - q) * math.sqrt(math.pi) * math.exp(special.gammaln((q - 1) / 2) - special.gammaln(q / 2))
    return float(val ** (1.0 / q))


def _conjugate_exponent(p: float) -> float:
    if p == 1.0:
        return np.inf
    if p == np.inf:
        return 1.0
    return p / (p - 1.0)


def _residual_one(values: np.ndarray, grid: RealGrid, p: float, probe: complex, norm_f: float) -> float:
    zc = np.conj(probe)
    tails = _use_tails(p)
    if p == np.inf:
        # bounded data: pair against the normalized kernel 1/((x - zc)(x + i))
        w = -1j if probe.imag > 0 else 1j
        integrand = lambda x, a: a / ((x - zc) * (x - w))  # noqa: E731
        val = line_integral(grid, integrand, values, tails=False)
        knorm = line_integral(grid, lambda x: np.abs(1.0 / ((x - zc) * (x - w)))).real
    else:
        val = line_integral(grid, lambda x, a: a / (x - zc), values, tails=tails)
        knorm = kernel_lq_norm(probe.imag, _conjugate_exponent(p))
    return float(abs(val) / (norm_f * knorm))


def hardy_residual(
    f: BoundarySample,
    half: str = "plus",
    probes: Optional[Sequence[complex]] = None,
    *,
    levels: str = "all",
) -> float:
    """Normalized defect of the Hardy-space moment condition.

    For ``half="plus"`` the probes lie in the upper half plane and the
    quantity is ``max |int f(x)/(x - conj z) dx| / (||f||_p ||1/(x - conj z)||_q)``.
    For ``half="minus"`` the probes lie in the lower half plane.

    Parameters
    ----------
    f : BoundarySample
    half : {"plus", "minus"}
    probes : sequence of complex, optional
        Defaults to :data:`DEFAULT_PROBES` (conjugated for ``minus``).
    levels : {"all", "base"}
        Check every stack level or only ``f`` itself.

    Raises
    ------
    ValueError
        If a probe is on the wrong side or closer than ``2h`` to the axis.
    """
    if half not in ("plus", "minus"):
        raise ValueError("half must be 'plus' or 'minus'")
    sign = 1.0 if half == "plus" else -1.0
    if probes is None:
        probes = DEFAULT_PROBES if half == "plus" else tuple(np.conj(DEFAULT_PROBES))
    probes = [complex(z) for z in probes]
    for z in probes:
        if sign * z.imag <= 0:
            raise ValueError(f"probe {z} is not in the {half} half plane")
        if abs(z.imag) < 2 * f.grid.h:
            raise ValueError(f"probe {z} is closer than 2h = {2 * f.grid.h:.3g} to the real axis")
    stack = f.stack if levels == "all" else f.stack[:1]
    worst = 0.0
    for a in stack:
        nf = lp_norm(a, f.grid, f.p)
        if nf == 0.0:
            continue
        for z in probes:
            worst = max(worst, _residual_one(a, f.grid, f.p, z, nf))
    return worst


def split_levels(stack: Sequence[np.ndarray], grid: RealGrid, mode: str = "line") -> tuple[list, list]:
    """``f+- = f/2 +- (i/2) H f`` on every level, with no exponent check."""
    plus, minus = [], []
    for a in stack:
        Ha = apply_multiplier(a, grid, hilbert_spec(), mode=mode)
        plus.append(0.5 * a + 0.5j * Ha)
        minus.append(0.5 * a - 0.5j * Ha)
    return plus, minus


def plemelj_split(
    f: BoundarySample,
    *,
    mode: str = "line",
    probes: Optional[Sequence[complex]] = None,
    residuals: bool = True,
) -> DecompositionResult:
    """Split ``f`` into upper and lower Hardy boundary parts.

    Parameters
    ----------
    f : BoundarySample
        Exponent must satisfy ``1 < p < inf``.
    mode : {"line", "periodic"}
        Multiplier mode for the Hilbert transform.
    probes : sequence of complex, optional
        Upper half-plane probes; the lower part is checked at their conjugates.
    residuals : bool
        Compute the Hardy residuals (skipping saves time in inner loops).

    Raises
    ------
    EndpointError
        For ``p = 1`` or ``p = inf``: the Riesz projections are unbounded
        there and the direct-sum decomposition breaks down.
    """
    if not (1.0 < f.p < np.inf):
        raise EndpointError(
            f"Plemelj splitting needs 1 < p < inf (got p={f.p}); at the endpoints the Riesz "
            "projection is unbounded and the direct sum of upper and lower Hardy parts does not hold"
        )
    plus, minus = split_levels(f.stack, f.grid, mode)
    fp = BoundarySample(f.grid, tuple(plus), f.p)
    fm = BoundarySample(f.grid, tuple(minus), f.p)
    diff = BoundarySample(f.grid, tuple(a - (b + c) for a, b, c in zip(f.stack, plus, minus)), f.p)
    rec = sobolev_norm(diff, tails=False)
    if residuals:
        up = list(DEFAULT_PROBES if probes is None else probes)
        rp = hardy_residual(fp, "plus", up)
        rm = hardy_residual(fm, "minus", [np.conj(z) for z in up])
    else:
        rp = rm = float("nan")
    orth = orth_rel = None
    if f.p == 2.0:
        orth = abs(sobolev_inner(fp, fm))
        denom = sobolev_norm(fp) * sobolev_norm(fm)
        orth_rel = orth / denom if denom > 0 else 0.0
    return DecompositionResult(fp, fm, rec, rp, rm, orth, orth_rel, {"mode": mode})


def ftc_residual(f: BoundarySample, k: int) -> float:
    """Worst FTC defect between levels ``k`` and ``k+1`` over dyadic intervals.

    The intervals have endpoints in ``{0, +-L/2, ..., +-L/64}`` snapped to
    the grid; the integral is the trapezoid rule on the grid with the
    ``h^2/12`` end correction.
    """
    if not 0 <= k < f.n:
        raise ValueError(f"level {k} needs 0 <= k < n = {f.n}")
    return _ftc_from_stack(f.stack, f.grid, k)
