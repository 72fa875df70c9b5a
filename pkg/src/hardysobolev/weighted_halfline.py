"""Weighted spaces on the half line: ``mu_{k,p}`` norms and ``L_n^p`` norms.

The measure ``d mu_{k,p} = 2 pi t^{kp} dt`` keeps the factor ``2 pi``
explicit so that Fourier-side and boundary-side norms are directly
comparable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .numerics import HalfLineGrid

__all__ = [
    "SpectrumSample",
    "EquivalenceReport",
    "sample_spectrum",
    "mu_norm",
    "ln_norm",
    "ln_inner",
    "equivalence_report",
]


@dataclass(frozen=True)
class SpectrumSample:
    """Samples ``f(t_i)`` of a function on the half line.

    Attributes
    ----------
    grid : HalfLineGrid
    values : ndarray
        Complex samples at ``grid.nodes``.
    n : int
        Sobolev order.
    p : float
        Exponent in ``[1, inf)``.
    func : callable, optional
        The sampled function itself. Some boundary-side computations need
        to evaluate it off the quadrature nodes.
    """

    grid: HalfLineGrid
    values: np.ndarray = field(repr=False)
    n: int = 0
    p: float = 2.0
    func: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.nodes.shape:
            raise ValueError("values must match the grid node count")
        if not np.all(np.isfinite(v)):
            raise ValueError("spectrum samples must be finite")
        if self.n < 0 or int(self.n) != self.n:
            raise ValueError("order must be a nonnegative integer")
        if not (1.0 <= self.p < np.inf):
            raise ValueError("exponent must lie in [1, inf)")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def with_order(self, n: int) -> "SpectrumSample":
        return SpectrumSample(self.grid, self.values, n, self.p, self.func)

    def scaled(self, c: complex) -> "SpectrumSample":
        f = self.func
        g = None if f is None else (lambda t, f=f, c=c: c * f(t))
        return SpectrumSample(self.grid, c * self.values, self.n, self.p, g)


def sample_spectrum(func: Callable, grid: HalfLineGrid, n: int = 0, p: float = 2.0) -> SpectrumSample:
    """Sample ``func`` on ``grid`` and keep the callable for later use."""
    return SpectrumSample(grid, np.asarray(func(grid.nodes), dtype=complex), n, p, func)


def mu_norm(f: SpectrumSample, k: int, p: Optional[float] = None) -> float:
    """``(sum_i w_i 2 pi t_i^{kp} |f(t_i)|^p)^{1/p}``.

    Parameters
    ----------
    f : SpectrumSample
    k : int
        Weight power, ``0 <= k <= f.n``.
    p : float, optional
        Exponent; defaults to ``f.p``.
    """
    p = f.p if p is None else float(p)
    if not (0 <= k <= f.n):
        raise ValueError(f"weight power {k} outside 0..{f.n}")
    if not (1.0 <= p < np.inf):
        raise ValueError("exponent must lie in [1, inf)")
    t = f.grid.nodes
    s = np.sum(f.grid.weights * 2.0 * np.pi * t ** (k * p) * np.abs(f.values) ** p)
    return float(s ** (1.0 / p))


def ln_norm(f: SpectrumSample) -> float:
    """p-sum of ``mu_norm(f, k)`` over ``k = 0..n``."""
    p = f.p
    return float(sum(mu_norm(f, k) ** p for k in range(f.n + 1)) ** (1.0 / p))


def ln_inner(f: SpectrumSample, g: SpectrumSample) -> complex:
    """``<f, g> = sum_k 2 pi int f conj(g) t^{2k} dt`` for ``p = 2``.

    Both samples must live on the same grid; the order is ``f.n``.
    """
    if f.grid is not g.grid and not (
        np.array_equal(f.grid.nodes, g.grid.nodes) and np.array_equal(f.grid.weights, g.grid.weights)
    ):
        raise ValueError("inner product needs a shared grid")
    t = f.grid.nodes
    weight = sum(t ** (2 * k) for k in range(f.n + 1))
    return complex(np.sum(f.grid.weights * 2.0 * np.pi * weight * f.values * np.conj(g.values)))


@dataclass(frozen=True)
class EquivalenceReport:
    two_term: float
    full: float
    ratio: float
    upper: float

    @property
    def within_bounds(self) -> bool:
        return 1.0 - 1e-12 <= self.ratio <= self.upper * (1.0 + 1e-12)


def equivalence_report(f: SpectrumSample) -> EquivalenceReport:
    """Compare the full norm with the two-term norm built from ``k = 0, n``.

    Raises
    ------
    ValueError
        If ``n < 1``, or the two-term norm vanishes (for the zero function
        the ratio is undefined; otherwise it means the quadrature is broken).
    """
    if f.n < 1:
        raise ValueError("equivalence report needs order n >= 1")
    p = f.p
    two = (mu_norm(f, 0) ** p + mu_norm(f, f.n) ** p) ** (1.0 / p)
    full = ln_norm(f)
    if two == 0.0:
        if full > 0.0:
            raise ValueError("two-term norm vanishes while the full norm does not: quadrature inconsistency")
        raise ValueError("ratio undefined for the zero function")
    return EquivalenceReport(two, full, full / two, (f.n + 1) ** (1.0 / p))
