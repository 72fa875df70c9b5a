"""Reference elements with closed-form derivative stacks.

Boundary gallery: upper Hardy traces whose derivatives are known exactly.
Spectral gallery: half-line spectra for the ``p = 2`` checks.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .boundary import sample_boundary, split_levels, boundary_sample
from .hardy_sobolev import HardySobolevElement
from .numerics import HalfLineGrid, RealGrid
from .weighted_halfline import SpectrumSample, sample_spectrum

__all__ = ["inverse_power_stack", "modulated_stack", "boundary_gallery", "spectral_gallery"]


def inverse_power_stack(c: complex, power: int, n: int) -> list[Callable]:
    """``D^k [c (x + i)^-power]`` for ``k = 0..n``."""

    def level(k):
        coef = c * (-1) ** k * math.prod(range(power, power + k))
        return lambda x: coef / (x + 1j) ** (power + k)

    return [level(k) for k in range(n + 1)]


def modulated_stack(a: float, power: int, n: int) -> list[Callable]:
    """``D^k [e^{iax} (x + i)^-power]`` by the Leibniz rule (``a >= 0``)."""
    base = inverse_power_stack(1.0, power, n)

    def level(k):
        return lambda x: np.exp(1j * a * x) * sum(math.comb(k, j) * (1j * a) ** (k - j) * base[j](x) for j in range(k + 1))

    return [level(k) for k in range(n + 1)]


def boundary_gallery(grid: RealGrid, n: int, p: float) -> dict[str, HardySobolevElement]:
    """Gallery elements on ``grid`` with ``n + 1`` stack levels at exponent ``p``.

    The Gaussian projection is the upper Plemelj part of ``exp(-x^2)``; it
    decays like ``1/x`` and is included only for ``1 < p < inf``.
    """
    out = {
        "1/(x+i)^2": sample_boundary(inverse_power_stack(1.0, 2, n), grid, p),
        "exp(ix)/(x+i)^2": sample_boundary(modulated_stack(1.0, 2, n), grid, p),
    }
    if p > 1:
        out["(i/2)/(x+i)"] = sample_boundary(inverse_power_stack(0.5j, 1, n), grid, p)
    if 1 < p < np.inf:
        x = grid.nodes
        g = np.exp(-x * x)
        stack = [g]
        # Hermite recursion for the derivatives of exp(-x^2)
        hm, hk = np.zeros_like(x), np.ones_like(x)
        for k in range(1, n + 1):
            hm, hk = hk, 2 * x * hk - 2 * (k - 1) * hm
            stack.append((-1) ** k * hk * g)
        plus, _ = split_levels(stack, grid)
        out["P+exp(-x^2)"] = boundary_sample(plus, grid, p, ftc_rtol=None)
    return {k: HardySobolevElement.from_boundary(v, check=False) for k, v in out.items()}


def spectral_gallery(grid: HalfLineGrid, n: int) -> dict[str, SpectrumSample]:
    """Half-line spectra ``e^{-t}``, ``t e^{-t}`` and ``e^{-2t}`` of order ``n``."""
    return {
        "exp(-t)": sample_spectrum(lambda t: np.exp(-t), grid, n),
        "t exp(-t)": sample_spectrum(lambda t: t * np.exp(-t), grid, n),
        "exp(-2t)": sample_spectrum(lambda t: np.exp(-2 * t), grid, n),
    }
