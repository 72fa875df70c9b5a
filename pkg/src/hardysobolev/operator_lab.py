"""Multiplication and weighted composition operators.

Multiplication operators are studied through Galerkin matrices in an
orthonormal basis of ``H_n^2``; composition operators through their two
sufficient boundedness criteria, a positive-kernel test and a direct
boundary-stack evaluation.

The Galerkin basis comes from Gram-Schmidt on ``t^m e^{-t}`` in
``L_n^2``. It is built from the family ``l_m(t) = (-1)^m L_m(2t) e^{-t}``
(``L_m`` Laguerre), which spans the same nested subspaces and has a
tridiagonal moment structure, so the Gram matrix is exact and well
conditioned. The Paley-Wiener transform of ``l_m`` is
``(-1)^m i (z - i)^m / (z + i)^(m+1)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.special import eval_laguerre

from .boundary import BoundarySample
from .hardy_sobolev import HardySobolevElement, cauchy_eval_many, hs_norm
from .hilbert_model import KernelHandle, kernel_eval
from .numerics import HalfLineGrid
from .weighted_halfline import SpectrumSample

__all__ = [
    "AnalyticSymbol",
    "GalerkinOperator",
    "SelfMapError",
    "SymbolError",
    "upper_lattice",
    "build_onb",
    "basis_values",
    "basis_spectrum",
    "assemble_multiplication",
    "spectrum_check",
    "adjoint_eigen_residual",
    "invertibility_check",
    "compactness_profile",
    "composition_criterion_A",
    "composition_criterion_angular",
    "weighted_composition_apply",
    "psd_kernel_check",
    "MAX_DIMENSION",
    "MAX_ORDER",
]

MAX_DIMENSION = 48
MAX_ORDER = 4
COND_LIMIT = 1e12
QUAD_K = 1024


class SymbolError(ValueError):
    """Symbol fails its schema, its derivative validation or a precondition."""


class SelfMapError(ValueError):
    """A composition symbol leaves the upper half plane."""


# --------------------------------------------------------------------------
# probe lattices
# --------------------------------------------------------------------------


def upper_lattice(ymin: float = 1e-3, ymax: float = 1e4, rows: int = 15, cols: int = 15) -> np.ndarray:
    """Log-spaced lattice in the upper half plane, shape ``(rows, 2 cols + 1)``.

    Row ``r`` has height ``y_r``; abscissae are ``0`` and ``+-10^s`` for
    ``s`` log-spaced in ``[-3, 4]``.
    """
    ys = np.logspace(math.log10(ymin), math.log10(ymax), rows)
    xs = np.logspace(-3, 4, cols)
    xs = np.concatenate([-xs[::-1], [0.0], xs])
    return xs[None, :] + 1j * ys[:, None]


# --------------------------------------------------------------------------
# symbols
# --------------------------------------------------------------------------


def _parse_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise SymbolError(f"complex pair must have two entries, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return complex(v.replace(" ", "").replace("i", "j"))
    if isinstance(v, (int, float, complex)) and not isinstance(v, bool):
        return complex(v)
    raise SymbolError(f"cannot read a complex number from {v!r}")


def _encode_complex(c: complex):
    c = complex(c)
    return [c.real, c.imag]


def _rational_derivatives(num: Polynomial, den: Polynomial, order: int) -> list[tuple[Polynomial, int]]:
    # d^k (P/Q) = P_k / Q^(k+1); quotient rule on P_k / Q^(k+1)
    out = [(num, 1)]
    P, m = num, 1
    dQ = den.deriv()
    for _ in range(order):
        P = P.deriv() * den - m * P * dQ
        m += 1
        out.append((P, m))
    return out


@dataclass(frozen=True)
class AnalyticSymbol:
    """Holomorphic symbol on the upper half plane with derivative closures.

    Build one with the class methods; ``kind`` is one of ``rational``,
    ``moebius-to-disk``, ``affine``, ``cayley-exp``, ``constant`` or
    ``custom``.

    Attributes
    ----------
    kind : str
    coefficients : dict
        JSON-ready parameters of the symbol.
    derivative : callable
        ``derivative(z, k)`` returns ``psi^(k)(z)``.
    poles : tuple of complex
    max_order : int
        Highest derivative order the closures support.
    """

    kind: str
    coefficients: dict
    derivative: Callable[[np.ndarray, int], np.ndarray] = field(repr=False, compare=False)
    poles: tuple = ()
    max_order: int = 64

    def __call__(self, z) -> np.ndarray:
        return self.derivative(np.asarray(z, dtype=complex), 0)

    def d(self, z, k: int) -> np.ndarray:
        if not 0 <= k <= self.max_order:
            raise SymbolError(f"derivative order {k} not available for this symbol")
        return self.derivative(np.asarray(z, dtype=complex), k)

    # constructors --------------------------------------------------------

    @classmethod
    def constant(cls, c: complex) -> "AnalyticSymbol":
        c = complex(c)

        def der(z, k):
            return np.full(np.shape(z), c if k == 0 else 0.0, dtype=complex)

        return cls("constant", {"c": _encode_complex(c)}, der)

    @classmethod
    def rational(cls, numerator: Sequence, denominator: Sequence, *, kind: str = "rational", params=None) -> "AnalyticSymbol":
        """``P(z)/Q(z)`` with coefficient lists in ascending powers.

        Raises
        ------
        SymbolError
            If a pole lies in the open upper half plane.
        """
        num = Polynomial([_parse_complex(c) for c in numerator])
        den = Polynomial([_parse_complex(c) for c in denominator]).trim()
        if den.degree() == 0 and den.coef[0] == 0:
            raise SymbolError("zero denominator")
        poles = tuple(complex(r) for r in den.roots()) if den.degree() > 0 else ()
        if any(p.imag > 1e-12 for p in poles):
            raise SymbolError(f"pole in the upper half plane: {poles}")
        cache: dict[int, tuple[Polynomial, int]] = {}

        def der(z, k):
            if k not in cache:
                for j, pair in enumerate(_rational_derivatives(num, den, k)):
                    cache[j] = pair
            P, m = cache[k]
            return P(z) / den(z) ** m

        coeffs = params or {"numerator": [_encode_complex(c) for c in num.coef], "denominator": [_encode_complex(c) for c in den.coef]}
        return cls(kind, coeffs, der, poles)

    @classmethod
    def moebius_to_disk(cls, a: complex = 1j, scale: complex = 1.0, shift: complex = 0.0) -> "AnalyticSymbol":
        """``shift + scale (z - a)/(z - conj a)``; maps onto a disk when ``Im a > 0``."""
        a, scale, shift = complex(a), complex(scale), complex(shift)
        if a.imag <= 0:
            raise SymbolError("Moebius centre must lie in the upper half plane")
        ab = a.conjugate()
        num = [-scale * a - shift * ab, scale + shift]
        params = {"a": _encode_complex(a), "scale": _encode_complex(scale), "shift": _encode_complex(shift)}
        return cls.rational(num, [-ab, 1.0], kind="moebius-to-disk", params=params)

    @classmethod
    def affine(cls, k: complex, b: complex) -> "AnalyticSymbol":
        """``k z + b``."""
        k, b = complex(k), complex(b)

        def der(z, m):
            if m == 0:
                return k * z + b
            return np.full(np.shape(z), k if m == 1 else 0.0, dtype=complex)

        return cls("affine", {"k": _encode_complex(k), "b": _encode_complex(b)}, der)

    @classmethod
    def cayley_exp(cls, a: float) -> "AnalyticSymbol":
        """``exp(i a z)``."""
        a = float(a)

        def der(z, k):
            return (1j * a) ** k * np.exp(1j * a * z)

        return cls("cayley-exp", {"a": a}, der)

    @classmethod
    def custom(
        cls,
        derivatives: Sequence[Callable[[np.ndarray], np.ndarray]],
        *,
        poles: Sequence[complex] = (),
        validate: bool = True,
    ) -> "AnalyticSymbol":
        """User symbol given by closures ``[psi, psi', ...]``.

        The closures are checked against central differences unless
        ``validate`` is false.
        """
        funcs = list(derivatives)
        if not funcs:
            raise SymbolError("at least the symbol itself is needed")

        def der(z, k):
            return np.asarray(funcs[k](z), dtype=complex)

        sym = cls("custom", {}, der, tuple(complex(p) for p in poles), len(funcs) - 1)
        if validate and sym.max_order > 0:
            sym.validate_derivatives(sym.max_order)
        return sym

    @classmethod
    def from_json(cls, spec) -> "AnalyticSymbol":
        """Read a registry record ``{"kind": ..., ...}`` (dict or JSON string)."""
        if isinstance(spec, str):
            spec = json.loads(spec)
        if not isinstance(spec, dict) or "kind" not in spec:
            raise SymbolError("symbol record must be an object with a 'kind' key")
        kind = spec["kind"]
        allowed = {
            "constant": {"c"},
            "rational": {"numerator", "denominator"},
            "moebius-to-disk": {"a", "scale", "shift"},
            "affine": {"k", "b"},
            "cayley-exp": {"a"},
        }
        if kind not in allowed:
            raise SymbolError(f"unknown symbol kind {kind!r}")
        extra = set(spec) - allowed[kind] - {"kind"}
        if extra:
            raise SymbolError(f"unknown keys for {kind}: {sorted(extra)}")
        try:
            if kind == "constant":
                return cls.constant(_parse_complex(spec["c"]))
            if kind == "rational":
                return cls.rational(spec["numerator"], spec.get("denominator", [1.0]))
            if kind == "moebius-to-disk":
                return cls.moebius_to_disk(
                    _parse_complex(spec.get("a", 1j)),
                    _parse_complex(spec.get("scale", 1.0)),
                    _parse_complex(spec.get("shift", 0.0)),
                )
            if kind == "affine":
                return cls.affine(_parse_complex(spec["k"]), _parse_complex(spec["b"]))
            a = spec["a"]
            if isinstance(a, bool) or not isinstance(a, (int, float)):
                raise SymbolError("cayley-exp parameter must be real")
            return cls.cayley_exp(a)
        except KeyError as exc:
            raise SymbolError(f"missing key {exc} for {kind}") from None

    def to_json(self) -> dict:
        if self.kind == "custom":
            raise SymbolError("custom symbols carry closures and cannot be serialized")
        return {"kind": self.kind, **self.coefficients}

    # checks --------------------------------------------------------------

    def validate_derivatives(self, order: int, *, probes: int = 10, seed: int = 0, rtol: float = 1e-6) -> float:
        """Compare ``psi^(k)`` with a central difference of ``psi^(k-1)``.

        Returns the worst relative discrepancy and raises :class:`SymbolError`
        above ``rtol``.
        """
        rng = np.random.default_rng(seed)
        z = rng.uniform(-3, 3, probes) + 1j * rng.uniform(0.5, 3, probes)
        worst = 0.0
        for k in range(1, order + 1):
            ref = self.d(z, k)
            for step in (1e-4, 1e-4j):
                # the real and imaginary directions must agree for a holomorphic closure
                fd = (self.d(z + step, k - 1) - self.d(z - step, k - 1)) / (2 * step)
                scale = np.maximum(np.abs(ref), 1.0)
                worst = max(worst, float(np.max(np.abs(fd - ref) / scale)))
        if worst > rtol:
            raise SymbolError(f"derivative closures disagree with finite differences ({worst:.2e})")
        return worst

    def structurally_bounded(self) -> Optional[bool]:
        """Bounded on the closed upper half plane with all derivatives, from the formula alone.

        ``None`` means no structural verdict (custom symbols).
        """
        if self.kind == "constant":
            return True
        if self.kind in ("rational", "moebius-to-disk"):
            num = Polynomial([_parse_complex(c) for c in self.coefficients["numerator"]]).trim() if "numerator" in self.coefficients else None
            if num is None:
                return all(p.imag < -1e-12 for p in self.poles)
            den_deg = len(self.poles)
            return num.degree() <= den_deg and all(p.imag < -1e-12 for p in self.poles)
        if self.kind == "affine":
            return complex(self.coefficients["k"][0], self.coefficients["k"][1]) == 0
        if self.kind == "cayley-exp":
            return self.coefficients["a"] >= 0
        return None

    def lattice_sup(self, order: int = 0, lattice: Optional[np.ndarray] = None) -> float:
        lat = upper_lattice() if lattice is None else lattice
        pts = np.concatenate([lat.ravel(), lat[0].real.astype(complex)])
        return float(max(np.max(np.abs(self.d(pts, k))) for k in range(order + 1)))

    def require_bounded(self, order: int) -> None:
        """Raise :class:`SymbolError` for symbols that cannot be multipliers."""
        verdict = self.structurally_bounded()
        if verdict is False:
            raise SymbolError(f"{self.kind} symbol is unbounded on the upper half plane")
        sup = self.lattice_sup(order)
        if not np.isfinite(sup) or sup > 1e12:
            raise SymbolError("symbol or a derivative is unbounded on the probe lattice")

    def reciprocal(self) -> "AnalyticSymbol":
        if self.kind == "constant":
            c = _parse_complex(self.coefficients["c"])
            if c == 0:
                raise SymbolError("zero has no reciprocal")
            return AnalyticSymbol.constant(1.0 / c)
        if self.kind in ("rational", "moebius-to-disk"):
            num = Polynomial([_parse_complex(c) for c in self.coefficients.get("numerator", [])]) if "numerator" in self.coefficients else None
            if num is None:
                a = _parse_complex(self.coefficients["a"])
                s = _parse_complex(self.coefficients["scale"])
                t = _parse_complex(self.coefficients["shift"])
                ab = a.conjugate()
                num = Polynomial([-s * a - t * ab, s + t])
                den = Polynomial([-ab, 1.0])
            else:
                den = Polynomial([_parse_complex(c) for c in self.coefficients["denominator"]])
            return AnalyticSymbol.rational(den.coef, num.coef)
        raise SymbolError(f"no closed-form reciprocal for {self.kind} symbols")


# --------------------------------------------------------------------------
# Galerkin basis
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GalerkinOperator:
    """Galerkin data in the orthonormal basis ``e_0 .. e_{M-1}`` of ``H_n^2``.

    Attributes
    ----------
    n, M : int
    coefficients : ndarray
        ``e_j = sum_m coefficients[m, j] l_m`` with ``l_m`` the signed
        Laguerre family described in the module docstring.
    gram : ndarray
        Exact Gram matrix of ``l_0 .. l_{M-1}``.
    matrix : ndarray or None
        ``matrix[i, j] = <T e_j, e_i>`` once assembled.
    flags : dict
        Multiplier heuristics and quadrature diagnostics.
    """

    n: int
    M: int
    coefficients: np.ndarray = field(repr=False)
    gram: np.ndarray = field(repr=False)
    matrix: Optional[np.ndarray] = field(default=None, repr=False)
    flags: dict = field(default_factory=dict, compare=False)

    @property
    def condition(self) -> float:
        return float(np.linalg.cond(self.gram))


def _laguerre_gram(n: int, M: int) -> np.ndarray:
    # with s = 2t, int t^{2k} l_a l_b dt = (J^{2k})_{ab} / 2^{2k+1}, where J is the
    # Jacobi matrix of multiplication by s on the signed Laguerre family
    S = M + 2 * n + 2
    J = np.zeros((S, S))
    m = np.arange(S)
    J[m, m] = 2 * m + 1
    J[m[:-1], m[:-1] + 1] = m[:-1] + 1
    J[m[:-1] + 1, m[:-1]] = m[:-1] + 1
    G = np.zeros((M, M))
    P = np.eye(S)
    for k in range(n + 1):
        G += 2 * np.pi / 2 ** (2 * k + 1) * P[:M, :M]
        P = P @ J @ J
    return G


def build_onb(n: int, M: int) -> GalerkinOperator:
    """Orthonormal basis of the first ``M`` Laguerre-type functions in ``L_n^2``.

    Raises
    ------
    ValueError
        If ``M > 48``, ``n > 4``, or the Gram matrix is too ill conditioned.

    Examples
    --------
    For ``n = 0, M = 1`` the basis function is ``e^{-t} / sqrt(pi)``.
    """
    if not (1 <= M <= MAX_DIMENSION):
        raise ValueError(f"Galerkin dimension must lie in 1..{MAX_DIMENSION}")
    if not (0 <= n <= MAX_ORDER):
        raise ValueError(f"order must lie in 0..{MAX_ORDER}")
    G = _laguerre_gram(n, M)
    cond = np.linalg.cond(G)
    if cond > COND_LIMIT:
        raise ValueError(f"Gram condition number {cond:.2e} exceeds {COND_LIMIT:.0e}")
    R = np.linalg.cholesky(G).T
    C = np.linalg.solve(R, np.eye(M))
    return GalerkinOperator(n, M, C, G)


def _family_traces(M: int, n: int, z: np.ndarray) -> np.ndarray:
    """``d^k/dz^k`` of ``(-1)^m i (z - i)^m / (z + i)^(m+1)``, shape ``(n+1, M, len(z))``."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros((n + 1, M, z.size), dtype=complex)
    zm, zp = z - 1j, z + 1j
    for m in range(M):
        for k in range(n + 1):
            s = np.zeros(z.size, dtype=complex)
            for j in range(min(k, m) + 1):
                falling = math.perm(m, j)
                r = m + 1
                # d^{k-j} (z+i)^{-r} = (-1)^{k-j} r (r+1) ... (r+k-j-1) (z+i)^{-r-k+j}
                rising = (-1) ** (k - j) * math.prod(range(r, r + k - j))
                s += math.comb(k, j) * falling * rising * zm ** (m - j) * zp ** (-r - (k - j))
            out[k, m] = (-1) ** m * 1j * s
    return out


def basis_values(op: GalerkinOperator, z, k: int = 0) -> np.ndarray:
    """``e_j^(k)(z)`` for every basis index ``j``; shape ``(M, len(z))``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    T = _family_traces(op.M, k, z)[k]
    return op.coefficients.T @ T


def basis_spectrum(op: GalerkinOperator, j: int, grid: HalfLineGrid) -> SpectrumSample:
    """Half-line spectrum of ``e_j`` sampled on ``grid``."""
    C = op.coefficients[:, j]

    def f(t, C=C):
        t = np.asarray(t, dtype=float)
        return sum(C[m] * (-1) ** m * eval_laguerre(m, 2 * t) for m in range(op.M)) * np.exp(-t)

    return SpectrumSample(grid, f(grid.nodes), op.n, 2.0, f)


def _cayley_rule(K: int) -> tuple[np.ndarray, np.ndarray]:
    # x = tan(theta/2): trapezoid in theta integrates rational data with spectral accuracy
    th = -np.pi + (np.arange(K) + 0.5) * 2 * np.pi / K
    x = np.tan(th / 2)
    w = (2 * np.pi / K) * (1 + x * x) / 2
    return x, w


_PROBES = np.array([1j, 2j, 1 + 1j, -1 + 1j, 5j])


def assemble_multiplication(psi: AnalyticSymbol, basis: GalerkinOperator, *, quad_K: int = QUAD_K) -> GalerkinOperator:
    """Galerkin matrix ``<psi e_j, e_i>`` in the boundary ``W_n^2`` inner product.

    Boundary traces are paired with the trapezoid rule after the Cayley
    substitution ``x = tan(theta/2)``, which is exact up to rounding for
    rational data of degree below ``quad_K``.

    Raises
    ------
    SymbolError
        If ``psi`` is unbounded (it cannot be a multiplier).
    """
    n, M = basis.n, basis.M
    psi.require_bounded(n)
    x, w = _cayley_rule(quad_K)
    E = np.einsum("kmq,mj->kjq", _family_traces(M, n, x), basis.coefficients)
    dpsi = [psi.d(x, k) for k in range(n + 1)]
    A = np.zeros((M, M), dtype=complex)
    worst = 0.0
    pk = _PROBES.conj()
    for k in range(n + 1):
        PE = sum(math.comb(k, l) * dpsi[k - l][None, :] * E[l] for l in range(k + 1))
        A += np.einsum("jq,iq,q->ij", PE, E[k].conj(), w)
        # upper Hardy data are annihilated by the Cauchy kernel of the lower half plane
        kern = 1.0 / (x[None, :] - pk[:, None])
        lhs = np.abs((PE[:, None, :] * kern[None, :, :] * w).sum(axis=2))
        norms = np.sqrt((np.abs(PE) ** 2 * w).sum(axis=1))[:, None] * np.sqrt(np.pi / _PROBES.imag)[None, :]
        with np.errstate(invalid="ignore", divide="ignore"):
            r = np.where(norms > 0, lhs / norms, 0.0)
        worst = max(worst, float(r.max()))
    flags = {"hardy_residual": worst, "multiplier_plausible": worst <= 1e-2, "quad_K": quad_K}
    return GalerkinOperator(n, M, basis.coefficients, basis.gram, A, flags)


# --------------------------------------------------------------------------
# spectra
# --------------------------------------------------------------------------


def _range_samples(psi: AnalyticSymbol, count: int) -> np.ndarray:
    # pull back a polar disk grid through the Cayley map so the samples spread over
    # the whole half plane, then add boundary and far-field points
    rings = max(4, int(math.sqrt(count / 2)))
    r = np.sqrt(np.linspace(0.0, 1.0, rings, endpoint=False))
    th = np.linspace(0, 2 * np.pi, 2 * rings, endpoint=False)
    wdisk = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    z = 1j * (1 + wdisk) / (1 - wdisk)
    xb = np.tan(np.linspace(-np.pi / 2, np.pi / 2, 2 * rings + 2)[1:-1])
    far = 1j * np.logspace(3, 8, 6)
    pts = np.concatenate([z, xb.astype(complex), far, (upper_lattice().ravel())])
    vals = psi(pts)
    return vals[np.isfinite(vals)]


@dataclass(frozen=True)
class SpectrumRecord:
    eigenvalues: np.ndarray
    range_samples: np.ndarray = field(repr=False)
    range_hull_distance: float
    inclusion_pass: bool
    eps: float
    delta: float

    def cloud_rows(self) -> list[tuple[float, float, str]]:
        rows = [(float(v.real), float(v.imag), "eig") for v in self.eigenvalues]
        rows += [(float(v.real), float(v.imag), "range") for v in self.range_samples]
        return rows


def spectrum_check(
    op: GalerkinOperator,
    psi: AnalyticSymbol,
    range_probe_count: int = 4096,
    *,
    eps: float = 0.15,
    delta: float = 0.05,
) -> SpectrumRecord:
    """Eigenvalues of the Galerkin matrix against the sampled range of ``psi``.

    ``range_hull_distance`` is the largest distance from an eigenvalue to
    the sampled range; the check passes when it is at most ``eps + delta``.
    """
    if op.matrix is None:
        raise ValueError("operator has not been assembled")
    try:
        ev = np.linalg.eigvals(op.matrix)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigenvalue solve did not converge: {exc}") from exc
    rng = _range_samples(psi, range_probe_count)
    d = np.min(np.abs(ev[:, None] - rng[None, :]), axis=1)
    worst = float(d.max()) if d.size else 0.0
    return SpectrumRecord(ev, rng, worst, worst <= eps + delta, eps, delta)


def adjoint_eigen_residual(op: GalerkinOperator, psi: AnalyticSymbol, z: complex) -> float:
    """``|A^H v_z - conj(psi(z)) v_z| / |v_z|`` with ``(v_z)_i = conj(e_i(z))``.

    Raises
    ------
    ValueError
        If ``Im z <= 0`` or ``|v_z| < 1e-12``.
    """
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("point must lie in the upper half plane")
    if op.matrix is None:
        raise ValueError("operator has not been assembled")
    v = basis_values(op, [z])[:, 0].conj()
    nv = np.linalg.norm(v)
    if nv < 1e-12:
        raise ValueError(f"kernel vector at {z} vanishes in this basis")
    r = op.matrix.conj().T @ v - np.conj(psi(z)) * v
    return float(np.linalg.norm(r) / nv)


@dataclass(frozen=True)
class InvertibilityRecord:
    inf_abs: float
    invertible_claim: bool
    roundtrip_error: Optional[float] = None
    roundtrip_pass: Optional[bool] = None
    inverse_multiplier_plausible: Optional[bool] = None


def invertibility_check(psi: AnalyticSymbol, delta_probe: float = 1e-3, *, n: int = 1, M: int = 16) -> InvertibilityRecord:
    """Infimum of ``|psi|`` on the lattice and, when positive, the ``A B = I`` round trip."""
    lat = upper_lattice()
    extra = np.array([1j, 2j, 1 + 1j, -1 + 1j])
    pts = np.concatenate([lat.ravel(), lat[0].real.astype(complex), extra, 1j * np.logspace(4, 8, 5)])
    inf_abs = float(np.min(np.abs(psi(pts))))
    claim = inf_abs > delta_probe
    if not claim:
        return InvertibilityRecord(inf_abs, False)
    basis = build_onb(n, M)
    A = assemble_multiplication(psi, basis)
    B = assemble_multiplication(psi.reciprocal(), basis)
    err = float(np.linalg.norm(A.matrix @ B.matrix - np.eye(M), 2))
    ok = bool(B.flags["multiplier_plausible"])
    return InvertibilityRecord(inf_abs, True, err, err <= 0.1 and ok, ok)


@dataclass(frozen=True)
class CompactnessRecord:
    dimensions: tuple
    max_abs_eigenvalue: tuple
    range_max_modulus: float
    passed: bool


def compactness_profile(psi: AnalyticSymbol, n: int = 1, dims: Sequence[int] = (8, 16, 24, 32)) -> CompactnessRecord:
    """Largest eigenvalue modulus of the truncations against half the range's sup."""
    peaks = []
    for M in dims:
        op = assemble_multiplication(psi, build_onb(n, M))
        peaks.append(float(np.max(np.abs(np.linalg.eigvals(op.matrix)))))
    top = float(np.max(np.abs(_range_samples(psi, 2048))))
    return CompactnessRecord(tuple(dims), tuple(peaks), top, all(v >= 0.5 * top for v in peaks))


# --------------------------------------------------------------------------
# composition operators
# --------------------------------------------------------------------------


def _self_map_check(phi: AnalyticSymbol, lattice: np.ndarray) -> np.ndarray:
    img = phi(lattice)
    bad = ~(np.isfinite(img) & (img.imag > 0))
    if np.any(bad):
        z0 = lattice.ravel()[np.flatnonzero(bad.ravel())[0]]
        raise SelfMapError(f"symbol is not a self-map of the upper half plane: phi({z0}) = {phi(z0)}")
    return img


@dataclass(frozen=True)
class CriterionARecord:
    inf_A: float
    derivative_sup: tuple
    derivatives_bounded: bool
    passed: bool


def composition_criterion_A(phi: AnalyticSymbol, n: int = 1, delta: float = 1e-3, lattice: Optional[np.ndarray] = None) -> CriterionARecord:
    """Lower bound of ``|Re phi'(z) + i Im phi'(w)|`` over lattice pairs.

    For a pair the modulus is ``sqrt((Re phi'(z))^2 + (Im phi'(w))^2)``, so
    the infimum over pairs separates into two one-point minima.

    Raises
    ------
    SelfMapError
        If ``phi`` leaves the upper half plane on the lattice.
    """
    lat = upper_lattice() if lattice is None else lattice
    _self_map_check(phi, lat)
    d1 = phi.d(lat, 1)
    inf_A = float(math.sqrt(np.min(d1.real**2) + np.min(d1.imag**2)))
    sups = tuple(float(np.max(np.abs(phi.d(lat, k)))) for k in range(1, max(n, 1) + 1))
    bounded = all(np.isfinite(s) and s < 1e8 for s in sups[: max(n - 1, 0) + 1])
    return CriterionARecord(inf_A, sups, bounded, inf_A > delta and bounded)


@dataclass(frozen=True)
class AngularRecord:
    row_heights: tuple
    row_ratios: tuple
    sup_ratio: float
    passed: bool


def composition_criterion_angular(phi: AnalyticSymbol, lattice: Optional[np.ndarray] = None) -> AngularRecord:
    """``sup Im z / Im phi(z)`` row by row, rows up to ``Im z = 10^4``.

    Passes when the last two row maxima differ by at most 5 percent.
    """
    lat = upper_lattice() if lattice is None else lattice
    img = _self_map_check(phi, lat)
    ratios = np.max(lat.imag / img.imag, axis=1)
    last, prev = ratios[-1], ratios[-2]
    converged = bool(np.isfinite(last) and abs(last - prev) <= 0.05 * abs(last))
    return AngularRecord(tuple(lat[:, 0].imag.tolist()), tuple(ratios.tolist()), float(ratios.max()), converged)


def _bell_chain(outer: Sequence[np.ndarray], inner: Sequence[np.ndarray], n: int) -> list[np.ndarray]:
    """``d^k/dx^k F(phi(x))`` for ``k <= n`` from ``F^(m)(phi)`` and ``phi^(i)``.

    Uses ``B_{k,m} = sum_i C(k-1, i-1) phi^(i) B_{k-i, m-1}``.
    """
    B = {(0, 0): np.ones_like(inner[0])}
    out = [outer[0]]
    for k in range(1, n + 1):
        B[(k, 0)] = np.zeros_like(inner[0])
        for m in range(1, k + 1):
            acc = np.zeros_like(inner[0])
            for i in range(1, k - m + 2):
                prev = B.get((k - i, m - 1))
                if prev is not None:
                    acc = acc + math.comb(k - 1, i - 1) * inner[i] * prev
            B[(k, m)] = acc
        out.append(sum(outer[m] * B[(k, m)] for m in range(1, k + 1)))
    return out


@dataclass(frozen=True)
class CompositionResult:
    image: HardySobolevElement
    empirical_norm_ratio: float
    ratio_defined: bool
    criteria: dict


def weighted_composition_apply(
    psi: AnalyticSymbol,
    phi: AnalyticSymbol,
    F: HardySobolevElement,
    n: Optional[int] = None,
    p: Optional[float] = None,
) -> CompositionResult:
    """Boundary stack of ``psi (F o phi)`` and its norm ratio.

    ``F^(m)(phi(x))`` comes from the Cauchy integral of stack level ``m``;
    where ``phi(x)`` lies within ``2h`` of the real axis the stack itself is
    interpolated instead. Derivatives follow from the chain rule (Bell
    polynomials) and the Leibniz rule with the symbol closures.

    Raises
    ------
    ValueError
        If neither composition criterion passes.
    """
    n = F.n if n is None else n
    p = F.p if p is None else p
    crit_a = composition_criterion_A(phi, n)
    crit_b = composition_criterion_angular(phi)
    if not (crit_a.passed or crit_b.passed):
        raise ValueError("neither composition criterion passes; no boundedness warrant")
    b = F._require_boundary()
    grid = b.grid
    x = grid.nodes
    w = phi(x.astype(complex))
    near = w.imag < 2 * grid.h
    outer = []
    for m in range(n + 1):
        vals = np.empty(x.size, dtype=complex)
        if np.any(~near):
            vals[~near] = cauchy_eval_many(F, w[~near], level=m)
        if np.any(near):
            lev = b.stack[m]
            xr = w[near].real
            vals[near] = np.interp(xr, x, lev.real) + 1j * np.interp(xr, x, lev.imag)
        outer.append(vals)
    inner = [phi.d(x, k) for k in range(n + 1)]
    comp = _bell_chain(outer, inner, n)
    dpsi = [psi.d(x, k) for k in range(n + 1)]
    stack = [sum(math.comb(k, j) * dpsi[k - j] * comp[j] for j in range(k + 1)) for k in range(n + 1)]
    image = HardySobolevElement.from_boundary(BoundarySample(grid, tuple(stack), p), check=False)
    src = hs_norm(F)
    img = hs_norm(image)
    defined = src > 0
    ratio = img / src if defined else float("nan")
    crit = {"criterion_A": crit_a.passed, "criterion_angular": crit_b.passed}
    return CompositionResult(image, ratio, defined, crit)


@dataclass(frozen=True)
class PSDRecord:
    min_eig: float
    trace: float
    passed: bool


def psd_kernel_check(
    psi: AnalyticSymbol,
    phi: AnalyticSymbol,
    n: int,
    Mc: float,
    points: Sequence[complex],
    *,
    hermitian_tol: float = 1e-9,
) -> PSDRecord:
    """Positivity of ``Mc^2 K_n(z_i, z_j) - conj(psi(z_i)) psi(z_j) K_n(phi(z_i), phi(z_j))``.

    Passes when the smallest eigenvalue is at least ``-1e-8`` times the
    total diagonal mass of both terms.

    Raises
    ------
    ArithmeticError
        If the assembled matrix is not Hermitian to ``hermitian_tol``.
    """
    if Mc < 0:
        raise ValueError("bound candidate must be nonnegative")
    pts = np.array([complex(z) for z in points])
    if np.any(pts.imag <= 0):
        raise ValueError("points must lie in the upper half plane")
    img = _self_map_check(phi, pts)
    ps = psi(pts)
    m = len(pts)
    K = np.empty((m, m), dtype=complex)
    Kphi = np.empty((m, m), dtype=complex)
    for i in range(m):
        hz = KernelHandle(n, pts[i])
        hp = KernelHandle(n, img[i])
        for j in range(m):
            K[i, j] = kernel_eval(hz, pts[j])
            Kphi[i, j] = kernel_eval(hp, img[j])
    second = np.conj(ps)[:, None] * ps[None, :] * Kphi
    A = Mc**2 * K - second
    scale = float(np.sum(np.abs(np.diag(Mc**2 * K))) + np.sum(np.abs(np.diag(second))))
    if np.max(np.abs(A - A.conj().T)) > hermitian_tol * max(scale, 1.0):
        raise ArithmeticError("kernel matrix is not Hermitian; quadrature fault")
    H = 0.5 * (A + A.conj().T)
    lo = float(np.linalg.eigvalsh(H).min())
    return PSDRecord(lo, scale, lo >= -1e-8 * scale)
