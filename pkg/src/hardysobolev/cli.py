"""Command-line entry point ``hardysobolev``.

Subcommands: ``verify``, ``decompose``, ``spectrum``, ``kernel``, ``gallery``.
Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage
or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

SCHEMA_VERSION = 1
MIN_GRID_N = 1024
SUITES = ("all", "boundary", "pw", "kernel", "algebra", "spectrum", "composition")


class ConfigError(ValueError):
    """Invalid configuration; maps to exit code 2."""


@dataclass
class RunConfig:
    """Every tunable of a run, with defaults in one place."""

    command: str = "verify"
    grid_L: float = 200.0
    grid_N: int = 2**16
    quad_M: int = 128
    scheme: str = "gauss-laguerre"
    galerkin_M: int = 16
    order: Optional[int] = None
    p: float = 2.0
    tol: float = 1e-3
    out: Optional[str] = None
    format: str = "json"
    suite: str = "all"
    input: Optional[str] = None
    symbol: Optional[str] = None
    z: Optional[str] = None
    w: Optional[str] = None
    case: Optional[str] = None

    def validate(self) -> "RunConfig":
        if not (math.isfinite(self.grid_L) and self.grid_L > 0):
            raise ConfigError("grid-L must be positive")
        if self.grid_N < MIN_GRID_N or self.grid_N % 2:
            raise ConfigError(f"grid-N must be an even integer >= {MIN_GRID_N} (got {self.grid_N})")
        if not (4 <= self.quad_M <= 180):
            raise ConfigError("quad-M must lie in 4..180")
        if self.scheme not in ("gauss-laguerre", "exp-graded"):
            raise ConfigError(f"unknown quadrature scheme {self.scheme!r}")
        if self.order is not None and not (0 <= self.order <= 4):
            raise ConfigError("order must lie in 0..4")
        if not (self.p >= 1.0):
            raise ConfigError("p must be >= 1")
        if not (self.tol > 0):
            raise ConfigError("tol must be positive")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}")
        if not (1 <= self.galerkin_M <= 48):
            raise ConfigError("galerkin-M must lie in 1..48 (conditioning cap)")
        return self


_FIELDS = {f.name for f in dataclasses.fields(RunConfig)}


def load_config_file(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    keys = {k.replace("-", "_") for k in data}
    unknown = keys - _FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return {k.replace("-", "_"): v for k, v in data.items()}


# --------------------------------------------------------------------------
# output helpers
# --------------------------------------------------------------------------


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return f if math.isfinite(f) else None
    if isinstance(v, (complex, np.complexfloating)):
        return [_jsonable(v.real), _jsonable(v.imag)]
    return v


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _write(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def record(tag: str, inputs: dict, measured, target, passed: bool) -> dict:
    return {"theorem_tag": tag, "inputs": inputs, "measured": measured, "bound_or_target": target, "pass": bool(passed)}


# --------------------------------------------------------------------------
# verification suites
# --------------------------------------------------------------------------


def _halfline(cfg: RunConfig):
    from .numerics import make_halfline_grid

    return make_halfline_grid(cfg.scheme, cfg.quad_M if cfg.scheme == "gauss-laguerre" else 2 * cfg.quad_M)


def _suite_pw(cfg: RunConfig) -> list[dict]:
    from .hilbert_model import holomorphic_fourier, pw_isometry_check
    from .numerics import RealGrid
    from .weighted_halfline import sample_spectrum

    grid = RealGrid(cfg.grid_L, cfg.grid_N)
    hl = _halfline(cfg)
    out = []
    for n in ([cfg.order] if cfg.order is not None else [0, 1, 2]):
        f = sample_spectrum(lambda t: np.exp(-t), hl, n)
        r = pw_isometry_check(f, n, grid)
        out.append(record("paley-wiener-isometry", {"f": "exp(-t)", "n": n}, r.rel_gap, cfg.tol, r.rel_gap <= cfg.tol))
    f = sample_spectrum(lambda t: np.exp(-t), hl, 0)
    for z, exact in ((1j, 0.5), (1 + 1j, (2 + 1j) / 5)):
        v = holomorphic_fourier(f, z)
        out.append(record("holomorphic-fourier", {"f": "exp(-t)", "z": z}, abs(v - exact), 1e-8, abs(v - exact) <= 1e-8))
    return out


def _suite_boundary(cfg: RunConfig) -> list[dict]:
    from .boundary import plemelj_split, sample_boundary
    from .hardy_sobolev import HardySobolevElement, embedding_check, hs_norm
    from .numerics import RealGrid

    grid = RealGrid(cfg.grid_L, cfg.grid_N)
    n = 1 if cfg.order is None else cfg.order
    out = []
    if cfg.p == 2.0:
        funcs = [lambda x, k=k: (-1) ** k * math.factorial(k + 1) / (x + 1j) ** (k + 2) for k in range(n + 1)]
        F = HardySobolevElement.from_boundary(sample_boundary(funcs, grid, 2.0))
        exact = math.sqrt(sum(_beta_factor(k) for k in range(n + 1)))
        v = hs_norm(F)
        gap = abs(v - exact) / exact
        out.append(record("boundary-isometry", {"F": "1/(x+i)^2", "n": n}, gap, cfg.tol, gap <= cfg.tol))
    if 1.0 < cfg.p < math.inf:
        funcs = [lambda x: 1 / (1 + x * x), lambda x: -2 * x / (1 + x * x) ** 2]
        res = plemelj_split(sample_boundary(funcs[: min(n, 1) + 1], grid, cfg.p))
        worst = max(res.hardy_residual_plus, res.hardy_residual_minus)
        out.append(record("plemelj-reconstruction", {"f": "1/(1+x^2)", "p": cfg.p}, res.reconstruction_error, 1e-10, res.reconstruction_error <= 1e-10))
        out.append(record("plemelj-hardy-residual", {"f": "1/(1+x^2)", "p": cfg.p}, worst, cfg.tol, worst <= cfg.tol))
    if n >= 1:
        funcs = [lambda x, k=k: (-1) ** k * math.factorial(k + 1) / (x + 1j) ** (k + 2) for k in range(n + 1)]
        F = HardySobolevElement.from_boundary(sample_boundary(funcs, grid, cfg.p))
        e = embedding_check(F)
        out.append(record("sobolev-embedding", {"F": "1/(x+i)^2", "n": n, "p": cfg.p}, e.sup_val, e.bound, e.passed))
    return out


def _beta_factor(k: int) -> float:
    # int |d^k (x+i)^-2|^2 dx = ((k+1)!)^2 * int (1+x^2)^-(k+2) dx
    m = k + 2
    integral = math.pi * math.comb(2 * m - 2, m - 1) / 4 ** (m - 1)
    return math.factorial(k + 1) ** 2 * integral


def _suite_kernel(cfg: RunConfig) -> list[dict]:
    from .hardy_sobolev import HardySobolevElement
    from .hilbert_model import KERNEL_PROBES, KernelHandle, kernel_eval, kernel_gram, kernel_norm_bound, kernel_reproduce_check
    from .weighted_halfline import sample_spectrum

    n = 1 if cfg.order is None else cfg.order
    out = []
    if n >= 1:
        for r in kernel_norm_bound(n):
            out.append(record("kernel-norm-bound", {"n": n, "z": r.z}, r.diag, 0.25, r.passed))
    else:
        worst = 0.0
        for z in KERNEL_PROBES:
            for w in KERNEL_PROBES[::4]:
                exact = 1j / (2 * math.pi * (w - np.conj(z)))
                worst = max(worst, abs(kernel_eval(KernelHandle(0, z), w) - exact) / abs(exact))
        out.append(record("kernel-closed-form", {"n": 0}, worst, 1e-8, worst <= 1e-8))
    hl = _halfline(cfg)
    for z in (1j, 2j, 1 + 1j):
        F = HardySobolevElement.from_spectrum(sample_spectrum(lambda t: np.exp(-t), hl, n))
        r = kernel_reproduce_check(F, KernelHandle(n, z))
        out.append(record("kernel-reproduction", {"f": "exp(-t)", "n": n, "z": z}, r.rel_gap, 1e-6, r.rel_gap <= 1e-6))
    pts = [1j, 2 + 1j, -1 + 0.5j, 3j, 0.2 + 0.1j]
    G = kernel_gram(n, pts)
    herm = float(np.max(np.abs(G - G.conj().T)))
    lo = float(np.linalg.eigvalsh(0.5 * (G + G.conj().T)).min())
    out.append(record("kernel-hermitian", {"n": n}, herm, 1e-10, herm <= 1e-10))
    out.append(record("kernel-gram-psd", {"n": n}, lo, -1e-8, lo >= -1e-8))
    return out


def _suite_algebra(cfg: RunConfig) -> list[dict]:
    from .boundary import sample_boundary
    from .hardy_sobolev import AlgebraError, HardySobolevElement, product
    from .hilbert_model import hilbert_product_bounds
    from .numerics import RealGrid
    from .weighted_halfline import sample_spectrum

    grid = RealGrid(cfg.grid_L, cfg.grid_N)
    n = 1 if cfg.order is None else cfg.order
    out = []
    if n == 0:
        f0 = sample_boundary([lambda x: 1 / (x + 1j) ** 2], grid, cfg.p)
        try:
            product(HardySobolevElement.from_boundary(f0), HardySobolevElement.from_boundary(f0))
            refused = False
        except AlgebraError:
            refused = True
        return [record("algebra-n0-refused", {"n": 0}, refused, True, refused)]
    from .gallery import boundary_gallery

    elems = boundary_gallery(grid, n, cfg.p)
    names = list(elems)
    for i, a in enumerate(names):
        for b in names[i:]:
            _, chk = product(elems[a], elems[b])
            out.append(record("generalized-banach-algebra", {"F": a, "G": b, "n": n, "p": cfg.p}, chk.lhs, chk.rhs, chk.passed))
    if cfg.p == 2.0:
        hl = _halfline(cfg)
        F = HardySobolevElement.from_spectrum(sample_spectrum(lambda t: np.exp(-t), hl, n))
        r = hilbert_product_bounds(F, F, n, grid)
        out.append(record("hilbert-half-bound", {"f": "exp(-t)", "n": n}, r.fg_h2, r.half_bound, r.pair_bound_pass))
        out.append(record("hilbert-sharp-bound", {"f": "exp(-t)", "n": n}, r.fg_hn2_sq, r.sharp_bound, r.sharp_pass))
    return out


def _suite_spectrum(cfg: RunConfig) -> list[dict]:
    from .operator_lab import (
        AnalyticSymbol,
        adjoint_eigen_residual,
        assemble_multiplication,
        build_onb,
        invertibility_check,
        spectrum_check,
    )

    n = 1 if cfg.order is None else cfg.order
    M = cfg.galerkin_M
    out = []
    mob = AnalyticSymbol.moebius_to_disk()
    op = assemble_multiplication(mob, build_onb(n, M))
    ev = np.linalg.eigvals(op.matrix)
    peak = float(np.max(np.abs(ev)))
    out.append(record("spectrum-inclusion", {"symbol": "moebius-to-disk", "n": n, "M": M}, peak, 1.05, peak <= 1.05))
    res = [adjoint_eigen_residual(assemble_multiplication(mob, build_onb(n, m)), mob, 1j) for m in (8, 16, 24, 32)]
    mono = all(b <= a * (1 + 1e-9) + 1e-14 for a, b in zip(res, res[1:]))
    out.append(record("adjoint-eigen-residual", {"symbol": "moebius-to-disk", "z": 1j, "M": [8, 16, 24, 32]}, res, 0.05, res[1] <= 0.05 and mono))
    c = AnalyticSymbol.constant(3 + 4j)
    sc = spectrum_check(assemble_multiplication(c, build_onb(n, M)), c)
    err = float(np.max(np.abs(sc.eigenvalues - (3 + 4j))))
    out.append(record("spectrum-constant", {"c": 3 + 4j}, err, 1e-8, err <= 1e-8))
    inv = invertibility_check(AnalyticSymbol.moebius_to_disk(shift=2.0), n=n, M=M)
    out.append(record("invertibility-roundtrip", {"symbol": "2+(z-i)/(z+i)"}, inv.roundtrip_error, 0.1, bool(inv.roundtrip_pass)))
    return out


def _suite_composition(cfg: RunConfig) -> list[dict]:
    from .operator_lab import AnalyticSymbol, composition_criterion_A, composition_criterion_angular, psd_kernel_check

    n = 1 if cfg.order is None else cfg.order
    phi = AnalyticSymbol.affine(2, 1j)
    a = composition_criterion_A(phi, n)
    b = composition_criterion_angular(phi)
    out = [
        record("composition-criterion-A", {"phi": "2z+i"}, a.inf_A, 2.0, a.passed and abs(a.inf_A - 2) < 1e-12),
        record("composition-angular", {"phi": "2z+i"}, b.row_ratios[-1], 0.5, b.passed and abs(b.row_ratios[-1] - 0.5) <= 0.025),
    ]
    bounded = AnalyticSymbol.moebius_to_disk(scale=1j, shift=1j)
    c = composition_criterion_angular(bounded)
    out.append(record("composition-angular-bounded-image", {"phi": "i(1+(z-i)/(z+i))"}, c.sup_ratio, "fail expected", not c.passed))
    one, ident = AnalyticSymbol.constant(1), AnalyticSymbol.affine(1, 0)
    pts = [1j, 2 + 1j, 0.5j]
    for Mc, expect in ((1.0, True), (0.5, False)):
        r = psd_kernel_check(one, ident, max(n, 0), Mc, pts)
        out.append(record("psd-kernel", {"psi": "1", "phi": "z", "Mc": Mc}, r.min_eig, "pass" if expect else "fail", r.passed == expect))
    return out


_SUITES: dict[str, Callable[[RunConfig], list[dict]]] = {
    "boundary": _suite_boundary,
    "pw": _suite_pw,
    "kernel": _suite_kernel,
    "algebra": _suite_algebra,
    "spectrum": _suite_spectrum,
    "composition": _suite_composition,
}


def cmd_verify(cfg: RunConfig) -> int:
    names = list(_SUITES) if cfg.suite == "all" else [cfg.suite]
    records = []
    for name in names:
        for r in _SUITES[name](cfg):
            r["suite"] = name
            records.append(r)
    ok = all(r["pass"] for r in records)
    if cfg.format == "json":
        text = dumps({"schema_version": SCHEMA_VERSION, "command": "verify", "suite": cfg.suite, "all_pass": ok, "records": records})
    else:
        rows = [(r["suite"], r["theorem_tag"], json.dumps(_jsonable(r["measured"])), json.dumps(_jsonable(r["bound_or_target"])), r["pass"]) for r in records]
        text = _csv_text(["suite", "theorem_tag", "measured", "bound_or_target", "pass"], rows)
    _write(text, cfg.out)
    return 0 if ok else 1


# --------------------------------------------------------------------------
# decompose
# --------------------------------------------------------------------------


def read_signal_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Read ``x, Re, Im`` rows; a non-numeric first row is taken as a header."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if rows:
        try:
            [float(c) for c in rows[0]]
        except ValueError:
            rows = rows[1:]
    if len(rows) < 4:
        raise ConfigError("signal file needs at least four rows")
    try:
        data = np.array([[float(c) for c in r] for r in rows])
    except ValueError as exc:
        raise ConfigError(f"malformed number in {path}: {exc}") from None
    if data.ndim != 2 or data.shape[1] != 3:
        raise ConfigError("each row must hold exactly three columns: x, Re, Im")
    if not np.all(np.isfinite(data)):
        raise ConfigError("signal file contains non-finite values")
    return data[:, 0], data[:, 1] + 1j * data[:, 2]


def cmd_decompose(cfg: RunConfig) -> int:
    from .boundary import EndpointError, FTCError, lift_to_sobolev, plemelj_split
    from .numerics import RealGrid

    if cfg.input is None:
        raise ConfigError("decompose needs an input CSV file")
    if not (1.0 < cfg.p < math.inf):
        raise ConfigError(
            f"p = {cfg.p} refused: the upper/lower Hardy splitting does not extend to the endpoint "
            "exponents p = 1 and p = inf"
        )
    x, v = read_signal_csv(cfg.input)
    dx = np.diff(x)
    h = float(np.mean(dx))
    if h <= 0 or np.max(np.abs(dx - h)) > 1e-8 * max(1.0, abs(h)) + 1e-9 * np.max(np.abs(x)):
        raise ConfigError("input grid is not uniform and increasing")
    if x.size % 2:
        raise ConfigError("input grid needs an even number of samples")
    grid = RealGrid(x.size * h / 2, x.size)
    n = 0 if cfg.order is None else cfg.order
    try:
        sample = lift_to_sobolev(v, grid, n, cfg.p, ftc_rtol=None)
        res = plemelj_split(sample)
    except (EndpointError, FTCError) as exc:
        raise ConfigError(str(exc)) from None
    outdir = Path(cfg.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    header = ["x"] + [f"{part}{k}" for k in range(n + 1) for part in ("re", "im")]
    for name, part in (("f_plus.csv", res.f_plus), ("f_minus.csv", res.f_minus)):
        cols = [x] + [c for lev in part.stack for c in (lev.real, lev.imag)]
        (outdir / name).write_text(_csv_text(header, zip(*cols)), encoding="utf-8", newline="\n")
    summary = {
        "schema_version": SCHEMA_VERSION,
        "command": "decompose",
        "inputs": {"file": Path(cfg.input).name, "n": n, "p": cfg.p, "N": int(x.size), "h": h},
        "reconstruction_error": res.reconstruction_error,
        "residuals": {"plus": res.hardy_residual_plus, "minus": res.hardy_residual_minus},
        "orthogonality_defect": res.orthogonality_defect,
        "orthogonality_relative": res.orthogonality_relative,
    }
    (outdir / "summary.json").write_text(dumps(summary), encoding="utf-8", newline="\n")
    sys.stdout.write(dumps(summary))
    worst = max(res.hardy_residual_plus, res.hardy_residual_minus)
    return 0 if worst <= cfg.tol and res.reconstruction_error <= 1e-10 else 1


# --------------------------------------------------------------------------
# spectrum, kernel, gallery
# --------------------------------------------------------------------------


def _load_symbol(text: str):
    from .operator_lab import AnalyticSymbol, SymbolError

    p = Path(text)
    try:
        src = p.read_text(encoding="utf-8") if p.is_file() else text
        return AnalyticSymbol.from_json(json.loads(src))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"symbol is not valid JSON: {exc}") from None
    except (SymbolError, TypeError, ValueError) as exc:
        raise ConfigError(f"symbol schema violation: {exc}") from None


def cmd_spectrum(cfg: RunConfig) -> int:
    from .operator_lab import SymbolError, assemble_multiplication, build_onb, spectrum_check

    if cfg.symbol is None:
        raise ConfigError("spectrum needs a symbol (inline JSON or a file path)")
    psi = _load_symbol(cfg.symbol)
    n = 1 if cfg.order is None else cfg.order
    try:
        op = assemble_multiplication(psi, build_onb(n, cfg.galerkin_M))
    except (SymbolError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    rec = spectrum_check(op, psi)
    cloud = _csv_text(["re", "im", "tag"], rec.cloud_rows())
    summary = {
        "schema_version": SCHEMA_VERSION,
        "command": "spectrum",
        "symbol": psi.to_json(),
        "n": n,
        "M": cfg.galerkin_M,
        "inclusion_pass": rec.inclusion_pass,
        "range_hull_distance": rec.range_hull_distance,
        "eps": rec.eps,
        "delta": rec.delta,
        "multiplier_plausible": op.flags["multiplier_plausible"],
        "eigenvalues": rec.eigenvalues,
    }
    if cfg.out is None:
        sys.stdout.write(cloud)
    else:
        out = Path(cfg.out)
        out.write_text(cloud, encoding="utf-8", newline="\n")
        out.with_suffix(".json").write_text(dumps(summary), encoding="utf-8", newline="\n")
        sys.stdout.write(dumps(summary))
    return 0 if rec.inclusion_pass else 1


def _parse_point(s: Optional[str], name: str) -> complex:
    if s is None:
        raise ConfigError(f"kernel needs --{name}")
    try:
        z = complex(s.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ConfigError(f"cannot parse {name}={s!r} as a complex number") from None
    if z.imag <= 0:
        raise ConfigError(f"{name} must lie in the upper half plane")
    return z


def cmd_kernel(cfg: RunConfig) -> int:
    from .hilbert_model import KernelHandle, kernel_eval

    z, w = _parse_point(cfg.z, "z"), _parse_point(cfg.w, "w")
    n = 1 if cfg.order is None else cfg.order
    val = kernel_eval(KernelHandle(n, z), w)
    _write(dumps({"schema_version": SCHEMA_VERSION, "command": "kernel", "n": n, "z": z, "w": w, "value": val}), cfg.out)
    return 0


def cmd_gallery(cfg: RunConfig) -> int:
    from .hilbert_model import GalleryCase, gallery_run

    cases = ["weierstrass", "inverse-tail", "hp-not-h2p", "endpoint-p1"] if cfg.case in (None, "all") else [cfg.case]
    try:
        reports = [gallery_run(GalleryCase(c, grid_N=cfg.grid_N, grid_L=cfg.grid_L)) for c in cases]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _write(dumps({"schema_version": SCHEMA_VERSION, "command": "gallery", "reports": reports}), cfg.out)
    return 0 if all(r["pass"] for r in reports) else 1


_COMMANDS = {
    "verify": cmd_verify,
    "decompose": cmd_decompose,
    "spectrum": cmd_spectrum,
    "kernel": cmd_kernel,
    "gallery": cmd_gallery,
}


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    p.add_argument("--grid-L", type=float, dest="grid_L")
    p.add_argument("--grid-N", type=int, dest="grid_N")
    p.add_argument("--quad-M", type=int, dest="quad_M")
    p.add_argument("--scheme", choices=("gauss-laguerre", "exp-graded"))
    p.add_argument("--galerkin-M", type=int, dest="galerkin_M")
    p.add_argument("--order", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hardysobolev", description="Numerical checks for Hardy-Sobolev spaces on the upper half plane.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", nargs="?", choices=SUITES, default=None)
    d = sub.add_parser("decompose", help="split a sampled signal into upper and lower Hardy parts")
    d.add_argument("input", nargs="?")
    s = sub.add_parser("spectrum", help="Galerkin spectrum of a multiplication operator")
    s.add_argument("symbol", nargs="?", help="symbol JSON, inline or as a file path")
    k = sub.add_parser("kernel", help="evaluate the reproducing kernel K_n(z, w)")
    k.add_argument("--z")
    k.add_argument("--w")
    g = sub.add_parser("gallery", help="run divergence and membership demonstrations")
    g.add_argument("case", nargs="?", choices=("all", "weierstrass", "inverse-tail", "hp-not-h2p", "endpoint-p1"))
    for p in (v, d, s, k, g):
        _common(p)
    return parser


def config_from_args(argv: Optional[list[str]] = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    if ns.command is None:
        raise ConfigError("a subcommand is required: " + ", ".join(_COMMANDS))
    values = {"command": ns.command}
    if getattr(ns, "config", None):
        values.update(load_config_file(ns.config))
        values["command"] = ns.command
    for key, val in vars(ns).items():
        if key in ("config", "command") or val is None:
            continue
        values[key] = val
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return cfg.validate()


def main(argv: Optional[list[str]] = None) -> int:
    try:
        cfg = config_from_args(argv)
        return _COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        sys.stderr.write(f"hardysobolev: error: {exc}\n")
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
