"""Numerical toolkit for Hardy-Sobolev spaces on the upper half plane."""

from .boundary import BoundarySample, DecompositionResult, EndpointError, FTCError, plemelj_split, sample_boundary
from .hardy_sobolev import HardySobolevElement, cauchy_eval, embedding_check, hs_norm, product
from .hilbert_model import GalleryCase, KernelHandle, gallery_run, holomorphic_fourier, kernel_eval, pw_isometry_check
from .numerics import HalfLineGrid, RealGrid, make_halfline_grid, make_real_grid
from .operator_lab import AnalyticSymbol, GalerkinOperator, assemble_multiplication, build_onb, spectrum_check
from .weighted_halfline import SpectrumSample, ln_norm, sample_spectrum

__version__ = "0.1.0"

__all__ = [
    "AnalyticSymbol",
    "BoundarySample",
    "DecompositionResult",
    "EndpointError",
    "FTCError",
    "GalerkinOperator",
    "GalleryCase",
    "HalfLineGrid",
    "HardySobolevElement",
    "KernelHandle",
    "RealGrid",
    "SpectrumSample",
    "assemble_multiplication",
    "build_onb",
    "cauchy_eval",
    "embedding_check",
    "gallery_run",
    "holomorphic_fourier",
    "hs_norm",
    "kernel_eval",
    "ln_norm",
    "make_halfline_grid",
    "make_real_grid",
    "plemelj_split",
    "product",
    "pw_isometry_check",
    "sample_boundary",
    "sample_spectrum",
    "spectrum_check",
]
