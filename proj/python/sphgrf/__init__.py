"""Isotropic Gaussian random fields and the stochastic heat equation on the sphere."""

import json

from ._core import (
    DivergenceError,
    IoError,
    Spectrum,
    assoc_legendre_normalized,
    gauss_legendre,
    jacobi_p,
    kernel,
    legendre_p,
    run_experiment,
    sample,
    sigma2,
    sph_harm,
)

__all__ = [
    "DivergenceError",
    "IoError",
    "Spectrum",
    "assoc_legendre_normalized",
    "gauss_legendre",
    "jacobi_p",
    "kernel",
    "legendre_p",
    "regularity",
    "run_experiment",
    "sample",
    "sigma2",
    "sph_harm",
]


def regularity(spectrum):
    """Regularity report of a spectrum as a dict (unbounded exponents are None)."""
    return json.loads(spectrum.regularity_json())
