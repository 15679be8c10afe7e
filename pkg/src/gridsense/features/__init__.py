from .extract import ExtractorParams, FeatureVector, extract_multiscale, extract_single_scale
from .extractors import (
    autocov,
    dfa_exponent,
    energy_features,
    fft_coeffs,
    haar_detail_energies,
    permutation_entropy,
    sample_entropy,
    shannon_entropy,
    spectral_shape,
    stats_basic,
    stats_blocks,
    wavelet_entropy,
)
from .schema import DEFAULT_SCHEMA, FeatureSchema

__all__ = [
    "ExtractorParams",
    "FeatureVector",
    "FeatureSchema",
    "DEFAULT_SCHEMA",
    "extract_single_scale",
    "extract_multiscale",
    "stats_basic",
    "stats_blocks",
    "fft_coeffs",
    "spectral_shape",
    "shannon_entropy",
    "permutation_entropy",
    "sample_entropy",
    "wavelet_entropy",
    "haar_detail_energies",
    "energy_features",
    "dfa_exponent",
    "autocov",
]
