"""Signal-processing chain and feature catalog for inertial windows."""

from .autoregressive import AR_ORDER, burg_ar_coefficients, burg_batch
from .catalog import (
    CatalogEntry,
    FeatureCatalog,
    PIPELINE_DECISIONS,
    VARIABLE_KINDS,
    build_full_catalog,
    compute_feature_matrix,
    compute_feature_vector,
    derive_signals,
)
from .filters import (
    FilterSpec,
    WindowSpec,
    butterworth_coefficients,
    butterworth_lowpass,
    jerk,
    magnitude,
    median_filter,
    split_gravity_body,
)
from .spectral import (
    FFT_BANDS,
    bands_energy,
    bin_frequencies_hz,
    real_fft_magnitudes,
    spectral_features,
)
from .stats import angle, basic_stats, correlation, sma

__all__ = [
    "AR_ORDER",
    "CatalogEntry",
    "FFT_BANDS",
    "FeatureCatalog",
    "FilterSpec",
    "PIPELINE_DECISIONS",
    "VARIABLE_KINDS",
    "WindowSpec",
    "angle",
    "bands_energy",
    "basic_stats",
    "bin_frequencies_hz",
    "build_full_catalog",
    "burg_ar_coefficients",
    "burg_batch",
    "butterworth_coefficients",
    "butterworth_lowpass",
    "compute_feature_matrix",
    "compute_feature_vector",
    "correlation",
    "derive_signals",
    "jerk",
    "magnitude",
    "median_filter",
    "real_fft_magnitudes",
    "sma",
    "spectral_features",
    "split_gravity_body",
]
