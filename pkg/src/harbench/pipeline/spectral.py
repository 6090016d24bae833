"""Frequency-domain representation of 128-sample windows.

The spectrum convention used throughout: magnitudes of DFT bins 1..64 of a
128-sample window (DC dropped, Nyquist kept), so bin k sits at
``k * sample_rate / 128`` Hz. Sixty-four bins at 50 Hz cover 0.39..25 Hz.
"""

import warnings

import numpy as np

from ..errors import AllZeroSpectrumWarning, BadLength

WINDOW_LENGTH = 128
N_BINS = WINDOW_LENGTH // 2

# Band edges (1-based bin indices, inclusive): eight bands of width 8, four
# of width 16, two of width 24 — the layout used by the shipped feature set.
FFT_BANDS = (
    (1, 8), (9, 16), (17, 24), (25, 32), (33, 40), (41, 48), (49, 56), (57, 64),
    (1, 16), (17, 32), (33, 48), (49, 64),
    (1, 24), (25, 48),
)


def real_fft_magnitudes(window):
    """Magnitudes of bins 1..64 of the 128-point DFT along the last axis."""
    window = np.asarray(window, dtype=np.float64)
    if window.shape[-1] != WINDOW_LENGTH:
        raise BadLength(
            f"expected {WINDOW_LENGTH}-sample windows, got {window.shape[-1]}"
        )
    spectrum = np.abs(np.fft.rfft(window, axis=-1))
    return spectrum[..., 1 : N_BINS + 1]


def bin_frequencies_hz(n_bins=N_BINS, sample_rate_hz=50.0):
    """Center frequency of each retained bin (k = 1..n_bins)."""
    return np.arange(1, n_bins + 1) * (sample_rate_hz / (2.0 * n_bins))


def max_inds_along(spectrum, n_bins=None):
    """Normalized index of the largest bin; ties resolve to the lowest index."""
    spectrum = np.asarray(spectrum, dtype=np.float64)
    m = n_bins or spectrum.shape[-1]
    return (np.argmax(spectrum, axis=-1) + 1) / m


def mean_freq_along(spectrum, sample_rate_hz=50.0):
    """Magnitude-weighted mean frequency in Hz; 0 for an all-zero spectrum."""
    spectrum = np.asarray(spectrum, dtype=np.float64)
    freqs = bin_frequencies_hz(spectrum.shape[-1], sample_rate_hz)
    total = spectrum.sum(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(
            total > 0,
            (spectrum * freqs).sum(axis=-1) / np.where(total > 0, total, 1.0),
            0.0,
        )
    return out


def spectral_features(spectrum, sample_rate_hz=50.0) -> dict:
    """``maxInds`` (argmax bin, scaled into [0, 1]) and ``meanFreq`` (Hz)."""
    spectrum = np.asarray(spectrum, dtype=np.float64)
    if spectrum.ndim != 1 or spectrum.shape[0] == 0:
        raise BadLength("spectral_features expects one non-empty spectrum")
    if spectrum.sum() == 0:
        warnings.warn(
            "all-zero spectrum: meanFreq set to 0",
            AllZeroSpectrumWarning,
            stacklevel=2,
        )
    return {
        "maxInds": float(max_inds_along(spectrum)),
        "meanFreq": float(mean_freq_along(spectrum, sample_rate_hz)),
    }


def bands_energy(spectrum):
    """Mean squared magnitude inside each of the 14 predeclared bands."""
    spectrum = np.asarray(spectrum, dtype=np.float64)
    if spectrum.shape[-1] != N_BINS:
        raise BadLength(f"bands_energy expects {N_BINS} bins, got {spectrum.shape[-1]}")
    power = spectrum**2
    out = [
        power[..., lo - 1 : hi].sum(axis=-1) / (hi - lo + 1) for lo, hi in FFT_BANDS
    ]
    return np.stack(out, axis=-1)
