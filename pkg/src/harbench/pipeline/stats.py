"""Window statistics: moments, dispersion, entropy, correlation, angles.

The scalar entry points (:func:`basic_stats`, :func:`correlation`, ...) are
the documented contracts; the ``*_along`` helpers are their vectorized
counterparts used by the feature catalog, applying the same degenerate-value
rules elementwise without emitting warnings.
"""

import warnings

import numpy as np

from ..errors import (
    DegenerateSeriesWarning,
    LengthMismatch,
    ZeroVariance,
    ZeroVector,
)

# Degenerate rules: skewness and kurtosis of a zero-variance series are 0;
# entropy of an all-zero series is 0. The scalar API flags these with
# DegenerateSeriesWarning, the batched API applies them silently.


def _moments(x):
    mean = np.mean(x, axis=-1)
    centered = x - mean[..., None]
    var = np.mean(centered**2, axis=-1)
    m3 = np.mean(centered**3, axis=-1)
    m4 = np.mean(centered**4, axis=-1)
    return mean, var, m3, m4


def skewness_along(x):
    _, var, m3, _ = _moments(np.asarray(x, dtype=np.float64))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(var > 0, m3 / np.where(var > 0, var, 1.0) ** 1.5, 0.0)
    return out


def kurtosis_along(x):
    """Standardized fourth moment (non-excess): 3.0 for a Gaussian."""
    _, var, _, m4 = _moments(np.asarray(x, dtype=np.float64))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(var > 0, m4 / np.where(var > 0, var, 1.0) ** 2, 0.0)
    return out


def mad_along(x):
    med = np.median(x, axis=-1, keepdims=True)
    return np.median(np.abs(x - med), axis=-1)


def energy_along(x):
    return np.mean(np.asarray(x, dtype=np.float64) ** 2, axis=-1)


def iqr_along(x):
    q1, q3 = np.quantile(x, [0.25, 0.75], axis=-1, method="linear")
    return q3 - q1


def entropy_along(x):
    """Shannon entropy (nats) of the normalized absolute sample mass."""
    ax = np.abs(np.asarray(x, dtype=np.float64))
    total = ax.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(total > 0, ax / np.where(total > 0, total, 1.0), 0.0)
        plogp = np.where(p > 0, p * np.log(p), 0.0)
    return -plogp.sum(axis=-1)


def basic_stats(x) -> dict:
    """All per-series statistics of one series as a name -> value dict.

    std is the population standard deviation, energy the mean of squares,
    mad the median absolute deviation from the median, iqr uses
    linear-interpolation quantiles, and skewness/kurtosis are the
    standardized third/fourth moments (0 when the series is constant).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("basic_stats expects a single series")
    mean, var, m3, m4 = _moments(x)
    std = float(np.sqrt(var))
    if std == 0.0:
        warnings.warn(
            "zero-variance series: skewness and kurtosis set to 0",
            DegenerateSeriesWarning,
            stacklevel=2,
        )
    return {
        "mean": float(mean),
        "std": std,
        "mad": float(mad_along(x)),
        "max": float(np.max(x)),
        "min": float(np.min(x)),
        "energy": float(energy_along(x)),
        "iqr": float(iqr_along(x)),
        "entropy": float(entropy_along(x)),
        "skewness": float(m3 / var**1.5) if var > 0 else 0.0,
        "kurtosis": float(m4 / var**2) if var > 0 else 0.0,
    }


def sma(x, y, z):
    """Signal magnitude area: mean over samples of |x| + |y| + |z|."""
    x, y, z = (np.asarray(v, dtype=np.float64) for v in (x, y, z))
    if not (x.shape[-1] == y.shape[-1] == z.shape[-1]):
        raise LengthMismatch("sma needs three equal-length series")
    return (
        np.abs(x).sum(axis=-1) + np.abs(y).sum(axis=-1) + np.abs(z).sum(axis=-1)
    ) / x.shape[-1]


def correlation_along(a, b):
    """Pearson correlation along the last axis; 0 where either side is constant."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    ac = a - a.mean(axis=-1, keepdims=True)
    bc = b - b.mean(axis=-1, keepdims=True)
    num = (ac * bc).sum(axis=-1)
    den = np.sqrt((ac**2).sum(axis=-1) * (bc**2).sum(axis=-1))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return np.clip(out, -1.0, 1.0)


def correlation(a, b):
    """Pearson correlation of two non-constant, equal-length series."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch("correlation expects two equal-length series")
    if a.shape[0] < 2:
        raise LengthMismatch("correlation needs at least 2 samples")
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        raise ZeroVariance("correlation undefined for a constant series")
    return float(correlation_along(a, b))


def angle_along(u, v):
    """Angle in [0, pi] between stacked 3-vectors; 0 where either is zero."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    dot = (u * v).sum(axis=-1)
    nu = np.linalg.norm(u, axis=-1)
    nv = np.linalg.norm(v, axis=-1)
    den = nu * nv
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.where(den > 0, dot / np.where(den > 0, den, 1.0), 1.0)
    return np.arccos(np.clip(c, -1.0, 1.0))


def angle(u, v):
    """Angle in [0, pi] between two non-zero 3-vectors."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != (3,) or v.shape != (3,):
        raise LengthMismatch("angle expects two 3-vectors")
    if np.linalg.norm(u) == 0 or np.linalg.norm(v) == 0:
        raise ZeroVector("angle undefined for a zero vector")
    return float(angle_along(u, v))
