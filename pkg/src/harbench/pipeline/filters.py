"""Noise filtering, gravity separation, differentiation and magnitudes.

All operations act on the last axis, so a single call handles one series,
one triaxial window or a whole batch of windows. They are pure functions:
same input, bit-identical output.
"""

from dataclasses import dataclass

import numpy as np
from scipy import signal as _signal

from ..errors import BadWindow, LengthMismatch, SeriesTooShort, ValidationError

GRAVITY_CUTOFF_HZ = 0.3
NOISE_CUTOFF_HZ = 20.0
BUTTERWORTH_ORDER = 3
MEDIAN_WINDOW = 3


@dataclass(frozen=True)
class WindowSpec:
    """Fixed-width sliding-window geometry of the source recordings."""

    length_samples: int = 128
    overlap_samples: int = 64
    duration_s: float = 2.56
    sample_rate_hz: float = 50.0

    def __post_init__(self):
        if round(self.duration_s * self.sample_rate_hz) != self.length_samples:
            raise ValidationError("duration_s * sample_rate_hz must equal length_samples")
        if self.overlap_samples * 2 != self.length_samples:
            raise ValidationError("overlap must be half the window length")


@dataclass(frozen=True)
class FilterSpec:
    """Parameters for either a Butterworth low-pass or a median filter."""

    kind: str
    sample_rate_hz: float
    order: int = BUTTERWORTH_ORDER
    cutoff_hz: float = None
    window: int = MEDIAN_WINDOW

    def __post_init__(self):
        if self.kind not in ("butterworth_lowpass", "median"):
            raise ValidationError(f"unknown filter kind {self.kind!r}")
        if self.sample_rate_hz <= 0:
            raise ValidationError("sample_rate_hz must be positive")
        if self.kind == "butterworth_lowpass":
            if self.order < 1:
                raise ValidationError("order must be >= 1")
            if self.cutoff_hz is None or self.cutoff_hz <= 0:
                raise ValidationError("cutoff_hz must be positive")
            if self.cutoff_hz >= self.sample_rate_hz / 2:
                raise ValidationError("cutoff_hz must be below the Nyquist rate")
        else:
            if self.window < 3 or self.window % 2 == 0:
                raise ValidationError("median window must be odd and >= 3")


def median_filter(x, window=MEDIAN_WINDOW):
    """Sliding median along the last axis, edges handled by reflection.

    Output length equals input length. ``window`` must be odd and no longer
    than the series.
    """
    x = np.asarray(x, dtype=np.float64)
    if window % 2 == 0 or window < 1:
        raise BadWindow(f"window must be odd, got {window}")
    if window > x.shape[-1]:
        raise BadWindow(f"window {window} exceeds series length {x.shape[-1]}")
    half = window // 2
    pad = [(0, 0)] * (x.ndim - 1) + [(half, half)]
    padded = np.pad(x, pad, mode="reflect")
    view = np.lib.stride_tricks.sliding_window_view(padded, window, axis=-1)
    return np.median(view, axis=-1)


def butterworth_coefficients(spec: FilterSpec):
    """Transfer-function coefficients (b, a) of the low-pass design."""
    return _signal.butter(
        spec.order, spec.cutoff_hz, btype="low", fs=spec.sample_rate_hz
    )


def butterworth_lowpass(x, spec: FilterSpec, zero_phase=True):
    """Low-pass Butterworth along the last axis.

    By default the filter runs forward and backward (zero phase, squared
    magnitude response), matching offline feature extraction. Pass
    ``zero_phase=False`` for a single causal pass, e.g. to measure the
    design's frequency response directly.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[-1]
    if n < 3 * spec.order:
        raise SeriesTooShort(
            f"need at least {3 * spec.order} samples for order {spec.order}, got {n}"
        )
    b, a = butterworth_coefficients(spec)
    if not zero_phase:
        return _signal.lfilter(b, a, x, axis=-1)
    return _signal.filtfilt(b, a, x, axis=-1, padlen=min(3 * spec.order, n - 1))


def split_gravity_body(
    total_acc,
    cutoff_hz=GRAVITY_CUTOFF_HZ,
    sample_rate_hz=50.0,
    order=BUTTERWORTH_ORDER,
):
    """Split total acceleration into (gravity, body) components.

    ``total_acc`` is any array whose last axis is time (typically
    ``(3, n)`` or ``(batch, 3, n)``). Gravity is the zero-phase low-pass
    output; body is defined as ``total - gravity``, so the reconstruction
    ``gravity + body == total`` is exact by construction.
    """
    spec = FilterSpec(
        "butterworth_lowpass",
        sample_rate_hz=sample_rate_hz,
        order=order,
        cutoff_hz=cutoff_hz,
    )
    total_acc = np.asarray(total_acc, dtype=np.float64)
    gravity = butterworth_lowpass(total_acc, spec)
    body = total_acc - gravity
    return gravity, body


def jerk(x, sample_rate_hz=50.0):
    """First difference scaled by the sample rate; output is one sample shorter."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] < 2:
        raise SeriesTooShort("jerk needs at least 2 samples")
    return np.diff(x, axis=-1) * float(sample_rate_hz)


def magnitude(x, y, z):
    """Euclidean norm across the three axes, per sample."""
    x, y, z = (np.asarray(v, dtype=np.float64) for v in (x, y, z))
    if not (x.shape == y.shape == z.shape):
        raise LengthMismatch(f"axis shapes differ: {x.shape}, {y.shape}, {z.shape}")
    return np.sqrt(x * x + y * y + z * z)
