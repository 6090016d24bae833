"""The 561-entry feature catalog and its batch evaluator.

The catalog mirrors the shipped feature set: five triaxial time signals,
five time-domain magnitudes, three triaxial spectra, four magnitude spectra
and seven vector angles, each expanded with the standard variable kinds.
Catalog names follow the shipped naming scheme so recomputed columns can be
paired with official ones; band-energy entries additionally carry an axis
suffix because the shipped file repeats their names verbatim.

The shipped feature files are affinely rescaled per feature with
unpublished constants, so recomputed values match them up to an affine map
(validated by correlation), not numerically.
"""

from dataclasses import dataclass, field

import numpy as np

from ..dataset import SAMPLE_RATE_HZ, WINDOW_LENGTH
from .autoregressive import AR_ORDER, burg_batch
from .filters import (
    BUTTERWORTH_ORDER,
    FilterSpec,
    GRAVITY_CUTOFF_HZ,
    MEDIAN_WINDOW,
    NOISE_CUTOFF_HZ,
    butterworth_lowpass,
    jerk,
    median_filter,
    split_gravity_body,
)
from .spectral import FFT_BANDS, max_inds_along, mean_freq_along, real_fft_magnitudes
from .stats import (
    angle_along,
    correlation_along,
    energy_along,
    entropy_along,
    iqr_along,
    kurtosis_along,
    mad_along,
    skewness_along,
)

AXES = ("X", "Y", "Z")

VARIABLE_KINDS = (
    "mean", "std", "mad", "max", "min", "sma", "energy", "iqr", "entropy",
    "arCoeff", "correlation", "maxInds", "meanFreq", "skewness", "kurtosis",
    "bandsEnergy", "angle",
)

TRIAXIAL_TIME = ("tBodyAcc", "tGravityAcc", "tBodyAccJerk", "tBodyGyro", "tBodyGyroJerk")
MAGNITUDE_TIME = ("tBodyAccMag", "tGravityAccMag", "tBodyAccJerkMag", "tBodyGyroMag", "tBodyGyroJerkMag")
TRIAXIAL_FREQ = ("fBodyAcc", "fBodyAccJerk", "fBodyGyro")
# Shipped naming doubles "Body" in the magnitude spectra; kept for column pairing.
MAGNITUDE_FREQ = (
    ("fBodyAccMag", "tBodyAccMag"),
    ("fBodyBodyAccJerkMag", "tBodyAccJerkMag"),
    ("fBodyBodyGyroMag", "tBodyGyroMag"),
    ("fBodyBodyGyroJerkMag", "tBodyGyroJerkMag"),
)

ANGLE_PAIRS = (
    ("angle(tBodyAccMean,gravity)", "tBodyAccMean", "gravityMean"),
    ("angle(tBodyAccJerkMean,gravityMean)", "tBodyAccJerkMean", "gravityMean"),
    ("angle(tBodyGyroMean,gravityMean)", "tBodyGyroMean", "gravityMean"),
    ("angle(tBodyGyroJerkMean,gravityMean)", "tBodyGyroJerkMean", "gravityMean"),
    ("angle(X,gravityMean)", "axisX", "gravityMean"),
    ("angle(Y,gravityMean)", "axisY", "gravityMean"),
    ("angle(Z,gravityMean)", "axisZ", "gravityMean"),
)

# Constants the recomputation depends on but the source description leaves
# open; emitted with every feature CSV so runs are self-describing.
PIPELINE_DECISIONS = {
    "median_window": MEDIAN_WINDOW,
    "butterworth_order": BUTTERWORTH_ORDER,
    "noise_cutoff_hz": NOISE_CUTOFF_HZ,
    "gravity_cutoff_hz": GRAVITY_CUTOFF_HZ,
    "filtering": "zero-phase (forward-backward) Butterworth",
    "jerk": "first difference scaled by the 50 Hz sample rate",
    "jerk_fft_padding": "repeat the final sample to restore 128 points",
    "spectrum": "magnitudes of DFT bins 1..64 (DC dropped, Nyquist kept)",
    "entropy": "Shannon entropy in nats of |x| / sum|x|; 0 for all-zero input",
    "maxInds": "(argmax bin + 1) / 64, ties to the lowest index",
    "meanFreq": "magnitude-weighted mean bin frequency in Hz",
    "quantiles": "linear interpolation between order statistics",
    "degenerate_rule": "skewness/kurtosis/correlation/angle/meanFreq -> 0",
    "ar_model": f"Burg recursion, order {AR_ORDER}, prediction-form signs",
    "bands": "mean squared magnitude per band",
    "angle_unit": "radians in [0, pi]",
}


@dataclass(frozen=True)
class CatalogEntry:
    """One feature: a variable kind applied to a derived signal."""

    name: str
    source: str
    kind: str
    axis: object = None   # int, (int, int) for correlation, or None
    param: object = None  # arCoeff index, (lo, hi) band, or (vec_u, vec_v)


@dataclass(frozen=True)
class FeatureCatalog:
    """Ordered, uniquely named feature definitions."""

    entries: tuple

    def __post_init__(self):
        names = [e.name for e in self.entries]
        if len(set(names)) != len(names):
            raise ValueError("catalog names must be unique")

    def __len__(self):
        return len(self.entries)

    @property
    def names(self):
        return tuple(e.name for e in self.entries)

    def subset(self, names):
        wanted = set(names)
        return FeatureCatalog(tuple(e for e in self.entries if e.name in wanted))

    def kinds_present(self):
        return sorted({e.kind for e in self.entries})

    def to_dict(self):
        return {
            "entries": [
                {"name": e.name, "source": e.source, "kind": e.kind,
                 "axis": e.axis, "param": e.param}
                for e in self.entries
            ],
            "decisions": PIPELINE_DECISIONS,
        }


def _triaxial_block(src, freq=False):
    entries = []
    stats = ("mean", "std", "mad", "max", "min")
    for kind in stats:
        for ax, letter in enumerate(AXES):
            entries.append(CatalogEntry(f"{src}-{kind}()-{letter}", src, kind, ax))
    entries.append(CatalogEntry(f"{src}-sma()", src, "sma"))
    for kind in ("energy", "iqr", "entropy"):
        for ax, letter in enumerate(AXES):
            entries.append(CatalogEntry(f"{src}-{kind}()-{letter}", src, kind, ax))
    if not freq:
        for ax, letter in enumerate(AXES):
            for j in range(1, AR_ORDER + 1):
                entries.append(
                    CatalogEntry(f"{src}-arCoeff()-{letter},{j}", src, "arCoeff", ax, j)
                )
        for (a, b) in ((0, 1), (0, 2), (1, 2)):
            entries.append(
                CatalogEntry(
                    f"{src}-correlation()-{AXES[a]},{AXES[b]}", src, "correlation", (a, b)
                )
            )
    else:
        for ax, letter in enumerate(AXES):
            entries.append(CatalogEntry(f"{src}-maxInds-{letter}", src, "maxInds", ax))
        for ax, letter in enumerate(AXES):
            entries.append(CatalogEntry(f"{src}-meanFreq()-{letter}", src, "meanFreq", ax))
        for ax, letter in enumerate(AXES):
            entries.append(CatalogEntry(f"{src}-skewness()-{letter}", src, "skewness", ax))
            entries.append(CatalogEntry(f"{src}-kurtosis()-{letter}", src, "kurtosis", ax))
        for ax, letter in enumerate(AXES):
            for (lo, hi) in FFT_BANDS:
                entries.append(
                    CatalogEntry(
                        f"{src}-bandsEnergy()-{lo},{hi}-{letter}", src,
                        "bandsEnergy", ax, (lo, hi),
                    )
                )
    return entries


def _magnitude_block(src, freq=False):
    entries = []
    for kind in ("mean", "std", "mad", "max", "min", "sma", "energy", "iqr", "entropy"):
        entries.append(CatalogEntry(f"{src}-{kind}()", src, kind))
    if not freq:
        for j in range(1, AR_ORDER + 1):
            entries.append(CatalogEntry(f"{src}-arCoeff(){j}", src, "arCoeff", None, j))
    else:
        entries.append(CatalogEntry(f"{src}-maxInds", src, "maxInds"))
        entries.append(CatalogEntry(f"{src}-meanFreq()", src, "meanFreq"))
        entries.append(CatalogEntry(f"{src}-skewness()", src, "skewness"))
        entries.append(CatalogEntry(f"{src}-kurtosis()", src, "kurtosis"))
    return entries


def build_full_catalog() -> FeatureCatalog:
    """The complete 561-entry catalog in shipped-file order."""
    entries = []
    for src in TRIAXIAL_TIME:
        entries.extend(_triaxial_block(src))
    for src in MAGNITUDE_TIME:
        entries.extend(_magnitude_block(src))
    for src in TRIAXIAL_FREQ:
        entries.extend(_triaxial_block(src, freq=True))
    for src, _ in MAGNITUDE_FREQ:
        entries.extend(_magnitude_block(src, freq=True))
    for name, u, v in ANGLE_PAIRS:
        entries.append(CatalogEntry(name, u, "angle", None, (u, v)))
    return FeatureCatalog(tuple(entries))


def _pad_to_window(x):
    """Restore 128 samples after differencing by repeating the final one."""
    deficit = WINDOW_LENGTH - x.shape[-1]
    if deficit <= 0:
        return x
    pad = [(0, 0)] * (x.ndim - 1) + [(0, deficit)]
    return np.pad(x, pad, mode="edge")


def derive_signals(windows):
    """All derived signals for a batch of raw 9-channel windows.

    ``windows`` has shape (n, 9, 128) in the canonical channel order. Only
    the total-acceleration and gyroscope channels feed the chain; body
    acceleration is recomputed from total via the gravity split rather than
    taken from the shipped body channels.
    """
    windows = np.asarray(windows, dtype=np.float64)
    noise = FilterSpec(
        "butterworth_lowpass",
        sample_rate_hz=SAMPLE_RATE_HZ,
        order=BUTTERWORTH_ORDER,
        cutoff_hz=NOISE_CUTOFF_HZ,
    )
    total = butterworth_lowpass(median_filter(windows[:, 0:3]), noise)
    gyro = butterworth_lowpass(median_filter(windows[:, 6:9]), noise)
    gravity, body = split_gravity_body(total, sample_rate_hz=SAMPLE_RATE_HZ)

    sig = {
        "tBodyAcc": body,
        "tGravityAcc": gravity,
        "tBodyGyro": gyro,
        "tBodyAccJerk": jerk(body, SAMPLE_RATE_HZ),
        "tBodyGyroJerk": jerk(gyro, SAMPLE_RATE_HZ),
    }
    for tri, mag in (
        ("tBodyAcc", "tBodyAccMag"),
        ("tGravityAcc", "tGravityAccMag"),
        ("tBodyAccJerk", "tBodyAccJerkMag"),
        ("tBodyGyro", "tBodyGyroMag"),
        ("tBodyGyroJerk", "tBodyGyroJerkMag"),
    ):
        s = sig[tri]
        sig[mag] = np.sqrt(s[:, 0] ** 2 + s[:, 1] ** 2 + s[:, 2] ** 2)

    sig["fBodyAcc"] = real_fft_magnitudes(sig["tBodyAcc"])
    sig["fBodyAccJerk"] = real_fft_magnitudes(_pad_to_window(sig["tBodyAccJerk"]))
    sig["fBodyGyro"] = real_fft_magnitudes(_pad_to_window(sig["tBodyGyro"]))
    for fname, tname in MAGNITUDE_FREQ:
        sig[fname] = real_fft_magnitudes(_pad_to_window(sig[tname]))

    n = windows.shape[0]
    sig["tBodyAccMean"] = sig["tBodyAcc"].mean(axis=-1)
    sig["tBodyAccJerkMean"] = sig["tBodyAccJerk"].mean(axis=-1)
    sig["tBodyGyroMean"] = sig["tBodyGyro"].mean(axis=-1)
    sig["tBodyGyroJerkMean"] = sig["tBodyGyroJerk"].mean(axis=-1)
    sig["gravityMean"] = sig["tGravityAcc"].mean(axis=-1)
    for ax, letter in enumerate(AXES):
        unit = np.zeros((n, 3))
        unit[:, ax] = 1.0
        sig[f"axis{letter}"] = unit
    return sig


_REDUCERS = {
    "mean": lambda x: x.mean(axis=-1),
    "std": lambda x: x.std(axis=-1),
    "mad": mad_along,
    "max": lambda x: x.max(axis=-1),
    "min": lambda x: x.min(axis=-1),
    "energy": energy_along,
    "iqr": iqr_along,
    "entropy": entropy_along,
    "skewness": skewness_along,
    "kurtosis": kurtosis_along,
}


def _evaluate_entries(signals, entries, ar_cache):
    n = next(iter(signals.values())).shape[0]
    out = np.empty((n, len(entries)))
    for col, e in enumerate(entries):
        data = signals[e.source]
        if e.kind in _REDUCERS:
            series = data if e.axis is None else data[:, e.axis, :]
            out[:, col] = _REDUCERS[e.kind](series)
        elif e.kind == "sma":
            absdata = np.abs(data)
            if absdata.ndim == 3:
                out[:, col] = absdata.sum(axis=(1, 2)) / absdata.shape[-1]
            else:
                out[:, col] = absdata.sum(axis=-1) / absdata.shape[-1]
        elif e.kind == "arCoeff":
            key = (e.source, e.axis)
            if key not in ar_cache:
                series = data if e.axis is None else data[:, e.axis, :]
                ar_cache[key] = burg_batch(series, AR_ORDER)[0]
            out[:, col] = ar_cache[key][:, e.param - 1]
        elif e.kind == "correlation":
            a, b = e.axis
            out[:, col] = correlation_along(data[:, a, :], data[:, b, :])
        elif e.kind == "maxInds":
            series = data if e.axis is None else data[:, e.axis, :]
            out[:, col] = max_inds_along(series)
        elif e.kind == "meanFreq":
            series = data if e.axis is None else data[:, e.axis, :]
            out[:, col] = mean_freq_along(series, SAMPLE_RATE_HZ)
        elif e.kind == "bandsEnergy":
            lo, hi = e.param
            series = data[:, e.axis, :]
            out[:, col] = (series[:, lo - 1 : hi] ** 2).sum(axis=-1) / (hi - lo + 1)
        elif e.kind == "angle":
            u_key, v_key = e.param
            out[:, col] = angle_along(signals[u_key], signals[v_key])
        else:
            raise ValueError(f"unknown variable kind {e.kind!r}")
    return out


def compute_feature_matrix(windows, catalog: FeatureCatalog = None, chunk=512):
    """Evaluate the catalog over a batch of windows; returns (n, len(catalog)).

    Pure: the same windows always produce a bit-identical matrix. Batches
    are processed in chunks to bound the memory of intermediate signals.
    """
    if catalog is None:
        catalog = build_full_catalog()
    windows = np.asarray(windows, dtype=np.float64)
    if windows.ndim != 3 or windows.shape[1] != 9 or windows.shape[2] != WINDOW_LENGTH:
        raise ValueError(
            f"expected (n, 9, {WINDOW_LENGTH}) windows, got {windows.shape}"
        )
    blocks = []
    for start in range(0, windows.shape[0], chunk):
        part = windows[start : start + chunk]
        signals = derive_signals(part)
        blocks.append(_evaluate_entries(signals, catalog.entries, {}))
    if not blocks:
        return np.empty((0, len(catalog)))
    return np.concatenate(blocks, axis=0)


def compute_feature_vector(window, catalog: FeatureCatalog = None):
    """Evaluate the catalog for a single (9, 128) window."""
    window = np.asarray(window, dtype=np.float64)
    if window.ndim != 2:
        raise ValueError("expected one (9, 128) window")
    return compute_feature_matrix(window[None], catalog)[0]
