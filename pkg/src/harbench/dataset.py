"""Loading and validation of the UCI smartphone-sensor dataset layout.

The expected directory layout (the official distribution)::

    root/
      features.txt                       561 feature names
      train/X_train.txt                  7352 x 561 space-separated reals
      train/y_train.txt                  activity codes 1..6
      train/subject_train.txt            subject ids 1..30
      train/Inertial Signals/<chan>_train.txt   9 files, 128 reals per row
      test/...                           mirrored

Both partitions are pooled into a single immutable :class:`DatasetBundle`
(train rows first) because every experiment repartitions the pool randomly.
The original instance identity is kept as ``(partition, row_index)`` so any
instance in a report can be traced back to its source file row.
"""

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BadLabel,
    FeatureRangeWarning,
    MissingFile,
    NonFiniteValue,
    RowCountMismatch,
    UnknownChannel,
)

SAMPLE_RATE_HZ = 50.0
WINDOW_LENGTH = 128

CHANNEL_NAMES = (
    "total_acc_x", "total_acc_y", "total_acc_z",
    "body_acc_x", "body_acc_y", "body_acc_z",
    "body_gyro_x", "body_gyro_y", "body_gyro_z",
)

N_SUBJECTS = 30


@dataclass(frozen=True)
class ActivityLabel:
    """One of the six activity classes; ``code`` and ``name`` are a bijection."""

    code: int
    name: str


ACTIVITIES = (
    ActivityLabel(1, "WALKING"),
    ActivityLabel(2, "WALKING_UPSTAIRS"),
    ActivityLabel(3, "WALKING_DOWNSTAIRS"),
    ActivityLabel(4, "SITTING"),
    ActivityLabel(5, "STANDING"),
    ActivityLabel(6, "LAYING"),
)

ACTIVITY_NAMES = {a.code: a.name for a in ACTIVITIES}
ACTIVITY_CODES = {a.name: a.code for a in ACTIVITIES}
N_CLASSES = len(ACTIVITIES)


def _freeze(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class InertialTensor:
    """Raw inertial windows, shape (n, 9, 128), channel order fixed."""

    data: np.ndarray
    channel_names: tuple = CHANNEL_NAMES
    sample_rate_hz: float = SAMPLE_RATE_HZ

    @property
    def n(self):
        return self.data.shape[0]


@dataclass(frozen=True)
class FeatureMatrix:
    """Dense feature matrix with a parallel catalog of unique names."""

    values: np.ndarray
    names: tuple

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def d(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class DatasetBundle:
    """Pooled instances: inertial windows, features, labels and subjects.

    ``partitions``/``row_indices`` record where each pooled instance came
    from, so confusion-matrix drill-downs stay reproducible.
    """

    inertial: InertialTensor
    features: FeatureMatrix
    labels: np.ndarray
    subjects: np.ndarray
    partitions: np.ndarray = field(repr=False, default=None)
    row_indices: np.ndarray = field(repr=False, default=None)

    @property
    def n_total(self):
        return self.labels.shape[0]


def _read_matrix(path: Path, n_cols=None):
    """Parse a whitespace-delimited real matrix, reporting defects precisely."""
    if not path.is_file():
        raise MissingFile(path.name)
    try:
        arr = np.loadtxt(path, dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise NonFiniteValue(f"{path.name}: unparseable value ({exc})") from None
    if arr.size == 0:
        arr = arr.reshape(0, n_cols or 0)
    if n_cols is not None and arr.shape[1] != n_cols:
        raise RowCountMismatch(
            f"{path.name}: expected {n_cols} columns, found {arr.shape[1]}"
        )
    bad = ~np.isfinite(arr)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise NonFiniteValue(f"{path.name}: non-finite value at row {r + 1}, column {c + 1}")
    return arr


def _read_int_column(path: Path, lo, hi, what):
    raw = _read_matrix(path, n_cols=1)[:, 0]
    ints = raw.astype(np.int64)
    if not np.array_equal(ints, raw):
        r = int(np.argwhere(ints != raw)[0][0])
        raise BadLabel(f"{path.name}: non-integer {what} at row {r + 1}")
    out_of_range = (ints < lo) | (ints > hi)
    if out_of_range.any():
        r = int(np.argwhere(out_of_range)[0][0])
        raise BadLabel(
            f"{path.name}: {what} {ints[r]} at row {r + 1} outside {lo}..{hi}"
        )
    return ints


def _read_feature_names(path: Path):
    if not path.is_file():
        raise MissingFile(path.name)
    names = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        parts = line.split(None, 1)
        names.append(parts[1] if len(parts) == 2 and parts[0].isdigit() else line)
    # The official file repeats a handful of names (bandsEnergy entries carry
    # no axis suffix); suffix repeats pandas-style to keep names unique.
    seen = {}
    unique = []
    for name in names:
        k = seen.get(name, 0)
        seen[name] = k + 1
        unique.append(name if k == 0 else f"{name}.{k}")
    return tuple(unique)


def _load_partition(root: Path, split: str):
    d = root / split
    X = _read_matrix(d / f"X_{split}.txt")
    y = _read_int_column(d / f"y_{split}.txt", 1, 6, "label")
    subj = _read_int_column(d / f"subject_{split}.txt", 1, N_SUBJECTS, "subject id")

    sig_dir = d / "Inertial Signals"
    channels = []
    for chan in CHANNEL_NAMES:
        arr = _read_matrix(sig_dir / f"{chan}_{split}.txt", n_cols=WINDOW_LENGTH)
        channels.append(arr)
    counts = {f"X_{split}.txt": X.shape[0], f"y_{split}.txt": y.shape[0],
              f"subject_{split}.txt": subj.shape[0]}
    counts.update({f"{c}_{split}.txt": a.shape[0] for c, a in zip(CHANNEL_NAMES, channels)})
    if len(set(counts.values())) != 1:
        raise RowCountMismatch(
            f"{split}: row counts disagree: "
            + ", ".join(f"{k}={v}" for k, v in sorted(counts.items()))
        )
    inertial = np.stack(channels, axis=1)  # (n, 9, 128)
    return X, y, subj, inertial


def load_bundle(root_dir) -> DatasetBundle:
    """Load and pool the official layout under ``root_dir``.

    Train rows come first, row order within each partition is preserved, and
    the returned bundle is immutable (all arrays are write-protected). Two
    loads of the same directory produce bit-identical bundles.
    """
    root = Path(root_dir)
    names = _read_feature_names(root / "features.txt")

    Xs, ys, subjects, tensors, parts, rows = [], [], [], [], [], []
    for split in ("train", "test"):
        X, y, subj, inertial = _load_partition(root, split)
        if X.shape[1] != len(names):
            raise RowCountMismatch(
                f"X_{split}.txt has {X.shape[1]} columns but features.txt "
                f"names {len(names)}"
            )
        Xs.append(X)
        ys.append(y)
        subjects.append(subj)
        tensors.append(inertial)
        parts.append(np.full(X.shape[0], split, dtype="<U5"))
        rows.append(np.arange(X.shape[0], dtype=np.int64))

    values = np.concatenate(Xs, axis=0)
    if values.size and (values.min() < -1.0 or values.max() > 1.0):
        warnings.warn(
            "precomputed feature values fall outside [-1, 1]; the shipped "
            "official files are normalized to that range",
            FeatureRangeWarning,
            stacklevel=2,
        )
    bundle = DatasetBundle(
        inertial=InertialTensor(_freeze(np.concatenate(tensors, axis=0))),
        features=FeatureMatrix(_freeze(values), names),
        labels=_freeze(np.concatenate(ys)),
        subjects=_freeze(np.concatenate(subjects)),
        partitions=_freeze(np.concatenate(parts)),
        row_indices=_freeze(np.concatenate(rows)),
    )
    return bundle


@dataclass(frozen=True)
class VerificationReport:
    """Per-class and per-subject instance counts plus basic value ranges."""

    n_total: int
    per_class: dict
    per_subject: dict
    empty_classes: tuple
    feature_range: tuple
    inertial_range: tuple

    def summary(self) -> str:
        lines = [f"instances: {self.n_total}"]
        lines.append("per-activity counts:")
        for code, name in ACTIVITY_NAMES.items():
            lines.append(f"  {code} {name:<20s} {self.per_class[code]}")
        present = [s for s, c in self.per_subject.items() if c > 0]
        lines.append(f"subjects present: {len(present)} of {N_SUBJECTS}")
        if self.empty_classes:
            names = ", ".join(ACTIVITY_NAMES[c] for c in self.empty_classes)
            lines.append(f"WARNING: empty classes: {names}")
        lines.append(
            "feature range: [%.4f, %.4f]" % self.feature_range
            if self.n_total
            else "feature range: n/a"
        )
        return "\n".join(lines)


def verify_bundle(bundle: DatasetBundle) -> VerificationReport:
    """Count instances per activity and per subject; flag empty classes."""
    per_class = {a.code: int((bundle.labels == a.code).sum()) for a in ACTIVITIES}
    per_subject = {
        s: int((bundle.subjects == s).sum()) for s in range(1, N_SUBJECTS + 1)
    }
    empty = tuple(c for c, n in per_class.items() if n == 0)
    if bundle.n_total:
        frange = (float(bundle.features.values.min()), float(bundle.features.values.max()))
        irange = (float(bundle.inertial.data.min()), float(bundle.inertial.data.max()))
    else:
        frange = (0.0, 0.0)
        irange = (0.0, 0.0)
    return VerificationReport(
        n_total=bundle.n_total,
        per_class=per_class,
        per_subject=per_subject,
        empty_classes=empty,
        feature_range=frange,
        inertial_range=irange,
    )


def select_channel(bundle: DatasetBundle, channel: str) -> np.ndarray:
    """Return one inertial channel as an (n, 128) matrix, order preserved."""
    try:
        idx = CHANNEL_NAMES.index(channel)
    except ValueError:
        raise UnknownChannel(
            f"{channel!r}; expected one of {', '.join(CHANNEL_NAMES)}"
        ) from None
    return bundle.inertial.data[:, idx, :].copy()
