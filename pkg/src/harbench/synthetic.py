"""Synthetic stand-in data shaped like the official dataset.

Useful for demos, smoke tests and CI machines that do not have the real
recordings on disk. The generated signals are physically flavoured (gravity
orientation separates the static postures, oscillation frequency and
amplitude separate the gaits) so classifiers genuinely learn something, but
no claim of realism is made.
"""

from pathlib import Path

import numpy as np

from .dataset import (
    CHANNEL_NAMES,
    DatasetBundle,
    FeatureMatrix,
    InertialTensor,
    N_CLASSES,
    SAMPLE_RATE_HZ,
    WINDOW_LENGTH,
    _freeze,
)

# per class: gravity direction, oscillation frequency (Hz), amplitude
_GRAVITY = np.array(
    [
        [0.05, 0.95, 0.05],   # WALKING: upright
        [0.15, 0.90, 0.10],   # WALKING_UPSTAIRS
        [-0.10, 0.92, 0.08],  # WALKING_DOWNSTAIRS
        [0.45, 0.70, 0.30],   # SITTING: tilted
        [0.02, 0.99, 0.02],   # STANDING
        [0.90, 0.10, 0.35],   # LAYING: horizontal
    ]
)
_FREQ = np.array([1.8, 1.3, 2.3, 0.0, 0.0, 0.0])
_AMP = np.array([0.25, 0.35, 0.45, 0.02, 0.01, 0.01])


def _windows(rng, labels):
    n = labels.shape[0]
    t = np.arange(WINDOW_LENGTH) / SAMPLE_RATE_HZ
    data = np.empty((n, 9, WINDOW_LENGTH))
    for i, code in enumerate(labels):
        k = code - 1
        phase = rng.uniform(0, 2 * np.pi, size=3)[:, None]
        osc = _AMP[k] * np.sin(2 * np.pi * _FREQ[k] * t[None, :] + phase)
        body = osc + 0.02 * rng.standard_normal((3, WINDOW_LENGTH))
        gravity = _GRAVITY[k][:, None] + 0.01 * rng.standard_normal((3, 1))
        data[i, 0:3] = gravity + body
        data[i, 3:6] = body
        gyro_amp = 0.8 * _AMP[k] + 0.01
        data[i, 6:9] = gyro_amp * np.sin(
            2 * np.pi * (_FREQ[k] + 0.4) * t[None, :] + rng.uniform(0, 2 * np.pi, (3, 1))
        ) + 0.02 * rng.standard_normal((3, WINDOW_LENGTH))
    return data


def _feature_blobs(rng, labels, d):
    centers = rng.uniform(-0.6, 0.6, size=(N_CLASSES, d))
    x = centers[labels - 1] + 0.08 * rng.standard_normal((labels.shape[0], d))
    return np.clip(x, -1.0, 1.0)


def make_bundle(n=120, d=561, seed=0, labels=None) -> DatasetBundle:
    """Build an in-memory bundle with n instances cycling through the classes."""
    rng = np.random.default_rng(seed)
    if labels is None:
        labels = 1 + (np.arange(n) % N_CLASSES)
        labels = rng.permutation(labels)
    labels = np.asarray(labels, dtype=np.int64)
    n = labels.shape[0]
    names = tuple(f"synth-feat-{i:03d}" for i in range(d))
    return DatasetBundle(
        inertial=InertialTensor(_freeze(_windows(rng, labels))),
        features=FeatureMatrix(_freeze(_feature_blobs(rng, labels, d)), names),
        labels=_freeze(labels),
        subjects=_freeze(1 + (np.arange(n) % 30)),
        partitions=_freeze(np.full(n, "train", dtype="<U5")),
        row_indices=_freeze(np.arange(n, dtype=np.int64)),
    )


def _write_matrix(path: Path, arr, fmt="%.7e"):
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.atleast_2d(arr), fmt=fmt, delimiter=" ")


def write_layout(root, n_train=72, n_test=36, d=561, seed=0):
    """Write a synthetic dataset in the official file layout under ``root``."""
    root = Path(root)
    rng = np.random.default_rng(seed)
    centers = rng.uniform(-0.6, 0.6, size=(N_CLASSES, d))

    root.mkdir(parents=True, exist_ok=True)
    with open(root / "features.txt", "w") as fh:
        for i in range(d):
            fh.write(f"{i + 1} synth-feat-{i:03d}\n")

    for split, n in (("train", n_train), ("test", n_test)):
        labels = 1 + (np.arange(n) % N_CLASSES)
        labels = rng.permutation(labels)
        windows = _windows(rng, labels)
        feats = np.clip(
            centers[labels - 1] + 0.08 * rng.standard_normal((n, d)), -1.0, 1.0
        )
        subjects = 1 + (np.arange(n) % 30)

        d_split = root / split
        _write_matrix(d_split / f"X_{split}.txt", feats)
        _write_matrix(d_split / f"y_{split}.txt", labels[:, None], fmt="%d")
        _write_matrix(d_split / f"subject_{split}.txt", subjects[:, None], fmt="%d")
        for ci, chan in enumerate(CHANNEL_NAMES):
            _write_matrix(
                d_split / "Inertial Signals" / f"{chan}_{split}.txt", windows[:, ci, :]
            )
    return root
