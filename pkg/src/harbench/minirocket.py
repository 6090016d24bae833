"""Deterministic dilated-convolution transform with a ridge classifier head.

The transform convolves each series with all 84 length-9 kernels having
three +2 and six -1 taps, across a geometric schedule of dilations, and
pools every convolution into PPV features: the proportion of outputs
strictly exceeding a per-slot bias. Biases are quantiles (on a golden-ratio
low-discrepancy schedule) of the convolution outputs of one training
instance, chosen per slot by a counter-based generator, so fitting is fully
deterministic given (data, seed) and safe to parallelize.

Feature layout is dilation-major, then kernel, then quantile slot. Padding
alternates between "same" (zero-padded, all outputs) and "valid" (interior
outputs only) by the parity of dilation index + kernel index.
"""

import hashlib
import json
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np
from numba import njit, prange

from .errors import (
    EmptyTrainingSet,
    InputTooShort,
    LengthMismatch,
    SchemaVersionMismatch,
)
from .ridge import RidgeHead, fit_ridge
from .serialize import decode_array, encode_array

NUM_KERNELS = 84
KERNEL_LENGTH = 9
DEFAULT_TARGET_FEATURES = 9996
MAX_DILATIONS_PER_KERNEL = 32

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0

KERNEL_INDICES = np.array(
    list(combinations(range(KERNEL_LENGTH), 3)), dtype=np.int32
)


def kernel_set() -> np.ndarray:
    """The fixed (84, 9) weight matrix: -1 everywhere, +2 at three taps."""
    weights = -np.ones((NUM_KERNELS, KERNEL_LENGTH), dtype=np.float32)
    for k, idx in enumerate(KERNEL_INDICES):
        weights[k, idx] = 2.0
    return weights


def kernel_hash() -> str:
    return hashlib.sha256(kernel_set().tobytes()).hexdigest()


@dataclass(frozen=True)
class DilationPlan:
    """Dilation schedule and per-dilation feature counts for one length."""

    input_length: int
    target_features: int
    dilations: tuple
    features_per_dilation: tuple

    @property
    def num_features(self):
        return NUM_KERNELS * sum(self.features_per_dilation)

    @property
    def max_dilation(self):
        return max(self.dilations)

    @property
    def entries(self):
        return tuple(zip(self.dilations, self.features_per_dilation))

    @staticmethod
    def slot_padding(dilation_index, kernel_index):
        """Padding of one (dilation, kernel) slot: alternates by index."""
        return "same" if (dilation_index + kernel_index) % 2 == 0 else "valid"


def plan(
    input_length,
    target_features=DEFAULT_TARGET_FEATURES,
    max_dilations_per_kernel=MAX_DILATIONS_PER_KERNEL,
) -> DilationPlan:
    """Deterministic dilation schedule for series of ``input_length``.

    Dilations are the unique values of floor(2^x) for x uniformly spaced on
    [0, log2((length - 1) / 8)]; the per-kernel feature budget
    (target // 84) is spread across dilations proportionally to how many x
    land on each value, with the remainder going to the smallest dilations.
    """
    if input_length < KERNEL_LENGTH:
        raise InputTooShort(
            f"series length {input_length} is shorter than the kernel ({KERNEL_LENGTH})"
        )
    if target_features < NUM_KERNELS:
        raise InputTooShort(f"target_features must be >= {NUM_KERNELS}")

    per_kernel = target_features // NUM_KERNELS
    n_points = min(per_kernel, max_dilations_per_kernel)
    max_exponent = np.log2((input_length - 1) / (KERNEL_LENGTH - 1))
    raw = np.floor(np.logspace(0, max_exponent, n_points, base=2.0)).astype(np.int64)
    dilations, counts = np.unique(raw, return_counts=True)
    fpd = (counts * (per_kernel / n_points)).astype(np.int64)
    remainder = per_kernel - int(fpd.sum())
    i = 0
    while remainder > 0:
        fpd[i] += 1
        remainder -= 1
        i = (i + 1) % len(fpd)
    return DilationPlan(
        input_length=int(input_length),
        target_features=int(target_features),
        dilations=tuple(int(d) for d in dilations),
        features_per_dilation=tuple(int(c) for c in fpd),
    )


def quantile_schedule(n) -> np.ndarray:
    """Low-discrepancy bias quantiles: frac((j + 1) * golden ratio)."""
    return ((np.arange(1, n + 1) * _GOLDEN) % 1.0).astype(np.float64)


def _splitmix64(z):
    mask = np.uint64(0xFFFFFFFFFFFFFFFF)
    z = (np.uint64(z) + np.uint64(0x9E3779B97F4A7C15)) & mask
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & mask
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & mask
    return z ^ (z >> np.uint64(31))


def slot_instances(seed, n_slots, n_instances) -> np.ndarray:
    """Training-instance index per (dilation, kernel) slot, counter-keyed."""
    base = _splitmix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    out = np.empty(n_slots, dtype=np.int64)
    for slot in range(n_slots):
        out[slot] = int(_splitmix64(base ^ np.uint64(slot)) % np.uint64(n_instances))
    return out


@dataclass(frozen=True)
class BiasTable:
    """Per-slot PPV thresholds sampled from training convolutions."""

    biases: np.ndarray  # (num_features,) float32
    fit_seed: int
    sample_size: int


@njit(cache=True, fastmath=True)
def _conv_all_kernels(x, dilation, indices):
    """All 84 dilated convolutions of one series, zero ("same") padding.

    Returns (84, len(x)); the valid region is [4 * dilation, len - 4 * dilation).
    """
    n = x.shape[0]
    a = -x
    g = x * np.float32(3.0)

    c_alpha = a.copy()
    c_gamma = np.zeros((KERNEL_LENGTH, n), dtype=np.float32)
    c_gamma[KERNEL_LENGTH // 2] = g

    start = dilation
    end = n - 4 * dilation
    for gamma_index in range(KERNEL_LENGTH // 2):
        if end > 0:
            c_alpha[n - end :] += a[:end]
            c_gamma[gamma_index, n - end :] = g[:end]
        end += dilation
    for gamma_index in range(KERNEL_LENGTH // 2 + 1, KERNEL_LENGTH):
        if start < n:
            c_alpha[: n - start] += a[start:]
            c_gamma[gamma_index, : n - start] = g[start:]
        start += dilation

    out = np.empty((NUM_KERNELS, n), dtype=np.float32)
    for k in range(NUM_KERNELS):
        i0, i1, i2 = indices[k, 0], indices[k, 1], indices[k, 2]
        for t in range(n):
            out[k, t] = c_alpha[t] + c_gamma[i0, t] + c_gamma[i1, t] + c_gamma[i2, t]
    return out


@njit(cache=True)
def _interp_quantile(sorted_values, q):
    m = sorted_values.shape[0]
    if m == 1:
        return float(sorted_values[0])
    pos = q * (m - 1)
    lo = int(np.floor(pos))
    if lo >= m - 1:
        return float(sorted_values[m - 1])
    frac = pos - lo
    return float(sorted_values[lo]) + frac * (
        float(sorted_values[lo + 1]) - float(sorted_values[lo])
    )


@njit(cache=True)
def _fit_biases_kernel(train, dilations, fpd, quantiles, chosen, indices):
    num_features = NUM_KERNELS * np.sum(fpd)
    biases = np.zeros(num_features, dtype=np.float32)
    n = train.shape[1]

    feature_index = 0
    combo = 0
    for dilation_index in range(dilations.shape[0]):
        dilation = dilations[dilation_index]
        padding = 4 * dilation
        count = fpd[dilation_index]
        for kernel_index in range(NUM_KERNELS):
            conv = _conv_all_kernels(train[chosen[combo]], dilation, indices)[
                kernel_index
            ]
            if (dilation_index + kernel_index) % 2 == 0:
                region = conv
            else:
                region = conv[padding : n - padding]
            s = np.sort(region)
            for j in range(count):
                biases[feature_index + j] = _interp_quantile(
                    s, quantiles[feature_index + j]
                )
            feature_index += count
            combo += 1
    return biases


@njit(cache=True, parallel=True, fastmath=True)
def _transform_kernel(X, dilations, fpd, biases, indices):
    n_inst, n = X.shape
    num_features = NUM_KERNELS * np.sum(fpd)
    out = np.empty((n_inst, num_features), dtype=np.float32)

    for i in prange(n_inst):
        x = X[i]
        feature_index = 0
        for dilation_index in range(dilations.shape[0]):
            dilation = dilations[dilation_index]
            padding = 4 * dilation
            count = fpd[dilation_index]
            convs = _conv_all_kernels(x, dilation, indices)
            for kernel_index in range(NUM_KERNELS):
                conv = convs[kernel_index]
                if (dilation_index + kernel_index) % 2 == 0:
                    lo, hi = 0, n
                else:
                    lo, hi = padding, n - padding
                m = hi - lo
                for j in range(count):
                    bias = biases[feature_index + j]
                    ppv = 0
                    for t in range(lo, hi):
                        if conv[t] > bias:
                            ppv += 1
                    out[i, feature_index + j] = np.float32(ppv) / np.float32(m)
                feature_index += count
    return out


def fit_biases(train, dilation_plan: DilationPlan, seed=0) -> BiasTable:
    """Sample one training instance per slot and take quantile thresholds.

    Deterministic: the instance for slot s is chosen by a counter-based
    generator keyed by (seed, s), so the result is independent of thread
    count and iteration order.
    """
    train = np.ascontiguousarray(train, dtype=np.float32)
    if train.ndim != 2 or train.shape[0] == 0:
        raise EmptyTrainingSet("bias fitting needs at least one training series")
    if train.shape[1] != dilation_plan.input_length:
        raise LengthMismatch(
            f"series length {train.shape[1]} != plan length {dilation_plan.input_length}"
        )
    dil = np.asarray(dilation_plan.dilations, dtype=np.int64)
    fpd = np.asarray(dilation_plan.features_per_dilation, dtype=np.int64)
    quantiles = quantile_schedule(dilation_plan.num_features)
    chosen = slot_instances(seed, len(dil) * NUM_KERNELS, train.shape[0])
    biases = _fit_biases_kernel(train, dil, fpd, quantiles, chosen, KERNEL_INDICES)
    return BiasTable(biases=biases, fit_seed=int(seed), sample_size=int(train.shape[0]))


def transform(x, dilation_plan: DilationPlan, bias_table: BiasTable) -> np.ndarray:
    """PPV features in [0, 1], shape (n, plan.num_features), float32."""
    x = np.ascontiguousarray(x, dtype=np.float32)
    if x.ndim != 2:
        raise LengthMismatch("transform expects an (n, length) matrix")
    if x.shape[1] != dilation_plan.input_length:
        raise LengthMismatch(
            f"series length {x.shape[1]} != plan length {dilation_plan.input_length}"
        )
    dil = np.asarray(dilation_plan.dilations, dtype=np.int64)
    fpd = np.asarray(dilation_plan.features_per_dilation, dtype=np.int64)
    return _transform_kernel(x, dil, fpd, bias_table.biases, KERNEL_INDICES)


@dataclass(frozen=True)
class MiniRocketModel:
    """Transform parameters plus the fitted linear head."""

    plan: DilationPlan
    bias_table: BiasTable
    head: RidgeHead
    seed: int

    @property
    def classes(self):
        return self.head.classes

    @property
    def lambda_chosen(self):
        return self.head.lambda_chosen


def fit(
    x,
    labels,
    seed=0,
    target_features=DEFAULT_TARGET_FEATURES,
    lambda_grid=None,
) -> MiniRocketModel:
    """Plan, fit biases on the training series, transform, fit the head."""
    x = np.asarray(x)
    dilation_plan = plan(x.shape[1], target_features)
    bias_table = fit_biases(x, dilation_plan, seed)
    features = transform(x, dilation_plan, bias_table)
    head = fit_ridge(features.astype(np.float64), labels, lambda_grid)
    return MiniRocketModel(
        plan=dilation_plan, bias_table=bias_table, head=head, seed=int(seed)
    )


def predict(model: MiniRocketModel, x):
    """Labels and raw decision scores (n, n_classes) for new series."""
    features = transform(x, model.plan, model.bias_table)
    return model.head.predict(features.astype(np.float64))


SCHEMA_VERSION = 1


def to_document(model: MiniRocketModel) -> dict:
    from . import __version__

    head = model.head
    return {
        "format": "harbench-minirocket",
        "schema_version": SCHEMA_VERSION,
        "library_version": __version__,
        "kernel_hash": kernel_hash(),
        "seed": model.seed,
        "plan": {
            "input_length": model.plan.input_length,
            "target_features": model.plan.target_features,
            "dilations": list(model.plan.dilations),
            "features_per_dilation": list(model.plan.features_per_dilation),
        },
        "bias_table": {
            "fit_seed": model.bias_table.fit_seed,
            "sample_size": model.bias_table.sample_size,
            "biases": encode_array(model.bias_table.biases),
        },
        "head": {
            "classes": encode_array(head.classes),
            "weights": encode_array(head.weights),
            "intercepts": encode_array(head.intercepts),
            "feature_mean": encode_array(head.feature_mean),
            "feature_scale": encode_array(head.feature_scale),
            "kept_features": encode_array(head.kept_features),
            "lambda_chosen": head.lambda_chosen,
            "lambda_grid": encode_array(head.lambda_grid),
            "loo_sse": encode_array(head.loo_sse),
            "n_dropped": head.n_dropped,
        },
    }


def from_document(doc: dict) -> MiniRocketModel:
    if doc.get("format") != "harbench-minirocket":
        raise SchemaVersionMismatch(f"not a minirocket model: {doc.get('format')!r}")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"schema {doc.get('schema_version')} != supported {SCHEMA_VERSION}"
        )
    p = doc["plan"]
    h = doc["head"]
    return MiniRocketModel(
        plan=DilationPlan(
            input_length=p["input_length"],
            target_features=p["target_features"],
            dilations=tuple(p["dilations"]),
            features_per_dilation=tuple(p["features_per_dilation"]),
        ),
        bias_table=BiasTable(
            biases=decode_array(doc["bias_table"]["biases"]),
            fit_seed=doc["bias_table"]["fit_seed"],
            sample_size=doc["bias_table"]["sample_size"],
        ),
        head=RidgeHead(
            classes=decode_array(h["classes"]),
            weights=decode_array(h["weights"]),
            intercepts=decode_array(h["intercepts"]),
            feature_mean=decode_array(h["feature_mean"]),
            feature_scale=decode_array(h["feature_scale"]),
            kept_features=decode_array(h["kept_features"]),
            lambda_chosen=h["lambda_chosen"],
            lambda_grid=decode_array(h["lambda_grid"]),
            loo_sse=decode_array(h["loo_sse"]),
            n_dropped=h["n_dropped"],
        ),
        seed=doc["seed"],
    )


def save(model: MiniRocketModel, path):
    Path(path).write_text(json.dumps(to_document(model)))


def load(path) -> MiniRocketModel:
    return from_document(json.loads(Path(path).read_text()))
