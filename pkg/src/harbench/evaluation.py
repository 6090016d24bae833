"""Monte Carlo cross-validation driver and the metric suite.

Each iteration repartitions the pooled instances with a Fisher-Yates
shuffle seeded by ``seed_base + iteration``, fits the requested model on
the train side and scores the test side. Per-iteration accuracy, macro-F1
and one-vs-one AUC are aggregated as mean +/- population std; test
confusions accumulate into a single matrix whose percent view sums to 100
over all iterations. Model-internal seeds equal the split seed, so a whole
run is reproducible from (data, model spec, seed schedule) — timing fields
excepted.
"""

import json
import time
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np
from scipy.stats import rankdata

from . import gbdt, minirocket
from .dataset import ACTIVITY_NAMES, DatasetBundle, N_CLASSES, select_channel
from .errors import (
    BadLabel,
    DegenerateSplit,
    Empty,
    IncompatibleInput,
    LengthMismatch,
    SingleClass,
    ValidationError,
)

REPORT_SCHEMA_VERSION = 1

MODELS = ("gbdt", "minirocket")


@dataclass(frozen=True)
class SplitPlan:
    """One iteration's repartition: seed defaults to the iteration number."""

    iteration: int
    n_total: int
    train_fraction: float = 0.7
    seed: int = None

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValidationError("train_fraction must be in (0, 1)")
        if self.iteration < 0:
            raise ValidationError("iteration must be >= 0")
        if self.seed is None:
            object.__setattr__(self, "seed", self.iteration)


def split(plan: SplitPlan):
    """Deterministic shuffle split: first floor(fraction * n) indices train."""
    n = plan.n_total
    if n < 2:
        raise DegenerateSplit(f"cannot split {n} instance(s)")
    n_train = int(plan.train_fraction * n)
    if n_train == 0 or n_train == n:
        raise DegenerateSplit(
            f"fraction {plan.train_fraction} leaves an empty side for n={n}"
        )
    perm = np.random.default_rng(plan.seed).permutation(n)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def split_subject_disjoint(plan: SplitPlan, subjects):
    """Optional variant keeping subjects disjoint across the two sides.

    Subjects are shuffled with the plan seed and assigned to the train side
    until it holds at least floor(fraction * n) instances.
    """
    subjects = np.asarray(subjects)
    if subjects.shape[0] != plan.n_total:
        raise LengthMismatch("subjects length != n_total")
    rng = np.random.default_rng(plan.seed)
    ids = rng.permutation(np.unique(subjects))
    target = int(plan.train_fraction * plan.n_total)
    train_subjects = []
    count = 0
    for s in ids:
        if count >= target:
            break
        train_subjects.append(s)
        count += int((subjects == s).sum())
    mask = np.isin(subjects, train_subjects)
    train_idx = np.flatnonzero(mask)
    test_idx = np.flatnonzero(~mask)
    if train_idx.size == 0 or test_idx.size == 0:
        raise DegenerateSplit("subject-disjoint split left one side empty")
    return train_idx, test_idx


def split_stratified(plan: SplitPlan, labels):
    """Optional variant splitting each class separately at the fraction."""
    labels = np.asarray(labels)
    if labels.shape[0] != plan.n_total:
        raise LengthMismatch("labels length != n_total")
    rng = np.random.default_rng(plan.seed)
    train_parts, test_parts = [], []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        perm = idx[rng.permutation(idx.shape[0])]
        k = int(plan.train_fraction * idx.shape[0])
        train_parts.append(perm[:k])
        test_parts.append(perm[k:])
    train_idx = np.sort(np.concatenate(train_parts))
    test_idx = np.sort(np.concatenate(test_parts))
    if train_idx.size == 0 or test_idx.size == 0:
        raise DegenerateSplit("stratified split left one side empty")
    return train_idx, test_idx


# -- metrics -----------------------------------------------------------------

def accuracy(y_true, y_pred) -> float:
    """Fraction of correctly predicted instances."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise LengthMismatch(f"{y_true.shape} vs {y_pred.shape}")
    if y_true.size == 0:
        raise Empty("accuracy of an empty set is undefined")
    return float((y_true == y_pred).mean())


def _confusion_counts(y_true, y_pred, n_classes):
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    for name, y in (("y_true", y_true), ("y_pred", y_pred)):
        if y.size and (y.min() < 1 or y.max() > n_classes):
            raise BadLabel(f"{name} contains labels outside 1..{n_classes}")
    flat = (y_true - 1) * n_classes + (y_pred - 1)
    return np.bincount(flat, minlength=n_classes * n_classes).reshape(
        n_classes, n_classes
    )


def macro_f1(y_true, y_pred, n_classes=N_CLASSES) -> float:
    """Unweighted mean of per-class F1 over all ``n_classes`` classes.

    A class with no true and/or no predicted positives contributes F1 = 0
    (the zero-division rule), including classes absent from the data.
    """
    y_true = np.asarray(y_true)
    if y_true.size == 0:
        raise Empty("macro_f1 of an empty set is undefined")
    if y_true.shape != np.asarray(y_pred).shape:
        raise LengthMismatch("macro_f1 needs equal-length label vectors")
    counts = _confusion_counts(y_true, y_pred, n_classes)
    tp = np.diag(counts).astype(np.float64)
    predicted = counts.sum(axis=0).astype(np.float64)
    actual = counts.sum(axis=1).astype(np.float64)
    denom = predicted + actual
    with np.errstate(divide="ignore", invalid="ignore"):
        f1 = np.where(denom > 0, 2.0 * tp / np.where(denom > 0, denom, 1.0), 0.0)
    return float(f1.mean())


def _binary_auc(scores, positives):
    """Rank-based AUC with ties counted as one half."""
    ranks = rankdata(scores)
    n_pos = int(positives.sum())
    n_neg = positives.shape[0] - n_pos
    rank_sum = float(ranks[positives].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def ovo_auc(y_true, scores) -> float:
    """One-vs-one AUC: mean over unordered class pairs present in y_true.

    For pair (a, b) the instances of the two classes are ranked twice, once
    by class a's score column (a positive) and once by class b's (b
    positive); the pair's AUC is the mean of the two directions.
    """
    y_true = np.asarray(y_true, dtype=np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 2 or scores.shape[0] != y_true.shape[0]:
        raise LengthMismatch("scores must be (n, n_classes) aligned with y_true")
    present = np.unique(y_true)
    if present.shape[0] < 2:
        raise SingleClass("one-vs-one AUC needs at least 2 classes present")
    if present.min() < 1 or present.max() > scores.shape[1]:
        raise BadLabel(f"labels must lie in 1..{scores.shape[1]}")

    total = 0.0
    n_pairs = 0
    for a, b in combinations(present.tolist(), 2):
        mask = (y_true == a) | (y_true == b)
        is_a = y_true[mask] == a
        auc_a = _binary_auc(scores[mask, a - 1], is_a)
        auc_b = _binary_auc(scores[mask, b - 1], ~is_a)
        total += (auc_a + auc_b) / 2.0
        n_pairs += 1
    return total / n_pairs


@dataclass
class ConfusionMatrix:
    """Counts accumulated over iterations; rows true, columns predicted."""

    counts: np.ndarray = field(
        default_factory=lambda: np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    )

    @property
    def n_classes(self):
        return self.counts.shape[0]

    def add(self, y_true, y_pred):
        self.counts += _confusion_counts(y_true, y_pred, self.n_classes)

    def percent(self) -> np.ndarray:
        total = self.counts.sum()
        if total == 0:
            return np.zeros_like(self.counts, dtype=np.float64)
        return self.counts / total * 100.0

    def pair_mass(self, a, b) -> int:
        """Off-diagonal confusion mass of the unordered pair (a, b), 1-based."""
        return int(self.counts[a - 1, b - 1] + self.counts[b - 1, a - 1])

    def largest_confused_pair(self):
        """The unordered class pair with the most off-diagonal mass."""
        best, best_mass = None, -1
        for a in range(1, self.n_classes + 1):
            for b in range(a + 1, self.n_classes + 1):
                mass = self.pair_mass(a, b)
                if mass > best_mass:
                    best, best_mass = (a, b), mass
        return best, best_mass


@dataclass
class EvalReport:
    """Per-iteration metrics, aggregates, confusion and timing for one run."""

    model: str
    input: str
    iterations: int
    train_fraction: float
    seed_base: int
    split_mode: str
    n_total: int
    model_params: dict
    accuracy: np.ndarray
    macro_f1: np.ndarray
    ovo_auc: np.ndarray
    train_time_s: np.ndarray
    predict_time_s: np.ndarray
    confusion: ConfusionMatrix

    METRICS = ("accuracy", "macro_f1", "ovo_auc")

    def aggregate(self, metric):
        """(mean, population std) of a per-iteration metric."""
        values = getattr(self, metric)
        return float(np.mean(values)), float(np.std(values))

    def total_train_time(self):
        return float(np.sum(self.train_time_s))

    def to_json_dict(self) -> dict:
        from . import __version__

        agg = {}
        for m in self.METRICS:
            mean, std = self.aggregate(m)
            agg[m] = {"mean": mean, "std": std}
        agg["train_time_s"] = {
            "total": self.total_train_time(),
            "mean": float(np.mean(self.train_time_s)),
        }
        return {
            "format": "harbench-report",
            "schema_version": REPORT_SCHEMA_VERSION,
            "library_version": __version__,
            "model": self.model,
            "input": self.input,
            "iterations": self.iterations,
            "train_fraction": self.train_fraction,
            "seed_base": self.seed_base,
            "split_mode": self.split_mode,
            "n_total": self.n_total,
            "model_params": self.model_params,
            "per_iteration": {
                "accuracy": self.accuracy.tolist(),
                "macro_f1": self.macro_f1.tolist(),
                "ovo_auc": self.ovo_auc.tolist(),
                "train_time_s": self.train_time_s.tolist(),
                "predict_time_s": self.predict_time_s.tolist(),
            },
            "aggregate": agg,
            "confusion_counts": self.confusion.counts.tolist(),
            "confusion_percent": self.confusion.percent().tolist(),
        }

    @classmethod
    def from_json_dict(cls, doc) -> "EvalReport":
        if doc.get("format") != "harbench-report":
            raise ValidationError(f"not a report document: {doc.get('format')!r}")
        per = doc["per_iteration"]
        return cls(
            model=doc["model"],
            input=doc["input"],
            iterations=doc["iterations"],
            train_fraction=doc["train_fraction"],
            seed_base=doc["seed_base"],
            split_mode=doc["split_mode"],
            n_total=doc["n_total"],
            model_params=doc["model_params"],
            accuracy=np.array(per["accuracy"]),
            macro_f1=np.array(per["macro_f1"]),
            ovo_auc=np.array(per["ovo_auc"]),
            train_time_s=np.array(per["train_time_s"]),
            predict_time_s=np.array(per["predict_time_s"]),
            confusion=ConfusionMatrix(np.array(doc["confusion_counts"], dtype=np.int64)),
        )

    def to_csv(self) -> str:
        """One row per iteration plus an aggregate row in Table-style layout."""
        lines = ["iteration,accuracy,f1,auc,train_time_s,predict_time_s"]
        for i in range(self.iterations):
            lines.append(
                f"{i},{self.accuracy[i]:.6f},{self.macro_f1[i]:.6f},"
                f"{self.ovo_auc[i]:.6f},{self.train_time_s[i]:.3f},"
                f"{self.predict_time_s[i]:.3f}"
            )
        cells = ["aggregate"]
        for m in self.METRICS:
            mean, std = self.aggregate(m)
            cells.append(f"{mean:.4f}±{std:.4f}")
        cells.append(f"{self.total_train_time():.3f}")
        cells.append(f"{float(np.sum(self.predict_time_s)):.3f}")
        lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def confusion_csv(self) -> str:
        """Percent confusion matrix with activity-name headers."""
        names = [ACTIVITY_NAMES[c] for c in range(1, self.confusion.n_classes + 1)]
        lines = ["true\\predicted," + ",".join(names)]
        pct = self.confusion.percent()
        for i, name in enumerate(names):
            lines.append(name + "," + ",".join(f"{v:.6f}" for v in pct[i]))
        return "\n".join(lines) + "\n"

    def write(self, out_dir):
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(self.to_json_dict(), indent=2))
        (out / "report.csv").write_text(self.to_csv())
        (out / "confusion.csv").write_text(self.confusion_csv())
        return out


# -- the driver ---------------------------------------------------------------

def resolve_input(bundle: DatasetBundle, input_spec: str) -> np.ndarray:
    """Map an input tag to its instance matrix."""
    if input_spec == "precomputed":
        return bundle.features.values
    if input_spec.startswith("channel:"):
        return select_channel(bundle, input_spec.split(":", 1)[1])
    raise ValidationError(
        f"unknown input {input_spec!r}; use 'precomputed' or 'channel:<name>'"
    )


def _check_combination(model: str, input_spec: str):
    if model not in MODELS:
        raise ValidationError(f"unknown model {model!r}; use one of {MODELS}")
    if model == "gbdt" and input_spec != "precomputed":
        raise IncompatibleInput(
            "gbdt consumes the precomputed feature matrix only; raw channels "
            "are a minirocket input"
        )


def _fit_predict(model, X_train, y_train, X_test, seed, params):
    """Fit one model and score the test side; returns labels and (n, 6) scores."""
    params = dict(params or {})
    if model == "gbdt":
        cfg = gbdt.TrainConfig(seed=seed, **params)
        t0 = time.perf_counter()
        fitted = gbdt.train(X_train, y_train, cfg)
        t_fit = time.perf_counter() - t0
        t0 = time.perf_counter()
        labels, scores = gbdt.predict(fitted, X_test)
        t_pred = time.perf_counter() - t0
        classes = fitted.classes
    else:
        t0 = time.perf_counter()
        fitted = minirocket.fit(X_train, y_train, seed=seed, **params)
        t_fit = time.perf_counter() - t0
        t0 = time.perf_counter()
        labels, scores = minirocket.predict(fitted, X_test)
        t_pred = time.perf_counter() - t0
        classes = fitted.classes

    full = np.zeros((scores.shape[0], N_CLASSES))
    for j, c in enumerate(classes):
        full[:, int(c) - 1] = scores[:, j]
    return labels, full, t_fit, t_pred


def run_mccv(
    bundle: DatasetBundle,
    model: str,
    input_spec: str = "precomputed",
    iterations: int = 10,
    train_fraction: float = 0.7,
    seed_base: int = 0,
    model_params: dict = None,
    split_mode: str = "instance",
) -> EvalReport:
    """Monte Carlo cross-validation of one (model, input) combination.

    Iteration i splits with seed ``seed_base + i`` and hands the same seed
    to the model, so reports are bit-reproducible apart from wall-clock
    timing. GBDT class probabilities and ridge decision scores both feed
    the one-vs-one AUC.
    """
    _check_combination(model, input_spec)
    if iterations < 1:
        raise ValidationError("iterations must be >= 1")
    if split_mode not in ("instance", "subject", "stratified"):
        raise ValidationError("split_mode must be instance, subject or stratified")
    X = resolve_input(bundle, input_spec)
    y = bundle.labels

    acc = np.empty(iterations)
    f1 = np.empty(iterations)
    auc = np.empty(iterations)
    t_fit = np.empty(iterations)
    t_pred = np.empty(iterations)
    confusion = ConfusionMatrix()

    for i in range(iterations):
        plan = SplitPlan(
            iteration=i,
            n_total=bundle.n_total,
            train_fraction=train_fraction,
            seed=seed_base + i,
        )
        if split_mode == "instance":
            train_idx, test_idx = split(plan)
        elif split_mode == "subject":
            train_idx, test_idx = split_subject_disjoint(plan, bundle.subjects)
        else:
            train_idx, test_idx = split_stratified(plan, y)

        labels, scores, fit_s, pred_s = _fit_predict(
            model, X[train_idx], y[train_idx], X[test_idx], plan.seed, model_params
        )
        y_test = y[test_idx]
        acc[i] = accuracy(y_test, labels)
        f1[i] = macro_f1(y_test, labels)
        auc[i] = ovo_auc(y_test, scores)
        t_fit[i] = fit_s
        t_pred[i] = pred_s
        confusion.add(y_test, labels)

    return EvalReport(
        model=model,
        input=input_spec,
        iterations=iterations,
        train_fraction=train_fraction,
        seed_base=seed_base,
        split_mode=split_mode,
        n_total=bundle.n_total,
        model_params=dict(model_params or {}),
        accuracy=acc,
        macro_f1=f1,
        ovo_auc=auc,
        train_time_s=t_fit,
        predict_time_s=t_pred,
        confusion=confusion,
    )
