"""Gradient-boosted decision trees for multiclass classification.

Second-order boosting on the softmax objective: per round and class k the
gradients are ``g_i = p_ik - [y_i = k]`` and hessians ``h_i = p_ik (1 - p_ik)``.
Split quality uses the regularized gain

    0.5 * [ T(G_L)^2/(H_L+l2) + T(G_R)^2/(H_R+l2) - T(G)^2/(H+l2) ] - gamma

where T soft-thresholds the gradient sum by the L1 strength, and leaves take
``-T(G)/(H+l2)`` scaled by the learning rate. Split finding is
histogram-based over per-feature quantile bins computed once from the
training split (missing values occupy a dedicated bin and are routed to
whichever side scores better, the direction being stored in the node); an
exact greedy mode over raw values is retained as an independent
cross-check. Training is deterministic given (data, config): ties between
equal-gain splits resolve to the lowest feature index, then the lowest
threshold, and parallel histogram accumulation partitions work by feature
so no reduction order varies.
"""

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from numba import njit, prange

from .errors import (
    DimensionMismatch,
    EmptyData,
    NonFiniteLabelOrFeature,
    SchemaVersionMismatch,
    SingleClass,
    ValidationError,
)

MAX_BINS = 256


@dataclass(frozen=True)
class TrainConfig:
    rounds: int = 100
    max_depth: int = 6
    eta: float = 0.3
    lambda_l2: float = 1.0
    alpha_l1: float = 0.0
    gamma: float = 0.0
    min_child_weight: float = 1.0
    n_bins: int = MAX_BINS
    seed: int = 0
    tree_method: str = "hist"

    def __post_init__(self):
        if self.rounds < 0:
            raise ValidationError("rounds must be >= 0")
        if self.max_depth < 1:
            raise ValidationError("max_depth must be >= 1")
        if not 0 < self.eta:
            raise ValidationError("eta must be positive")
        if self.lambda_l2 < 0 or self.alpha_l1 < 0 or self.gamma < 0:
            raise ValidationError("regularization strengths must be >= 0")
        if self.min_child_weight < 0:
            raise ValidationError("min_child_weight must be >= 0")
        if not 2 <= self.n_bins <= MAX_BINS:
            raise ValidationError(f"n_bins must be in 2..{MAX_BINS}")
        if self.tree_method not in ("hist", "exact"):
            raise ValidationError("tree_method must Be 'hist' or 'exact'")


@dataclass(frozen=True)
class TreeNode:
    """Introspection view of one node: a split or a leaf."""

    feature: int = -1
    threshold: float = 0.0
    default_goes_left: bool = False
    left: object = None
    right: object = None
    weight: float = 0.0

    @property
    def is_leaf(self):
        return self.feature < 0


# Gains below this are treated as zero; guards float noise on pure nodes.
_MIN_GAIN = 1e-12


@njit(cache=True)
def _soft_threshold(g, alpha):
    if g > alpha:
        return g - alpha
    if g < -alpha:
        return g + alpha
    return 0.0


@njit(cache=True)
def leaf_weight(g_sum, h_sum, lambda_l2, alpha_l1=0.0, eta=1.0):
    """Optimal leaf value: -T(G)/(H + l2), scaled by the learning rate."""
    return -eta * _soft_threshold(g_sum, alpha_l1) / (h_sum + lambda_l2)


@njit(cache=True)
def _gain_term(g, h, lambda_l2, alpha_l1):
    t = _soft_threshold(g, alpha_l1)
    return t * t / (h + lambda_l2)


@njit(cache=True)
def split_gain(g_left, h_left, g_right, h_right, lambda_l2, alpha_l1=0.0, gamma=0.0):
    """Loss reduction of a candidate split (before the left/right structure)."""
    parent = _gain_term(g_left + g_right, h_left + h_right, lambda_l2, alpha_l1)
    left = _gain_term(g_left, h_left, lambda_l2, alpha_l1)
    right = _gain_term(g_right, h_right, lambda_l2, alpha_l1)
    return 0.5 * (left + right - parent) - gamma


@njit(cache=True, parallel=True)
def _build_hist(binned, rows, g, h, n_bins):
    d = binned.shape[0]
    hist_g = np.zeros((d, n_bins))
    hist_h = np.zeros((d, n_bins))
    for f in prange(d):
        for ri in range(rows.shape[0]):
            i = rows[ri]
            b = binned[f, i]
            hist_g[f, b] += g[i]
            hist_h[f, b] += h[i]
    return hist_g, hist_h


@njit(cache=True)
def _best_split_hist(
    hist_g, hist_h, n_split_points, g_sum, h_sum,
    lambda_l2, alpha_l1, gamma, min_child_weight, missing_bin,
):
    """Scan all (feature, bin, missing-direction) candidates.

    Returns (feature, bin, missing_left, gain); feature is -1 when no
    candidate improves on the leaf. Features and bins are scanned in
    ascending order and better-only comparisons keep the first optimum, so
    ties resolve to the lowest feature then the lowest threshold.
    """
    d = hist_g.shape[0]
    best_f = -1
    best_bin = -1
    best_missing_left = False
    best_gain = _MIN_GAIN

    for f in range(d):
        g_miss = hist_g[f, missing_bin]
        h_miss = hist_h[f, missing_bin]
        g_left = 0.0
        h_left = 0.0
        for b in range(n_split_points[f]):
            g_left += hist_g[f, b]
            h_left += hist_h[f, b]
            # missing goes right
            h_r = h_sum - h_left
            if h_left >= min_child_weight and h_r >= min_child_weight:
                gain = split_gain(
                    g_left, h_left, g_sum - g_left, h_r, lambda_l2, alpha_l1, gamma
                )
                if gain > best_gain:
                    best_gain = gain
                    best_f = f
                    best_bin = b
                    best_missing_left = False
            # missing goes left
            g_l = g_left + g_miss
            h_l = h_left + h_miss
            h_r = h_sum - h_l
            if h_l >= min_child_weight and h_r >= min_child_weight:
                gain = split_gain(
                    g_l, h_l, g_sum - g_l, h_r, lambda_l2, alpha_l1, gamma
                )
                if gain > best_gain:
                    best_gain = gain
                    best_f = f
                    best_bin = b
                    best_missing_left = True
    return best_f, best_bin, best_missing_left, best_gain


@njit(cache=True)
def _partition_rows(binned_f, rows, split_bin, missing_left, missing_bin):
    """Stable partition of a node's rows by one binned feature."""
    n_left = 0
    for ri in range(rows.shape[0]):
        b = binned_f[rows[ri]]
        if (b == missing_bin and missing_left) or (b != missing_bin and b <= split_bin):
            n_left += 1
    left = np.empty(n_left, dtype=np.int64)
    right = np.empty(rows.shape[0] - n_left, dtype=np.int64)
    li = 0
    ri_out = 0
    for ri in range(rows.shape[0]):
        i = rows[ri]
        b = binned_f[i]
        if (b == missing_bin and missing_left) or (b != missing_bin and b <= split_bin):
            left[li] = i
            li += 1
        else:
            right[ri_out] = i
            ri_out += 1
    return left, right


@njit(cache=True, parallel=True)
def _accumulate_margins(
    X, margins, tree_class,
    node_feature, node_threshold, node_default_left, node_left, node_right,
    node_weight, tree_offsets,
):
    n = X.shape[0]
    n_trees = tree_offsets.shape[0] - 1
    for i in prange(n):
        for t in range(n_trees):
            node = tree_offsets[t]
            while node_feature[node] >= 0:
                v = X[i, node_feature[node]]
                if np.isnan(v):
                    node = node_left[node] if node_default_left[node] else node_right[node]
                elif v <= node_threshold[node]:
                    node = node_left[node]
                else:
                    node = node_right[node]
            margins[i, tree_class[t]] += node_weight[node]


class _Binner:
    """Per-feature quantile bins; bin edges are fixed by the training split.

    Values map to bins by counting split points strictly below them, so the
    training-time decision "bin <= b goes left" and the predict-time rule
    "x <= split_points[b] goes left" agree exactly. Missing values share one
    dedicated bin (the highest index).
    """

    def __init__(self, n_bins):
        self.n_bins = n_bins
        self.missing_bin = n_bins - 1
        self.split_points = []

    def fit(self, X):
        n_finite_bins = self.n_bins - 1
        for f in range(X.shape[1]):
            col = X[:, f]
            finite = col[~np.isnan(col)]
            uniq = np.unique(finite)
            if uniq.shape[0] <= 1:
                sp = np.empty(0)
            elif uniq.shape[0] <= n_finite_bins:
                sp = (uniq[:-1] + uniq[1:]) / 2.0
            else:
                qs = np.quantile(
                    finite, np.arange(1, n_finite_bins) / n_finite_bins, method="linear"
                )
                sp = np.unique(qs)
            self.split_points.append(sp)
        return self

    def transform(self, X):
        n, d = X.shape
        binned = np.empty((d, n), dtype=np.uint8)
        for f in range(d):
            col = X[:, f]
            nan_mask = np.isnan(col)
            b = np.searchsorted(self.split_points[f], col, side="left")
            b[nan_mask] = self.missing_bin
            binned[f] = b.astype(np.uint8)
        return np.ascontiguousarray(binned)


@dataclass
class GbdtEnsemble:
    """Boosted trees in flat-array form, rounds * n_classes of them."""

    classes: np.ndarray
    base_scores: np.ndarray
    config: TrainConfig
    importance: np.ndarray
    n_features: int
    node_feature: np.ndarray
    node_threshold: np.ndarray
    node_default_left: np.ndarray
    node_left: np.ndarray
    node_right: np.ndarray
    node_weight: np.ndarray
    tree_offsets: np.ndarray
    tree_class: np.ndarray
    train_loss_per_round: np.ndarray = field(default=None, repr=False)

    @property
    def n_trees(self):
        return self.tree_offsets.shape[0] - 1

    def tree_nodes(self, t) -> TreeNode:
        """Nested TreeNode view of tree ``t`` (for inspection and tests)."""
        lo, hi = self.tree_offsets[t], self.tree_offsets[t + 1]

        def build(node):
            if self.node_feature[node] < 0:
                return TreeNode(weight=float(self.node_weight[node]))
            return TreeNode(
                feature=int(self.node_feature[node]),
                threshold=float(self.node_threshold[node]),
                default_goes_left=bool(self.node_default_left[node]),
                left=build(self.node_left[node]),
                right=build(self.node_right[node]),
            )

        if hi == lo:
            return TreeNode(weight=0.0)
        return build(lo)


class _TreeBuilder:
    """Accumulates one tree's nodes in creation order."""

    def __init__(self):
        self.feature = []
        self.threshold = []
        self.default_left = []
        self.left = []
        self.right = []
        self.weight = []

    def add(self):
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.default_left.append(False)
        self.left.append(-1)
        self.right.append(-1)
        self.weight.append(0.0)
        return len(self.feature) - 1

    def set_split(self, node, feature, threshold, default_left, left, right):
        self.feature[node] = feature
        self.threshold[node] = threshold
        self.default_left[node] = default_left
        self.left[node] = left
        self.right[node] = right

    def set_leaf(self, node, weight):
        self.weight[node] = weight


def _softmax(margins):
    z = margins - margins.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def softmax_gradients(margins, y_idx):
    """Per-class gradients and hessians of the multiclass log-loss."""
    p = _softmax(margins)
    onehot = np.zeros_like(p)
    onehot[np.arange(p.shape[0]), y_idx] = 1.0
    return p - onehot, p * (1.0 - p)


def _log_loss(margins, y_idx):
    z = margins - margins.max(axis=1, keepdims=True)
    log_p = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    return float(-log_p[np.arange(len(y_idx)), y_idx].mean())


def _best_split_exact(X, rows, g, h, cfg):
    """Greedy scan over raw values; the independent oracle for hist mode."""
    g_sum = float(g[rows].sum())
    h_sum = float(h[rows].sum())
    best = (-1, 0.0, False, _MIN_GAIN)
    for f in range(X.shape[1]):
        vals = X[rows, f]
        finite = ~np.isnan(vals)
        vf = vals[finite]
        if vf.shape[0] < 2:
            continue
        order = np.argsort(vf, kind="stable")
        vs = vf[order]
        gs = np.cumsum(g[rows][finite][order])
        hs = np.cumsum(h[rows][finite][order])
        g_miss = float(g[rows][~finite].sum())
        h_miss = float(h[rows][~finite].sum())
        for i in np.flatnonzero(vs[1:] != vs[:-1]):
            threshold = (vs[i] + vs[i + 1]) / 2.0
            for missing_left in (False, True):
                g_l = gs[i] + (g_miss if missing_left else 0.0)
                h_l = hs[i] + (h_miss if missing_left else 0.0)
                h_r = h_sum - h_l
                if h_l < cfg.min_child_weight or h_r < cfg.min_child_weight:
                    continue
                gain = split_gain(
                    g_l, h_l, g_sum - g_l, h_r, cfg.lambda_l2, cfg.alpha_l1, cfg.gamma
                )
                if gain > best[3]:
                    best = (f, float(threshold), missing_left, float(gain))
    return best


def _grow_tree(cfg, X, binned, split_points, n_split_points, rows_all, g, h, importance):
    """Grow one tree; returns (builder, delta) with per-row weight updates."""
    tree = _TreeBuilder()
    delta = np.zeros(X.shape[0])
    hist_mode = cfg.tree_method == "hist"
    missing_bin = cfg.n_bins - 1
    n_bins = cfg.n_bins

    root = tree.add()
    root_hist = (
        _build_hist(binned, rows_all, g, h, n_bins) if hist_mode else None
    )
    stack = [
        {
            "id": root,
            "rows": rows_all,
            "depth": 0,
            "g": float(g[rows_all].sum()),
            "h": float(h[rows_all].sum()),
            "hist": root_hist,
        }
    ]
    while stack:
        node = stack.pop()
        rows = node["rows"]
        can_split = node["depth"] < cfg.max_depth and rows.shape[0] >= 2
        feature = -1
        if can_split:
            if hist_mode:
                hg, hh = node["hist"]
                feature, split_bin, missing_left, gain = _best_split_hist(
                    hg, hh, n_split_points, node["g"], node["h"],
                    cfg.lambda_l2, cfg.alpha_l1, cfg.gamma, cfg.min_child_weight,
                    missing_bin,
                )
                threshold = (
                    float(split_points[feature][split_bin]) if feature >= 0 else 0.0
                )
            else:
                feature, threshold, missing_left, gain = _best_split_exact(
                    X, rows, g, h, cfg
                )
        if feature < 0:
            tree.set_leaf(
                node["id"],
                leaf_weight(node["g"], node["h"], cfg.lambda_l2, cfg.alpha_l1, cfg.eta),
            )
            delta[rows] = tree.weight[node["id"]]
            node["hist"] = None
            continue

        importance[feature] += gain
        if hist_mode:
            left_rows, right_rows = _partition_rows(
                binned[feature], rows, split_bin, missing_left, missing_bin
            )
        else:
            vals = X[rows, feature]
            nan_mask = np.isnan(vals)
            go_left = np.where(nan_mask, missing_left, vals <= threshold)
            left_rows, right_rows = rows[go_left], rows[~go_left]

        left_id = tree.add()
        right_id = tree.add()
        tree.set_split(node["id"], feature, threshold, missing_left, left_id, right_id)

        children = []
        for cid, crows in ((left_id, left_rows), (right_id, right_rows)):
            children.append(
                {
                    "id": cid,
                    "rows": crows,
                    "depth": node["depth"] + 1,
                    "g": float(g[crows].sum()),
                    "h": float(h[crows].sum()),
                    "hist": None,
                }
            )
        if hist_mode:
            # build the smaller child's histogram, derive the sibling's
            small, big = (0, 1) if left_rows.shape[0] <= right_rows.shape[0] else (1, 0)
            need = [
                c["depth"] < cfg.max_depth and c["rows"].shape[0] >= 2
                for c in children
            ]
            if need[small] or need[big]:
                hs = _build_hist(binned, children[small]["rows"], g, h, n_bins)
                children[small]["hist"] = hs
                if need[big]:
                    hg, hh = node["hist"]
                    children[big]["hist"] = (hg - hs[0], hh - hs[1])
        node["hist"] = None
        stack.extend(reversed(children))
    return tree, delta


def train(features, labels, config: TrainConfig = None) -> GbdtEnsemble:
    """Fit rounds * n_classes trees on the softmax objective.

    ``features`` may contain NaN as the missing-value marker; inf anywhere
    or NaN labels are rejected. The per-round training log-loss is recorded
    on the returned ensemble (entry 0 is the loss of the base scores alone).
    """
    cfg = config or TrainConfig()
    X = np.ascontiguousarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyData("training needs an (n, d) feature matrix with n >= 1")
    if X.shape[0] < 2:
        raise EmptyData("training needs at least 2 instances")
    if np.isinf(X).any():
        raise NonFiniteLabelOrFeature("features contain inf (use NaN for missing)")
    y = np.asarray(labels)
    if not np.isfinite(np.asarray(y, dtype=np.float64)).all():
        raise NonFiniteLabelOrFeature("labels must be finite")
    classes, y_idx = np.unique(y, return_inverse=True)
    n, d = X.shape
    k_classes = classes.shape[0]
    if k_classes < 2:
        raise SingleClass(f"need at least 2 classes, got {k_classes}")

    priors = np.bincount(y_idx, minlength=k_classes) / n
    base_scores = np.log(priors)
    margins = np.tile(base_scores, (n, 1))

    binner = _Binner(cfg.n_bins).fit(X) if cfg.tree_method == "hist" else None
    if binner is not None:
        binned = binner.transform(X)
        split_points = binner.split_points
        n_split_points = np.array([len(sp) for sp in split_points], dtype=np.int64)
    else:
        binned = np.empty((d, 0), dtype=np.uint8)
        split_points = [np.empty(0)] * d
        n_split_points = np.zeros(d, dtype=np.int64)

    importance = np.zeros(d)
    rows_all = np.arange(n, dtype=np.int64)
    builders = []
    losses = [_log_loss(margins, y_idx)]

    for _ in range(cfg.rounds):
        grad, hess = softmax_gradients(margins, y_idx)
        for k in range(k_classes):
            tree, delta = _grow_tree(
                cfg, X, binned, split_points, n_split_points, rows_all,
                grad[:, k], hess[:, k], importance,
            )
            builders.append(tree)
            margins[:, k] += delta
        losses.append(_log_loss(margins, y_idx))

    offsets = np.zeros(len(builders) + 1, dtype=np.int64)
    for t, b in enumerate(builders):
        offsets[t + 1] = offsets[t] + len(b.feature)
    total = int(offsets[-1])

    def flat(attr, dtype):
        out = np.empty(total, dtype=dtype)
        for t, b in enumerate(builders):
            vals = getattr(b, attr)
            lo = offsets[t]
            out[lo : lo + len(vals)] = vals
        return out

    node_left = flat("left", np.int64)
    node_right = flat("right", np.int64)
    for t in range(len(builders)):  # child ids -> absolute node ids
        lo, hi = offsets[t], offsets[t + 1]
        seg_l = node_left[lo:hi]
        seg_r = node_right[lo:hi]
        seg_l[seg_l >= 0] += lo
        seg_r[seg_r >= 0] += lo

    return GbdtEnsemble(
        classes=classes,
        base_scores=base_scores,
        config=cfg,
        importance=importance,
        n_features=d,
        node_feature=flat("feature", np.int64),
        node_threshold=flat("threshold", np.float64),
        node_default_left=flat("default_left", np.bool_),
        node_left=node_left,
        node_right=node_right,
        node_weight=flat("weight", np.float64),
        tree_offsets=offsets,
        tree_class=np.tile(np.arange(k_classes, dtype=np.int64), cfg.rounds),
        train_loss_per_round=np.array(losses),
    )


def decision_margins(model: GbdtEnsemble, features) -> np.ndarray:
    X = np.ascontiguousarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DimensionMismatch(
            f"expected (n, {model.n_features}) features, got {X.shape}"
        )
    margins = np.tile(model.base_scores, (X.shape[0], 1))
    if model.n_trees:
        _accumulate_margins(
            X, margins, model.tree_class,
            model.node_feature, model.node_threshold, model.node_default_left,
            model.node_left, model.node_right, model.node_weight,
            model.tree_offsets,
        )
    return margins


def predict_proba(model: GbdtEnsemble, features) -> np.ndarray:
    """Softmax class probabilities; each row sums to 1."""
    return _softmax(decision_margins(model, features))


def predict(model: GbdtEnsemble, features):
    """Predicted labels and class probabilities."""
    proba = predict_proba(model, features)
    return model.classes[np.argmax(proba, axis=1)], proba


def feature_importance(model: GbdtEnsemble) -> np.ndarray:
    """Total split gain per feature; 0 for never-used features."""
    return model.importance.copy()


SCHEMA_VERSION = 1


def to_document(model: GbdtEnsemble) -> dict:
    from . import __version__

    trees = []
    for t in range(model.n_trees):
        lo, hi = int(model.tree_offsets[t]), int(model.tree_offsets[t + 1])
        rel = lambda a: [int(v - lo) if v >= 0 else -1 for v in a[lo:hi]]
        trees.append(
            {
                "feature": [int(v) for v in model.node_feature[lo:hi]],
                "threshold": [float(v) for v in model.node_threshold[lo:hi]],
                "default_left": [bool(v) for v in model.node_default_left[lo:hi]],
                "left": rel(model.node_left),
                "right": rel(model.node_right),
                "weight": [float(v) for v in model.node_weight[lo:hi]],
            }
        )
    return {
        "format": "harbench-gbdt",
        "schema_version": SCHEMA_VERSION,
        "library_version": __version__,
        "config": asdict(model.config),
        "classes": [c.item() if hasattr(c, "item") else c for c in model.classes],
        "base_scores": [float(v) for v in model.base_scores],
        "importance": [float(v) for v in model.importance],
        "n_features": model.n_features,
        "trees": trees,
    }


def from_document(doc: dict) -> GbdtEnsemble:
    if doc.get("format") != "harbench-gbdt":
        raise SchemaVersionMismatch(f"not a gbdt model: {doc.get('format')!r}")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"schema {doc.get('schema_version')} != supported {SCHEMA_VERSION}"
        )
    trees = doc["trees"]
    offsets = np.zeros(len(trees) + 1, dtype=np.int64)
    for t, tr in enumerate(trees):
        offsets[t + 1] = offsets[t] + len(tr["feature"])
    total = int(offsets[-1])

    def gather(key, dtype, absolute=False):
        out = np.empty(total, dtype=dtype)
        for t, tr in enumerate(trees):
            lo = offsets[t]
            vals = np.asarray(tr[key])
            if absolute:
                vals = np.where(vals >= 0, vals + lo, -1)
            out[lo : lo + len(vals)] = vals
        return out

    classes = np.array(doc["classes"])
    k = classes.shape[0]
    return GbdtEnsemble(
        classes=classes,
        base_scores=np.array(doc["base_scores"]),
        config=TrainConfig(**doc["config"]),
        importance=np.array(doc["importance"]),
        n_features=doc["n_features"],
        node_feature=gather("feature", np.int64),
        node_threshold=gather("threshold", np.float64),
        node_default_left=gather("default_left", np.bool_),
        node_left=gather("left", np.int64, absolute=True),
        node_right=gather("right", np.int64, absolute=True),
        node_weight=gather("weight", np.float64),
        tree_offsets=offsets,
        tree_class=np.tile(np.arange(k, dtype=np.int64), len(trees) // k if k else 0),
    )


def save(model: GbdtEnsemble, path):
    Path(path).write_text(json.dumps(to_document(model)))


def load(path) -> GbdtEnsemble:
    return from_document(json.loads(Path(path).read_text()))
