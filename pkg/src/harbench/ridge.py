"""Closed-form ridge classifier head with leave-one-out lambda selection.

One-vs-rest ridge regression on +/-1 targets. Features are standardized
with training statistics; zero-variance features are dropped and recorded.
A single symmetric eigendecomposition (of the covariance when d <= n, of
the Gram matrix otherwise) yields, for every candidate lambda, both the
exact leave-one-out residuals — via the identity
``e_loo = (y - yhat) / (1 - h_ii)`` — and the closed-form weights, so the
whole regularization path costs one decomposition plus O(n d) per lambda.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import SingleClass

DEFAULT_LAMBDA_GRID = tuple(np.logspace(-3, 3, 10))


@dataclass(frozen=True)
class RidgeHead:
    """Fitted one-vs-rest linear scorer over standardized features."""

    classes: np.ndarray
    weights: np.ndarray          # (d_kept, n_classes)
    intercepts: np.ndarray       # (n_classes,)
    feature_mean: np.ndarray     # (d,) training means
    feature_scale: np.ndarray    # (d,) training stds, 1.0 where dropped
    kept_features: np.ndarray    # indices of non-degenerate features
    lambda_chosen: float
    lambda_grid: np.ndarray
    loo_sse: np.ndarray          # summed squared LOO residuals per lambda
    n_dropped: int = 0

    @property
    def n_features_in(self):
        return self.feature_mean.shape[0]

    def decision_scores(self, features):
        features = np.asarray(features, dtype=np.float64)
        z = (features - self.feature_mean) / self.feature_scale
        return z[:, self.kept_features] @ self.weights + self.intercepts

    def predict(self, features):
        scores = self.decision_scores(features)
        return self.classes[np.argmax(scores, axis=1)], scores


def _solve_path(x, targets, grid):
    """LOO squared error per lambda plus a weight solver, one eigh total."""
    n, d = x.shape
    if d <= n:
        cov = x.T @ x
        evals, vecs = scipy.linalg.eigh(cov)
        evals = np.maximum(evals, 0.0)
        proj = x @ vecs                      # (n, d)
        t = proj.T @ targets                 # (d, k)
        proj_sq = proj**2

        def loo_sse(lam):
            inv = 1.0 / (evals + lam)
            fitted = proj @ (inv[:, None] * t)
            h = proj_sq @ (evals * inv)
            resid = (targets - fitted) / (1.0 - h)[:, None]
            return float((resid**2).sum())

        def solve(lam):
            inv = 1.0 / (evals + lam)
            return vecs @ (inv[:, None] * t)
    else:
        gram = x @ x.T
        evals, vecs = scipy.linalg.eigh(gram)
        evals = np.maximum(evals, 0.0)
        u = vecs.T @ targets                 # (n, k)
        vecs_sq = vecs**2

        def loo_sse(lam):
            inv = 1.0 / (evals + lam)
            c = vecs @ (inv[:, None] * u)    # (K + lam I)^-1 targets
            diag = vecs_sq @ inv             # diag of the inverse
            resid = c / diag[:, None]
            return float((resid**2).sum())

        def solve(lam):
            inv = 1.0 / (evals + lam)
            dual = vecs @ (inv[:, None] * u)
            return x.T @ dual

    sse = np.array([loo_sse(lam) for lam in grid])
    return sse, solve


def fit_ridge(features, labels, lambda_grid=None) -> RidgeHead:
    """Fit the head, selecting lambda by exact leave-one-out error.

    ``lambda_grid`` defaults to 10 points geometrically spaced over
    10^-3..10^3. The grid is searched once for all classes jointly (total
    LOO squared error over the one-vs-rest targets); ties resolve to the
    smallest lambda.
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels)
    classes = np.unique(labels)
    if classes.shape[0] < 2:
        raise SingleClass(f"need at least 2 classes, got {classes.shape[0]}")
    grid = np.asarray(
        DEFAULT_LAMBDA_GRID if lambda_grid is None else lambda_grid, dtype=np.float64
    )

    mean = features.mean(axis=0)
    scale = features.std(axis=0)
    kept = np.flatnonzero(scale > 0)
    safe_scale = np.where(scale > 0, scale, 1.0)
    z = ((features - mean) / safe_scale)[:, kept]

    targets = np.where(labels[:, None] == classes[None, :], 1.0, -1.0)
    t_mean = targets.mean(axis=0)
    centered = targets - t_mean

    sse, solve = _solve_path(z, centered, grid)
    best = int(np.argmin(sse))
    weights = solve(float(grid[best]))

    return RidgeHead(
        classes=classes,
        weights=weights,
        intercepts=t_mean,
        feature_mean=mean,
        feature_scale=safe_scale,
        kept_features=kept,
        lambda_chosen=float(grid[best]),
        lambda_grid=grid,
        loo_sse=sse,
        n_dropped=int(features.shape[1] - kept.shape[0]),
    )
