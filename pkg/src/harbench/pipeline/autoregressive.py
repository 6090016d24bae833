"""Autoregressive coefficient estimation by Burg's recursion.

Burg's method minimizes the combined forward/backward prediction error at
each stage via a reflection coefficient, guaranteeing |k| < 1 for
non-degenerate input. Coefficients are returned in prediction form:
an AR(1) process x[t] = 0.5 x[t-1] + e yields a first coefficient near +0.5.
"""

import numpy as np

from ..errors import SeriesTooShort, ZeroVariance

AR_ORDER = 4


def burg_batch(x, order=AR_ORDER):
    """Fit AR(order) models along the last axis.

    Returns ``(coeffs, reflections, degenerate)``: prediction-form
    coefficients ``(..., order)``, reflection coefficients per stage, and a
    boolean mask of rows whose prediction energy vanished (their
    coefficients are frozen at the last valid stage, missing stages 0).
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[-1]
    if n <= order:
        raise SeriesTooShort(f"need more than {order} samples, got {n}")
    batch_shape = x.shape[:-1]
    x2 = x.reshape(-1, n)
    m = x2.shape[0]

    f = x2.copy()
    b = x2.copy()
    a = np.zeros((m, order + 1))
    a[:, 0] = 1.0
    reflections = np.zeros((m, order))
    degenerate = np.zeros(m, dtype=bool)
    active = np.ones(m, dtype=bool)

    for stage in range(1, order + 1):
        ff = f[:, 1:]
        bb = b[:, :-1]
        num = -2.0 * np.sum(ff * bb, axis=-1)
        den = np.sum(ff * ff, axis=-1) + np.sum(bb * bb, axis=-1)
        dead = den <= 0
        degenerate |= dead & active
        active &= ~dead
        k = np.where(active, num / np.where(dead, 1.0, den), 0.0)
        reflections[:, stage - 1] = k

        a_prev = a.copy()
        for j in range(1, stage + 1):
            a[:, j] = a_prev[:, j] + k * a_prev[:, stage - j]
        f = ff + k[:, None] * bb
        b = bb + k[:, None] * ff

    coeffs = -a[:, 1:]
    return (
        coeffs.reshape(*batch_shape, order),
        reflections.reshape(*batch_shape, order),
        degenerate.reshape(batch_shape),
    )


def burg_ar_coefficients(x, order=AR_ORDER):
    """Prediction-form AR coefficients of one series (length ``order``)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("burg_ar_coefficients expects a single series")
    if np.ptp(x) == 0:
        raise ZeroVariance("Burg recursion undefined for a constant series")
    coeffs, _, degenerate = burg_batch(x[None, :], order)
    if degenerate[0]:
        raise ZeroVariance("prediction energy vanished during the recursion")
    return coeffs[0]
