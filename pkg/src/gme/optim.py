"""Small optimization utilities: simplex projection and derivative checks."""

from __future__ import annotations

import numpy as np


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of ``v`` onto ``{p : p >= 0, sum(p) = 1}``.

    Sort-based algorithm: find the largest k such that the top-k entries,
    shifted by a common threshold, stay positive and sum to one.
    """
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, v.size + 1)
    mask = u - css / ks > 0
    k = ks[mask][-1]
    theta = css[k - 1] / k
    return np.maximum(v - theta, 0.0)


def finite_difference_gradient(func, x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of a scalar function of a real vector."""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for j in range(x.size):
        xp = x.copy()
        xp[j] = x[j] + step
        fplus = func(xp)
        xp[j] = x[j] - step
        fminus = func(xp)
        grad[j] = (fplus - fminus) / (2.0 * step)
    return grad


def relative_gradient_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """``||a - n|| / max(||n||, 1)`` as a scale-aware agreement measure."""
    analytic = np.asarray(analytic, dtype=float)
    numeric = np.asarray(numeric, dtype=float)
    denom = max(float(np.linalg.norm(numeric)), 1.0)
    return float(np.linalg.norm(analytic - numeric)) / denom
