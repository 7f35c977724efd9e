"""Lloyd's k-means with deterministic k-means++ seeding.

Written in-house so results are reproducible from (points, k, seed)
alone: ties in the nearest-centroid step go to the lowest centroid
index, and an empty cluster is repaired by seizing the point currently
farthest from its assigned centroid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class KMeansResult:
    assignments: np.ndarray
    centroids: np.ndarray
    inertia: float
    n_iter: int
    #: inertia after each assignment pass; non-increasing
    history: list = field(default_factory=list)


def _plusplus_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centroids = np.empty((k, x.shape[1]), dtype=float)
    centroids[0] = x[int(rng.integers(n))]
    d2 = ((x - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:  # all remaining points coincide with a centroid
            idx = int(rng.integers(n))
        centroids[j] = x[idx]
        d2 = np.minimum(d2, ((x - centroids[j]) ** 2).sum(axis=1))
    return centroids


def kmeans(points, k: int, seed: int, max_iter: int = 100) -> KMeansResult:
    """Cluster points (n x d) into k groups.

    Deterministic given (points, k, seed).  The returned assignments are
    a fixed point of the returned centroids, and the recorded inertia
    history is non-increasing.
    """
    x = np.asarray(points, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"points must be an n x d matrix, got shape {x.shape}")
    n, d = x.shape
    if n < 1 or d < 1:
        raise ValueError(f"points must be non-empty, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise ValueError("points must be finite")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}, got {k}")
    if max_iter < 1:
        raise ValueError("max_iter must be positive")

    rng = np.random.default_rng(seed)
    centroids = _plusplus_init(x, k, rng)
    history: list[float] = []
    prev = None
    assignments = None
    for it in range(max_iter):
        dist2 = ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        assignments = np.argmin(dist2, axis=1)  # ties -> lowest index
        counts = np.bincount(assignments, minlength=k)
        if (counts == 0).any():
            point_d2 = dist2[np.arange(n), assignments]
            for j in np.flatnonzero(counts == 0):
                p = int(np.argmax(point_d2))
                centroids[j] = x[p]
                point_d2[p] = 0.0
            dist2 = ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
            assignments = np.argmin(dist2, axis=1)
        history.append(float(dist2[np.arange(n), assignments].sum()))
        if prev is not None and np.array_equal(assignments, prev):
            break
        prev = assignments
        if it < max_iter - 1:  # keep the final assignment consistent
            for j in range(k):
                members = x[assignments == j]
                if len(members):
                    centroids[j] = members.mean(axis=0)
    return KMeansResult(assignments, centroids, history[-1], len(history), history)
