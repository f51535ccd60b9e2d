"""K-means clustering of chunk embeddings.

Rows are L2-normalized before clustering, so Euclidean k-means approximates
spherical (cosine) clustering and stays consistent with the cosine geometry
used everywhere else. Initialization is k-means++ driven by an explicit seed;
everything is deterministic for a fixed (matrix, k, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .geometry import as_matrix, normalize_rows


@dataclass(frozen=True)
class ClusterModel:
    """K-means result over n chunks.

    ``members[c]`` lists the chunk indices of cluster c; member sets
    partition 0..n-1 and no cluster is empty. ``centroids[c]`` is the mean of
    its members' normalized embeddings. ``inertia_trace`` records the
    within-cluster sum of squared distances after each assignment step of the
    winning restart (non-increasing by construction).
    """

    k: int
    assignments: np.ndarray
    centroids: np.ndarray
    members: list[np.ndarray]
    sizes: np.ndarray
    seed: int
    inertia_trace: list[float] = field(default_factory=list)


def choose_k(n: int, requested: int | None = None) -> int:
    """Cluster-count default: clamp(round(sqrt(n/2)), 2, 25), or the
    requested value clamped to [1, n]."""
    if n < 2:
        raise DataError(f"corpus too small to cluster (n={n})")
    if requested is not None:
        return max(1, min(int(requested), n))
    return max(2, min(int(math.floor(math.sqrt(n / 2.0) + 0.5)), 25))


def _squared_distances(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # ||x - c||^2 expanded; clip guards tiny negative round-off
    sq = (
        np.einsum("ij,ij->i", x, x)[:, None]
        - 2.0 * x @ centroids.T
        + np.einsum("ij,ij->i", centroids, centroids)[None, :]
    )
    return np.clip(sq, 0.0, None)


def _kmeans_pp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centroids = np.empty((k, x.shape[1]))
    centroids[0] = x[rng.integers(n)]
    best = _squared_distances(x, centroids[:1])[:, 0]
    for c in range(1, k):
        total = best.sum()
        if total <= 0.0:
            idx = int(rng.integers(n))  # all points coincide with a centroid
        else:
            idx = int(rng.choice(n, p=best / total))
        centroids[c] = x[idx]
        best = np.minimum(best, _squared_distances(x, centroids[c : c + 1])[:, 0])
    return centroids


def _lloyd(
    x: np.ndarray, k: int, rng: np.random.Generator, max_iter: int
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    n = x.shape[0]
    centroids = _kmeans_pp_init(x, k, rng)
    labels = np.full(n, -1)
    trace: list[float] = []
    for _ in range(max_iter):
        d2 = _squared_distances(x, centroids)
        new_labels = d2.argmin(axis=1)
        # Repair empty clusters by stealing the point farthest from its
        # centroid; processed in cluster-id order for determinism.
        for cid in range(k):
            if np.any(new_labels == cid):
                continue
            point_d2 = d2[np.arange(n), new_labels]
            far = int(np.argmax(point_d2))
            centroids[cid] = x[far]
            new_labels[far] = cid
            d2 = _squared_distances(x, centroids)
        trace.append(float(d2[np.arange(n), new_labels].sum()))
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for cid in range(k):
            centroids[cid] = x[labels == cid].mean(axis=0)
    return labels, centroids, trace


def kmeans(
    embeddings,
    k: int,
    seed: int = 0,
    max_iter: int = 300,
    n_init: int = 10,
) -> ClusterModel:
    """Cluster embedding rows into k groups.

    Runs ``n_init`` independent k-means++ restarts (seeds derived from
    ``seed``) and keeps the one with the lowest final inertia, which makes
    the well-separated-blob case reliable without sacrificing determinism.
    """
    x = as_matrix(embeddings)
    n = x.shape[0]
    if not 1 <= k <= n:
        raise DataError(f"k must be in [1, {n}], got {k}")
    if max_iter < 1 or n_init < 1:
        raise DataError("max_iter and n_init must be >= 1")
    x = normalize_rows(x)

    best: tuple[np.ndarray, np.ndarray, list[float]] | None = None
    for init in range(n_init):
        rng = np.random.default_rng([seed, init])
        labels, centroids, trace = _lloyd(x, k, rng, max_iter)
        if best is None or trace[-1] < best[2][-1]:
            best = (labels, centroids, trace)
    labels, _, trace = best

    members = [np.flatnonzero(labels == cid) for cid in range(k)]
    centroids = np.vstack([x[m].mean(axis=0) for m in members])
    return ClusterModel(
        k=k,
        assignments=labels,
        centroids=centroids,
        members=members,
        sizes=np.array([m.size for m in members]),
        seed=seed,
        inertia_trace=trace,
    )
