"""Cosine-distance primitives.

All distances are 1 - cos(u, v), in [0, 2]. Zero-norm vectors are rejected:
a zero embedding signals an upstream provider fault, not a semantic fact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class MinDistVector:
    """Per-row minimum of a chunk-question distance matrix.

    ``argmin[i]`` is the smallest question index attaining ``values[i]``.
    """

    values: np.ndarray
    argmin: np.ndarray


def as_matrix(rows, name: str = "embeddings") -> np.ndarray:
    """Validate and coerce to a finite 2-D float64 matrix."""
    m = np.asarray(rows, dtype=np.float64)
    if m.ndim != 2 or m.size == 0:
        raise DataError(f"{name} must be a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DataError(f"{name} contains NaN or Inf entries")
    return m


def normalize_rows(m: np.ndarray, name: str = "embeddings") -> np.ndarray:
    norms = np.linalg.norm(m, axis=1)
    if np.any(norms == 0.0):
        bad = int(np.flatnonzero(norms == 0.0)[0])
        raise DataError(f"degenerate embedding: {name} row {bad} has zero norm")
    return m / norms[:, None]


def cosine_distance(u, v) -> float:
    """1 - cos(u, v) for two vectors of equal dimension."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise DataError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise DataError("degenerate embedding: zero-norm vector")
    return float(np.clip(1.0 - np.dot(u, v) / (nu * nv), 0.0, 2.0))


def pairwise_distances(a, b) -> np.ndarray:
    """Cosine-distance matrix: entry (i, j) = cosine_distance(a[i], b[j]).

    Computed by normalizing rows once and taking an inner-product pass.
    """
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    if a.shape[1] != b.shape[1]:
        raise DataError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    an = normalize_rows(a, "A")
    bn = normalize_rows(b, "B")
    return np.clip(1.0 - an @ bn.T, 0.0, 2.0)


def min_distances(chunk_to_question: np.ndarray) -> MinDistVector:
    """Row minima with first-index tie-breaking.

    Raises when the matrix has no columns, which means every question was
    filtered out upstream.
    """
    d = np.asarray(chunk_to_question, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] == 0:
        raise DataError(f"expected a non-empty 2-D distance matrix, got {d.shape}")
    if d.shape[1] == 0:
        raise DataError("no inlier questions remain")
    return MinDistVector(values=d.min(axis=1), argmin=d.argmin(axis=1))
