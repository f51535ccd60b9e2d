"""Local Outlier Factor scoring of test questions against the chunk corpus.

Novelty mode: each question's neighborhood is drawn from the document
embeddings only, never from other questions, so a clump of off-topic
questions cannot validate itself. Distances are cosine, matching the rest of
the pipeline. The reported score is the classic LOF value minus 1, which puts
inliers near zero and outliers clearly positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import TestQuestion
from .errors import DataError
from .geometry import as_matrix, pairwise_distances


@dataclass(frozen=True)
class QuestionAssessment:
    question_index: int
    lof_raw: float
    reported_score: float
    is_outlier: bool
    nearest_doc_distance: float


@dataclass(frozen=True)
class LofConfig:
    """``n_neighbors`` counts reference points; ``outlier_threshold`` applies
    to the reported (shifted) score. ``mode`` is ``novelty`` (score questions
    against documents) or ``questions-only`` (classic LOF within the question
    set alone, kept for compatibility)."""

    n_neighbors: int = 20
    outlier_threshold: float = 0.5
    mode: str = "novelty"

    def validate(self) -> None:
        if self.n_neighbors < 1:
            raise DataError(f"n_neighbors must be >= 1, got {self.n_neighbors}")
        if not np.isfinite(self.outlier_threshold):
            raise DataError("outlier_threshold must be finite")
        if self.mode not in ("novelty", "questions-only"):
            raise DataError(f"unknown LOF mode {self.mode!r}")

    def clamped(self, n_reference: int) -> "LofConfig":
        """Copy with n_neighbors clamped to n_reference - 1 (pipeline default
        resolution for small corpora)."""
        k = max(1, min(self.n_neighbors, n_reference - 1))
        return LofConfig(k, self.outlier_threshold, self.mode)


def _k_nearest(dist: np.ndarray, k: int) -> np.ndarray:
    """Indices of each row's k smallest entries, ties broken by lower index."""
    order = np.argsort(dist, axis=1, kind="stable")
    return order[:, :k]


def _lrd(reach: np.ndarray) -> np.ndarray:
    """Local reachability density: 1 / mean reach distance, +inf at zero."""
    mean = reach.mean(axis=1)
    with np.errstate(divide="ignore"):
        return np.where(mean > 0.0, 1.0 / np.where(mean > 0.0, mean, 1.0), np.inf)


def _lof_scores(query_to_ref: np.ndarray, ref_to_ref: np.ndarray, k: int) -> np.ndarray:
    """LOF of each query point against the reference population.

    ``ref_to_ref`` must already have +inf on the diagonal when queries are
    the reference points themselves.
    """
    n_ref = ref_to_ref.shape[0]
    rows = np.arange(n_ref)[:, None]

    ref_neigh = _k_nearest(ref_to_ref, k)
    ref_kdist = ref_to_ref[np.arange(n_ref), ref_neigh[:, -1]]
    ref_reach = np.maximum(ref_kdist[ref_neigh], ref_to_ref[rows, ref_neigh])
    ref_lrd = _lrd(ref_reach)

    q_rows = np.arange(query_to_ref.shape[0])[:, None]
    q_neigh = _k_nearest(query_to_ref, k)
    q_reach = np.maximum(ref_kdist[q_neigh], query_to_ref[q_rows, q_neigh])
    q_lrd = _lrd(q_reach)

    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = ref_lrd[q_neigh] / q_lrd[:, None]
    ratios = np.where(np.isnan(ratios), 1.0, ratios)  # inf/inf: equally dense
    return ratios.mean(axis=1)


def lof_assess(e_q, e_d, cfg: LofConfig = LofConfig()) -> list[QuestionAssessment]:
    """Score every question's semantic isolation from the document corpus.

    For each question: take its n_neighbors nearest document embeddings,
    compute reachability distances against document-side k-distances, form
    the local reachability density, and report the mean density ratio versus
    those neighbors (shifted by -1). Scores above ``outlier_threshold`` mark
    the question as an outlier.
    """
    cfg.validate()
    eq = as_matrix(e_q, "question embeddings")
    ed = as_matrix(e_d, "document embeddings")
    if eq.shape[1] != ed.shape[1]:
        raise DataError(f"dimension mismatch: {eq.shape[1]} vs {ed.shape[1]}")

    q_to_d = pairwise_distances(eq, ed)
    nearest = q_to_d.min(axis=1)

    if cfg.mode == "novelty":
        if ed.shape[0] < cfg.n_neighbors + 1:
            raise DataError(
                f"need at least n_neighbors+1={cfg.n_neighbors + 1} document "
                f"chunks for LOF, have {ed.shape[0]}; lower n_neighbors"
            )
        d_to_d = pairwise_distances(ed, ed)
        np.fill_diagonal(d_to_d, np.inf)
        raw = _lof_scores(q_to_d, d_to_d, cfg.n_neighbors)
    else:
        if eq.shape[0] < cfg.n_neighbors + 1:
            raise DataError(
                f"need at least n_neighbors+1={cfg.n_neighbors + 1} questions "
                f"for questions-only LOF, have {eq.shape[0]}; lower n_neighbors"
            )
        q_to_q = pairwise_distances(eq, eq)
        np.fill_diagonal(q_to_q, np.inf)
        raw = _lof_scores(q_to_q, q_to_q, cfg.n_neighbors)

    return [
        QuestionAssessment(
            question_index=i,
            lof_raw=float(raw[i]),
            reported_score=float(raw[i] - 1.0),
            is_outlier=bool(raw[i] - 1.0 > cfg.outlier_threshold),
            nearest_doc_distance=float(nearest[i]),
        )
        for i in range(eq.shape[0])
    ]


def filter_inliers(
    assessments: list[QuestionAssessment], questions: list[TestQuestion]
) -> tuple[list[TestQuestion], list[TestQuestion]]:
    """Stable partition of questions into (inliers, outliers) by verdict."""
    verdicts = {a.question_index: a.is_outlier for a in assessments}
    missing = [q.index for q in questions if q.index not in verdicts]
    if missing:
        raise DataError(f"assessments missing for question indices {missing}")
    inliers = [q for q in questions if not verdicts[q.index]]
    outliers = [q for q in questions if verdicts[q.index]]
    return inliers, outliers
