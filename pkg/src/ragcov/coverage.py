"""The three coverage metrics.

All of them turn mean distances into similarities by subtracting from 1, and
all of them are relative measures: they compare one question set against
another over the same corpus, not against an absolute ideal.

* basic: 1 - mean over chunks of the distance to the nearest inlier question.
* weighted: cluster-size-weighted sum of per-cluster coverages.
* multi-threshold: a question counts toward every cluster whose centroid is
  within a distance threshold; uncovered clusters contribute zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cluster import ClusterModel
from .errors import DataError
from .geometry import MinDistVector, as_matrix, pairwise_distances


@dataclass(frozen=True)
class MultiCoverageConfig:
    """Question-to-centroid cosine-distance threshold (strict ``<``).

    Useful values sit roughly in [0.15, 0.8]; the default is the midpoint.
    ``n_closest`` switches to the alternative mode where each question covers
    its N nearest centroids instead of everything under the threshold.
    """

    threshold: float = 0.5
    n_closest: int | None = None

    def validate(self) -> None:
        if not 0.0 <= self.threshold <= 2.0:
            raise DataError(f"threshold must be in [0, 2], got {self.threshold}")
        if self.n_closest is not None and self.n_closest < 1:
            raise DataError(f"n_closest must be >= 1, got {self.n_closest}")


@dataclass(frozen=True)
class ClusterCoverage:
    """Per-cluster slice of a coverage report."""

    cluster_id: int
    size: int
    share: float
    coverage: float
    covering_question_count: int
    multi_coverage: float


@dataclass(frozen=True)
class CoverageScores:
    basic: float
    weighted: float
    multi_threshold: float
    per_cluster: list[ClusterCoverage] = field(default_factory=list)


def basic_coverage(mindist: MinDistVector) -> float:
    """1 minus the mean per-chunk distance to the nearest inlier question."""
    if mindist.values.size == 0:
        raise DataError("empty min-distance vector")
    return float(1.0 - mindist.values.mean())


def weighted_coverage(
    mindist: MinDistVector, model: ClusterModel
) -> tuple[float, np.ndarray]:
    """Cluster-size-weighted coverage.

    Returns the total and the per-cluster coverages (1 minus the mean
    min-distance over each cluster's chunks).
    """
    n = mindist.values.size
    if sum(m.size for m in model.members) != n:
        raise DataError("cluster model does not partition the mindist chunks")
    per_cluster = np.array(
        [1.0 - mindist.values[m].mean() for m in model.members]
    )
    shares = model.sizes / n
    return float(np.dot(shares, per_cluster)), per_cluster


def covering_sets(
    question_to_centroid: np.ndarray, cfg: MultiCoverageConfig
) -> list[np.ndarray]:
    """Question indices covering each cluster.

    Threshold mode: question q covers cluster c iff dist(q, centroid_c) is
    strictly below the threshold. N-closest mode: q covers its n_closest
    nearest centroids (ties to the lower cluster id).
    """
    m, k = question_to_centroid.shape
    if cfg.n_closest is None:
        covers = question_to_centroid < cfg.threshold
    else:
        covers = np.zeros((m, k), dtype=bool)
        nearest = np.argsort(question_to_centroid, axis=1, kind="stable")
        for q in range(m):
            covers[q, nearest[q, : cfg.n_closest]] = True
    return [np.flatnonzero(covers[:, c]) for c in range(k)]


def multi_threshold_coverage(
    e_q_inliers,
    e_d,
    model: ClusterModel,
    cfg: MultiCoverageConfig = MultiCoverageConfig(),
) -> tuple[float, np.ndarray, np.ndarray]:
    """Threshold-based multi-cluster coverage.

    Returns (total, per-cluster multi coverage, per-cluster covering-question
    counts). A cluster with no covering question scores 0, and a covered
    cluster never scores below that floor: its contribution is
    max(0, 1 - multidist), so rescuing a distant cluster cannot reduce the
    total below the uncovered case and the score is monotone in the
    threshold.
    """
    cfg.validate()
    eq = as_matrix(e_q_inliers, "question embeddings")
    ed = as_matrix(e_d, "document embeddings")
    if sum(m.size for m in model.members) != ed.shape[0]:
        raise DataError("cluster model does not partition the document embeddings")

    q_to_c = pairwise_distances(eq, model.centroids)
    q_to_d = pairwise_distances(eq, ed)
    q_sets = covering_sets(q_to_c, cfg)

    n = ed.shape[0]
    per_cluster = np.zeros(model.k)
    counts = np.zeros(model.k, dtype=int)
    total = 0.0
    for cid, (members, qs) in enumerate(zip(model.members, q_sets)):
        counts[cid] = qs.size
        if qs.size == 0:
            continue
        multidist = q_to_d[np.ix_(qs, members)].min(axis=0).mean()
        per_cluster[cid] = max(0.0, 1.0 - multidist)
        total += (members.size / n) * per_cluster[cid]
    return float(total), per_cluster, counts


def compute_coverage(
    mindist: MinDistVector,
    e_q_inliers,
    e_d,
    model: ClusterModel,
    multi_cfg: MultiCoverageConfig = MultiCoverageConfig(),
) -> CoverageScores:
    """Assemble all three metrics plus the per-cluster breakdown."""
    basic = basic_coverage(mindist)
    weighted, cluster_cov = weighted_coverage(mindist, model)
    multi, multi_cov, counts = multi_threshold_coverage(e_q_inliers, e_d, model, multi_cfg)
    n = mindist.values.size
    per_cluster = [
        ClusterCoverage(
            cluster_id=cid,
            size=int(model.sizes[cid]),
            share=float(model.sizes[cid] / n),
            coverage=float(cluster_cov[cid]),
            covering_question_count=int(counts[cid]),
            multi_coverage=float(multi_cov[cid]),
        )
        for cid in range(model.k)
    ]
    return CoverageScores(
        basic=basic,
        weighted=float(weighted),
        multi_threshold=float(multi),
        per_cluster=per_cluster,
    )
