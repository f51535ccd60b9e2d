import numpy as np
import pytest

from oracles import reference_lof
from ragcov.corpus import TestQuestion
from ragcov.errors import DataError
from ragcov.outliers import LofConfig, QuestionAssessment, filter_inliers, lof_assess


def doc_cloud(rng: np.random.Generator, n: int = 50, dim: int = 16, spread: float = 0.05):
    """A tight cloud around a random off-origin direction (sane cosine geometry)."""
    center = rng.normal(size=dim)
    center = 10.0 * center / np.linalg.norm(center)
    return center + rng.normal(scale=spread, size=(n, dim)), center


def angular_point(center: np.ndarray, theta: float, rng: np.random.Generator):
    """Unit-direction point at angle theta from the cloud center direction."""
    u = center / np.linalg.norm(center)
    v = rng.normal(size=center.size)
    v -= (v @ u) * u
    v /= np.linalg.norm(v)
    return 10.0 * (np.cos(theta) * u + np.sin(theta) * v)


class TestLofAssess:
    def test_question_inside_dense_cloud_is_inlier(self, rng):
        docs, _ = doc_cloud(rng, n=50)
        question = docs[17].copy()  # identical to a document chunk
        scores = lof_assess(question[None, :], docs, LofConfig(n_neighbors=10))
        assert scores[0].reported_score <= 0.1
        assert not scores[0].is_outlier

    def test_far_question_is_outlier(self, rng):
        docs, center = doc_cloud(rng, n=100, dim=20)
        # cloud angular radius, then a question at 10x that angle
        u = center / np.linalg.norm(center)
        norms = np.linalg.norm(docs, axis=1)
        cos = (docs @ u) / norms
        radius = float(np.arccos(np.clip(cos, -1, 1)).mean())
        question = angular_point(center, 10.0 * radius, rng)
        scores = lof_assess(question[None, :], docs, LofConfig(n_neighbors=20))
        assert scores[0].reported_score > 0.5
        assert scores[0].is_outlier

    def test_all_questions_coincident_with_docs_are_inliers(self, rng):
        docs, _ = doc_cloud(rng, n=40)
        questions = docs[::4].copy()
        scores = lof_assess(questions, docs, LofConfig(n_neighbors=8))
        assert not any(s.is_outlier for s in scores)

    def test_matches_reference_implementation(self):
        for seed in range(8):
            rng = np.random.default_rng(seed)
            docs = rng.normal(size=(60, 8)) + rng.normal(size=8)
            questions = rng.normal(size=(10, 8)) + rng.normal(size=8)
            k = int(rng.integers(3, 15))
            got = [a.lof_raw for a in lof_assess(questions, docs, LofConfig(n_neighbors=k))]
            want = reference_lof(questions.tolist(), docs.tolist(), k)
            assert np.max(np.abs(np.array(got) - np.array(want))) < 1e-9

    def test_monotone_isolation_with_radius(self, rng):
        docs, center = doc_cloud(rng, n=80, dim=16)
        u = center / np.linalg.norm(center)
        cos = (docs @ u) / np.linalg.norm(docs, axis=1)
        radius = float(np.arccos(np.clip(cos, -1, 1)).mean())
        scores = []
        for factor in (4.0, 8.0, 16.0):
            q = angular_point(center, factor * radius, rng)
            scores.append(
                lof_assess(q[None, :], docs, LofConfig(n_neighbors=15))[0].reported_score
            )
        assert scores[0] <= scores[1] <= scores[2]

    def test_duplicate_docs_infinite_density_ratio_is_one(self):
        # k identical docs make reach distances zero; a coincident question
        # must come out with lof_raw == 1 (inf/inf treated as equal density)
        docs = np.vstack([np.ones((4, 6)), np.eye(6)[:3] + 2.0])
        question = np.ones((1, 6))
        scores = lof_assess(question, docs, LofConfig(n_neighbors=3))
        assert scores[0].lof_raw == pytest.approx(1.0)
        assert not scores[0].is_outlier

    def test_too_few_documents_rejected(self, rng):
        docs = rng.normal(size=(5, 4)) + 2.0
        with pytest.raises(DataError, match="n_neighbors"):
            lof_assess(docs[:2], docs, LofConfig(n_neighbors=5))

    def test_dimension_mismatch_rejected(self, rng):
        with pytest.raises(DataError, match="mismatch"):
            lof_assess(rng.normal(size=(2, 4)) + 2, rng.normal(size=(30, 5)) + 2)

    def test_nearest_doc_distance_recorded(self, rng):
        docs, _ = doc_cloud(rng, n=30)
        questions = docs[:3] + 0.001
        for a in lof_assess(questions, docs, LofConfig(n_neighbors=5)):
            assert 0.0 <= a.nearest_doc_distance < 0.01

    def test_questions_only_mode(self, rng):
        # classic LOF within the question set; one question far from the rest
        questions = np.vstack([doc_cloud(rng, n=30)[0], doc_cloud(rng, n=1, dim=16)[0] * -1])
        docs, _ = doc_cloud(rng, n=25)
        cfg = LofConfig(n_neighbors=10, mode="questions-only")
        scores = lof_assess(questions, docs, cfg)
        assert scores[-1].is_outlier
        assert not any(s.is_outlier for s in scores[:-1])

    def test_clamped_copy(self):
        cfg = LofConfig(n_neighbors=20).clamped(8)
        assert cfg.n_neighbors == 7


class TestFilterInliers:
    def assessment(self, index: int, outlier: bool) -> QuestionAssessment:
        return QuestionAssessment(index, 1.0, 0.0 if not outlier else 1.0, outlier, 0.3)

    def test_identity_partition_when_no_outliers(self):
        questions = [TestQuestion(i, f"q{i}") for i in range(4)]
        assessments = [self.assessment(i, False) for i in range(4)]
        inliers, outliers = filter_inliers(assessments, questions)
        assert inliers == questions
        assert outliers == []

    def test_partition_bookkeeping(self):
        questions = [TestQuestion(i, f"q{i}") for i in range(5)]
        assessments = [self.assessment(i, i in (1, 3)) for i in range(5)]
        inliers, outliers = filter_inliers(assessments, questions)
        assert [q.index for q in inliers] == [0, 2, 4]
        assert [q.index for q in outliers] == [1, 3]

    def test_partition_sizes(self):
        questions = [TestQuestion(i, f"q{i}") for i in range(7)]
        assessments = [self.assessment(i, i % 3 == 0) for i in range(7)]
        inliers, outliers = filter_inliers(assessments, questions)
        assert len(inliers) + len(outliers) == 7
        assert not set(q.index for q in inliers) & set(q.index for q in outliers)

    def test_missing_assessment_rejected(self):
        questions = [TestQuestion(i, f"q{i}") for i in range(3)]
        with pytest.raises(DataError, match="missing"):
            filter_inliers([self.assessment(0, False)], questions)


def test_off_topic_question_flagged_end_to_end():
    """Two-topic corpus with one unrelated question, via the offline embedder;
    instance pre-verified against the reference LOF oracle."""
    from ragcov.embed import offline_embed
    from ragcov.synth import QuestionGroup, SyntheticSpec, TopicSpec, generate_corpus

    spec = SyntheticSpec(
        topics=[TopicSpec("finance", 25, 60, 24), TopicSpec("hardware", 25, 60, 24)],
        questions=[QuestionGroup(0, 8), QuestionGroup(1, 8), QuestionGroup(None, 1, 20)],
        seed=3,
    )
    corpus = generate_corpus(spec)
    e_d = np.vstack([offline_embed(d.text, 512) for d in corpus.documents])
    e_q = np.vstack([offline_embed(q.text, 512) for q in corpus.questions])
    cfg = LofConfig(n_neighbors=10)

    oracle = reference_lof(e_q.tolist(), e_d.tolist(), 10)
    assert oracle[-1] - 1.0 > cfg.outlier_threshold  # oracle agrees it is isolated

    assessments = lof_assess(e_q, e_d, cfg)
    inliers, outliers = filter_inliers(assessments, corpus.questions)
    assert [q.index for q in outliers] == [16]
    assert len(inliers) == 16
