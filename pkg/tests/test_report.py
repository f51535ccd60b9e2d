import json

import pytest

from ragcov.coverage import ClusterCoverage, CoverageScores
from ragcov.errors import DataError
from ragcov.gaps import GapRecommendation
from ragcov.outliers import QuestionAssessment
from ragcov.report import (
    RELATIVE_SCORE_CAVEAT,
    SCHEMA_VERSION,
    STATUS_NO_INLIERS,
    STATUS_OK,
    AnalysisReport,
    RunMetadata,
    emit_json,
    emit_markdown,
    report_from_dict,
    report_to_dict,
)

GAP_TABLE_FIELDS = [
    "Cluster ID",
    "Coverage Score",
    "Cluster Size",
    "Corpus Share",
    "Extracted Themes",
    "Suggested Question",
]


def sample_report(with_gap: bool = True, status: str = STATUS_OK) -> AnalysisReport:
    coverage = None
    if status == STATUS_OK:
        coverage = CoverageScores(
            basic=0.694,
            weighted=0.67125,
            multi_threshold=0.61,
            per_cluster=[
                ClusterCoverage(0, 105, 0.875, 0.707, 3, 0.69),
                ClusterCoverage(1, 15, 0.125, 0.42, 0, 0.0),
            ],
        )
    gaps = []
    if with_gap and status == STATUS_OK:
        gaps = [
            GapRecommendation(
                cluster_id=1,
                coverage_score=0.42,
                cluster_size=15,
                corpus_share=0.125,
                themes=["data privacy", "user consent", "information storage"],
                suggested_questions=["What does the documentation say about data privacy?"],
                rank=1,
            )
        ]
    return AnalysisReport(
        run=RunMetadata(
            timestamp="2024-01-01T00:00:00+00:00",
            provider="offline",
            embedding_model="offline-hash-v1",
            seed=7,
            n_chunks=120,
            n_questions=3,
            n_inliers=2,
            k_clusters=2,
            config={"seed": 7},
        ),
        status=status,
        coverage=coverage,
        question_assessments=[
            QuestionAssessment(0, 1.02, 0.02, False, 0.21),
            QuestionAssessment(1, 2.4111, 1.4111, True, 0.93),
            QuestionAssessment(2, 0.98, -0.02, False, 0.18),
        ],
        question_texts=["what is alpha?", "how do birds fly?", "what is beta?"],
        gaps=gaps,
        warnings=["1 of 3 questions flagged as semantic outliers and excluded from coverage"],
        artifact_paths={"plot": None, "markdown": None, "cache_dir": ".cache"},
    )


class TestJson:
    def test_round_trip(self, tmp_path):
        report = sample_report()
        path = emit_json(report, tmp_path / "r.json")
        parsed = json.loads(path.read_text())
        assert parsed["schema_version"] == SCHEMA_VERSION
        assert report_from_dict(parsed) == report

    def test_gap_entry_has_table_fields(self, tmp_path):
        path = emit_json(sample_report(), tmp_path / "r.json")
        gap = json.loads(path.read_text())["gaps"][0]
        assert set(gap) == {
            "cluster_id", "coverage_score", "cluster_size", "corpus_share",
            "themes", "suggested_questions", "rank",
        }

    def test_determinism_modulo_timestamp(self, tmp_path):
        a = report_to_dict(sample_report())
        b = report_to_dict(sample_report())
        b["run"]["timestamp"] = "2030-12-31T23:59:59+00:00"
        a["run"]["timestamp"] = b["run"]["timestamp"]
        assert json.dumps(a) == json.dumps(b)

    def test_unknown_schema_rejected(self):
        data = report_to_dict(sample_report())
        data["schema_version"] = 99
        with pytest.raises(DataError, match="schema_version"):
            report_from_dict(data)

    def test_no_inlier_report_serializes(self, tmp_path):
        report = sample_report(status=STATUS_NO_INLIERS)
        path = emit_json(report, tmp_path / "r.json")
        parsed = json.loads(path.read_text())
        assert parsed["coverage"] is None
        assert report_from_dict(parsed) == report


class TestMarkdown:
    def test_gap_table_layout(self, tmp_path):
        path = emit_markdown(sample_report(), tmp_path / "r.md", gap_threshold=0.7)
        text = path.read_text()
        for label in GAP_TABLE_FIELDS:
            assert f"| {label} |" in text
        assert "| Corpus Share | 12.5% |" in text
        assert "| Cluster ID | 1 |" in text

    def test_no_gap_line(self, tmp_path):
        path = emit_markdown(sample_report(with_gap=False), tmp_path / "r.md", 0.7)
        assert "No coverage gaps at threshold 0.7." in path.read_text()

    def test_outlier_listed_with_three_decimals(self, tmp_path):
        text = emit_markdown(sample_report(), tmp_path / "r.md").read_text()
        assert "how do birds fly?" in text
        assert "1.411" in text

    def test_relative_caveat_present(self, tmp_path):
        text = emit_markdown(sample_report(), tmp_path / "r.md").read_text()
        assert RELATIVE_SCORE_CAVEAT in text

    def test_percentages_one_decimal(self, tmp_path):
        text = emit_markdown(sample_report(), tmp_path / "r.md").read_text()
        assert "Basic coverage: 69.4%" in text
        assert "Weighted coverage: 67.1%" in text

    def test_markdown_matches_json_numbers(self, tmp_path):
        report = sample_report()
        md = emit_markdown(report, tmp_path / "r.md").read_text()
        data = json.loads(emit_json(report, tmp_path / "r.json").read_text())
        assert f"{data['coverage']['basic'] * 100:.1f}%" in md
        gap = data["gaps"][0]
        assert f"| Coverage Score | {gap['coverage_score']:.3f} |" in md

    def test_no_inlier_explanation(self, tmp_path):
        report = sample_report(status=STATUS_NO_INLIERS)
        text = emit_markdown(report, tmp_path / "r.md").read_text()
        assert "every question was filtered out" in text
