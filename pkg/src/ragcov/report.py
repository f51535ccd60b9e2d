"""Report assembly: one AnalysisReport rendered to JSON and Markdown.

The JSON document is schema-versioned with a stable key order and full-
precision floats; the timestamp is the only nondeterministic field. The
Markdown view shows the same numbers, with percentages at one decimal.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .coverage import ClusterCoverage, CoverageScores
from .errors import DataError
from .gaps import GapRecommendation
from .outliers import QuestionAssessment

SCHEMA_VERSION = 1

RELATIVE_SCORE_CAVEAT = (
    "Coverage scores are relative: they compare question sets over the same "
    "corpus and must be interpreted beyond the raw number, not read as an "
    "absolute grade (100% would mean the questions mirror the chunks verbatim)."
)

STATUS_OK = "ok"
STATUS_NO_INLIERS = "no_inlier_questions"


@dataclass(frozen=True)
class RunMetadata:
    timestamp: str
    provider: str
    embedding_model: str
    seed: int
    n_chunks: int
    n_questions: int
    n_inliers: int
    k_clusters: int
    config: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AnalysisReport:
    run: RunMetadata
    status: str
    coverage: CoverageScores | None
    question_assessments: list[QuestionAssessment]
    question_texts: list[str]
    gaps: list[GapRecommendation]
    warnings: list[str]
    artifact_paths: dict


def report_to_dict(report: AnalysisReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "run": asdict(report.run),
        "status": report.status,
        "coverage": asdict_or_none(report.coverage),
        "questions": [
            {
                "index": a.question_index,
                "text": report.question_texts[a.question_index],
                "lof_raw": a.lof_raw,
                "score": a.reported_score,
                "is_outlier": a.is_outlier,
                "nearest_doc_distance": a.nearest_doc_distance,
            }
            for a in report.question_assessments
        ],
        "gaps": [asdict(g) for g in report.gaps],
        "warnings": list(report.warnings),
        "artifacts": dict(report.artifact_paths),
    }


def asdict_or_none(value) -> dict | None:
    return None if value is None else asdict(value)


def report_from_dict(data: dict) -> AnalysisReport:
    """Inverse of report_to_dict; rejects unknown schema versions."""
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise DataError(f"unsupported report schema_version {version!r}")
    cov = data["coverage"]
    coverage = (
        CoverageScores(
            basic=cov["basic"],
            weighted=cov["weighted"],
            multi_threshold=cov["multi_threshold"],
            per_cluster=[ClusterCoverage(**pc) for pc in cov["per_cluster"]],
        )
        if cov is not None
        else None
    )
    return AnalysisReport(
        run=RunMetadata(**data["run"]),
        status=data["status"],
        coverage=coverage,
        question_assessments=[
            QuestionAssessment(
                question_index=q["index"],
                lof_raw=q["lof_raw"],
                reported_score=q["score"],
                is_outlier=q["is_outlier"],
                nearest_doc_distance=q["nearest_doc_distance"],
            )
            for q in data["questions"]
        ],
        question_texts=[q["text"] for q in data["questions"]],
        gaps=[GapRecommendation(**g) for g in data["gaps"]],
        warnings=list(data["warnings"]),
        artifact_paths=dict(data["artifacts"]),
    )


def emit_json(report: AnalysisReport, path: str | Path) -> Path:
    out = Path(path)
    try:
        out.write_text(
            json.dumps(report_to_dict(report), indent=2) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        raise DataError(f"cannot write report to {out}: {exc}") from exc
    return out


def _pct(value: float) -> str:
    return f"{value * 100.0:.1f}%"


def emit_markdown(report: AnalysisReport, path: str | Path, gap_threshold: float = 0.7) -> Path:
    """Human-readable report: coverage summary, per-cluster table, outlier
    list, and one six-field gap table per gap."""
    lines: list[str] = []
    run = report.run
    lines += [
        "# Semantic coverage report",
        "",
        f"- Generated: {run.timestamp}",
        f"- Embedding model: {run.embedding_model} ({run.provider})",
        f"- Seed: {run.seed}",
        f"- Chunks: {run.n_chunks} | Questions: {run.n_questions} "
        f"(inliers: {run.n_inliers}) | Clusters: {run.k_clusters}",
        "",
    ]

    lines.append("## Coverage summary")
    lines.append("")
    if report.coverage is None:
        lines.append(
            "Coverage could not be computed: every question was filtered out "
            "as a semantic outlier. Review the outlier list below, then lower "
            "the LOF threshold or revise the question set."
        )
    else:
        cov = report.coverage
        lines += [
            f"- Basic coverage: {_pct(cov.basic)}",
            f"- Weighted coverage: {_pct(cov.weighted)}",
            f"- Multi-cluster coverage: {_pct(cov.multi_threshold)}",
            "",
            RELATIVE_SCORE_CAVEAT,
            "",
            "## Clusters",
            "",
            "| Cluster | Size | Share | Coverage | Covering questions |",
            "| --- | --- | --- | --- | --- |",
        ]
        for pc in cov.per_cluster:
            lines.append(
                f"| {pc.cluster_id} | {pc.size} | {_pct(pc.share)} | "
                f"{pc.coverage:.3f} | {pc.covering_question_count} |"
            )
    lines.append("")

    lines.append("## Outlier questions")
    lines.append("")
    outliers = [a for a in report.question_assessments if a.is_outlier]
    if not outliers:
        lines.append("None flagged.")
    else:
        for a in outliers:
            text = report.question_texts[a.question_index]
            lines.append(f"- [{a.question_index}] {text!r} (score {a.reported_score:.3f})")
    lines.append("")

    lines.append("## Gap analysis")
    lines.append("")
    if not report.gaps:
        lines.append(f"No coverage gaps at threshold {gap_threshold:g}.")
    else:
        for gap in report.gaps:
            themes = "; ".join(gap.themes)
            suggestions = "<br>".join(gap.suggested_questions)
            lines += [
                f"### Rank {gap.rank}: cluster {gap.cluster_id}",
                "",
                "| Field | Value |",
                "| --- | --- |",
                f"| Cluster ID | {gap.cluster_id} |",
                f"| Coverage Score | {gap.coverage_score:.3f} |",
                f"| Cluster Size | {gap.cluster_size} chunks |",
                f"| Corpus Share | {_pct(gap.corpus_share)} |",
                f"| Extracted Themes | {themes} |",
                f"| Suggested Question | {suggestions} |",
                "",
            ]

    if report.warnings:
        lines += ["## Warnings", ""]
        lines += [f"- {w}" for w in report.warnings]
        lines.append("")

    out = Path(path)
    try:
        out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write report to {out}: {exc}") from exc
    return out
