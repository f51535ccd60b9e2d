"""End-to-end analysis pipeline: chunk, embed, cluster, filter, score,
analyze gaps, plot, and write reports."""

from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .cluster import choose_k, kmeans
from .config import RunConfig
from .corpus import ChunkingConfig, chunk_corpus, load_documents, load_questions
from .coverage import MultiCoverageConfig, compute_coverage
from .embed import EmbeddingCache, embed_texts
from .errors import ConfigError
from .gaps import (
    ConceptBackendConfig,
    GapRecommendation,
    extract_themes,
    find_gaps,
    rank_gaps,
    suggest_questions,
)
from .geometry import min_distances, pairwise_distances
from .outliers import LofConfig, filter_inliers, lof_assess
from .report import (
    STATUS_NO_INLIERS,
    STATUS_OK,
    AnalysisReport,
    RunMetadata,
    emit_json,
    emit_markdown,
)
from .viz import ROLE_CHUNK, ROLE_INLIER, ROLE_OUTLIER, project_2d, render_scatter


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def run_analysis(cfg: RunConfig) -> AnalysisReport:
    """Execute the full pipeline and write the configured reports.

    Raises ConfigError/ProviderError/DataError on unrecoverable problems.
    When every question is filtered as an outlier the report is still
    written, with ``status`` set accordingly and coverage omitted.
    """
    problems = cfg.validate()
    if problems:
        raise ConfigError("; ".join(problems))

    warnings: list[str] = []
    docs = load_documents([cfg.docs], warnings=warnings)
    questions = load_questions(cfg.questions)

    chunks = chunk_corpus(docs, ChunkingConfig(cfg.chunk_size, cfg.chunk_overlap))
    provider_cfg = cfg.provider_config()
    cache = EmbeddingCache(cfg.cache_dir)
    e_d = embed_texts([c.text for c in chunks], provider_cfg, cache)
    e_q = embed_texts([q.text for q in questions], provider_cfg, cache)

    requested = None if cfg.clusters == "auto" else int(cfg.clusters)
    k = choose_k(len(chunks), requested)
    model = kmeans(e_d, k, seed=cfg.seed)

    lof_cfg = LofConfig(cfg.lof_neighbors, cfg.lof_threshold, cfg.lof_mode).clamped(
        len(chunks) if cfg.lof_mode == "novelty" else len(questions)
    )
    assessments = lof_assess(e_q, e_d, lof_cfg)
    inliers, outlier_questions = filter_inliers(assessments, questions)
    if outlier_questions:
        warnings.append(
            f"{len(outlier_questions)} of {len(questions)} questions flagged as "
            "semantic outliers and excluded from coverage"
        )

    coverage = None
    gaps: list[GapRecommendation] = []
    status = STATUS_OK
    if not inliers:
        status = STATUS_NO_INLIERS
        warnings.append(
            "every question was flagged as an outlier; coverage and gap "
            "analysis were skipped"
        )
    else:
        inlier_idx = [q.index for q in inliers]
        e_q_in = e_q[inlier_idx]
        mindist = min_distances(pairwise_distances(e_d, e_q_in))
        coverage = compute_coverage(
            mindist, e_q_in, e_d, model, MultiCoverageConfig(cfg.multi_threshold)
        )

        gap_ids = find_gaps(
            [pc.coverage for pc in coverage.per_cluster], cfg.gap_threshold
        )
        backend = ConceptBackendConfig(
            backend=cfg.theme_backend,
            model_name=cfg.theme_model,
            api_key_env=cfg.theme_api_key_env,
            max_chunks_per_prompt=cfg.max_chunks_per_prompt,
        )
        precursors = []
        for cid in gap_ids:
            members = model.members[cid]
            to_centroid = pairwise_distances(
                e_d[members], model.centroids[cid : cid + 1]
            )[:, 0]
            representative = [
                chunks[members[i]] for i in np.argsort(to_centroid, kind="stable")
            ]
            themes = extract_themes(representative, chunks, backend, warnings)
            suggestions = suggest_questions(themes, representative, backend, warnings)
            pc = coverage.per_cluster[cid]
            precursors.append(
                GapRecommendation(
                    cluster_id=cid,
                    coverage_score=pc.coverage,
                    cluster_size=pc.size,
                    corpus_share=pc.share,
                    themes=themes,
                    suggested_questions=suggestions,
                )
            )
        gaps = rank_gaps(precursors, cfg.gap_threshold)

    artifact_paths: dict = {
        "plot": None,
        "markdown": cfg.markdown_out or None,
        "cache_dir": str(cfg.cache_dir),
    }
    if cfg.plot and coverage is not None:
        verdict = {a.question_index: a.is_outlier for a in assessments}
        roles = [ROLE_CHUNK] * len(chunks) + [
            ROLE_OUTLIER if verdict[q.index] else ROLE_INLIER for q in questions
        ]
        proj = project_2d(
            np.vstack([e_d, e_q]),
            method=cfg.plot_method,
            seed=cfg.seed,
            roles=roles,
            cluster_of=model.assignments,
        )
        plot_path = Path(cfg.out).with_suffix(".svg")
        render_scatter(proj, coverage, plot_path)
        artifact_paths["plot"] = str(plot_path)
    elif cfg.plot:
        warnings.append("plot skipped: no coverage scores to annotate")

    report = AnalysisReport(
        run=RunMetadata(
            timestamp=_timestamp(),
            provider=cfg.provider,
            embedding_model=cfg.model,
            seed=cfg.seed,
            n_chunks=len(chunks),
            n_questions=len(questions),
            n_inliers=len(inliers),
            k_clusters=k,
            config=cfg.snapshot(),
        ),
        status=status,
        coverage=coverage,
        question_assessments=assessments,
        question_texts=[q.text for q in questions],
        gaps=gaps,
        warnings=warnings,
        artifact_paths=artifact_paths,
    )
    emit_json(report, cfg.out)
    if cfg.markdown_out:
        emit_markdown(report, cfg.markdown_out, cfg.gap_threshold)
    return report
