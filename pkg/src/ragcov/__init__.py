"""Semantic test-coverage analysis for RAG question sets.

Embeds document chunks and test questions into one vector space, filters
outlier questions with LOF, computes basic / weighted / multi-cluster
coverage, and reports gaps with suggested new questions.
"""

from .cluster import ClusterModel, choose_k, kmeans
from .config import RunConfig, load_config_file, merge_config
from .corpus import (
    ChunkingConfig,
    DocumentChunk,
    RawDocument,
    TestQuestion,
    chunk_corpus,
    chunk_document,
    load_documents,
    load_questions,
)
from .coverage import (
    ClusterCoverage,
    CoverageScores,
    MultiCoverageConfig,
    basic_coverage,
    compute_coverage,
    multi_threshold_coverage,
    weighted_coverage,
)
from .embed import EmbeddingCache, ProviderConfig, embed_texts, offline_embed
from .errors import ConfigError, DataError, ProviderError, RagcovError
from .gaps import (
    ConceptBackendConfig,
    GapRecommendation,
    extract_themes,
    find_gaps,
    rank_gaps,
    suggest_questions,
)
from .geometry import MinDistVector, cosine_distance, min_distances, pairwise_distances
from .outliers import LofConfig, QuestionAssessment, filter_inliers, lof_assess
from .pipeline import run_analysis
from .report import AnalysisReport, emit_json, emit_markdown
from .synth import QuestionGroup, SyntheticSpec, TopicSpec, generate_corpus
from .viz import Projection2D, project_2d, render_scatter

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "ChunkingConfig",
    "ClusterCoverage",
    "ClusterModel",
    "ConceptBackendConfig",
    "ConfigError",
    "CoverageScores",
    "DataError",
    "DocumentChunk",
    "EmbeddingCache",
    "GapRecommendation",
    "LofConfig",
    "MinDistVector",
    "MultiCoverageConfig",
    "Projection2D",
    "ProviderConfig",
    "ProviderError",
    "QuestionAssessment",
    "QuestionGroup",
    "RagcovError",
    "RawDocument",
    "RunConfig",
    "SyntheticSpec",
    "TestQuestion",
    "TopicSpec",
    "basic_coverage",
    "choose_k",
    "chunk_corpus",
    "chunk_document",
    "compute_coverage",
    "cosine_distance",
    "emit_json",
    "emit_markdown",
    "embed_texts",
    "extract_themes",
    "filter_inliers",
    "find_gaps",
    "generate_corpus",
    "kmeans",
    "load_config_file",
    "load_documents",
    "load_questions",
    "lof_assess",
    "merge_config",
    "min_distances",
    "multi_threshold_coverage",
    "offline_embed",
    "pairwise_distances",
    "project_2d",
    "rank_gaps",
    "render_scatter",
    "run_analysis",
    "suggest_questions",
    "weighted_coverage",
]
