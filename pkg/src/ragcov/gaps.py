"""Coverage-gap analysis: find badly covered clusters, characterize them, and
suggest new test questions.

Two concept-extraction backends: ``remote`` asks a chat-completion LLM for
themes and questions as strict JSON; ``offline`` ranks cluster terms by
TF-IDF against the whole corpus and expands fixed question templates. Remote
failures of any kind fall back to the offline backend with a recorded
warning, so gap analysis always completes.
"""

from __future__ import annotations

import json
import math
import os
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Sequence

import requests

from .corpus import DocumentChunk
from .errors import ConfigError, DataError, ProviderError
from .textutil import STOPWORDS, tokenize

QUESTION_TEMPLATE = "What does the documentation say about {theme}?"
_CHAT_URL = "https://api.openai.com/v1/chat/completions"


@dataclass(frozen=True)
class ConceptBackendConfig:
    backend: str = "offline"  # "offline" (TF-IDF) or "remote" (LLM)
    model_name: str = "gpt-4o-mini"
    api_key_env: str = "OPENAI_API_KEY"
    max_chunks_per_prompt: int = 8
    timeout: float = 60.0

    def validate(self) -> None:
        if self.backend not in ("offline", "remote"):
            raise ConfigError(f"unknown concept backend {self.backend!r}")
        if self.max_chunks_per_prompt < 1:
            raise ConfigError("max_chunks_per_prompt must be >= 1")


@dataclass(frozen=True)
class GapRecommendation:
    cluster_id: int
    coverage_score: float
    cluster_size: int
    corpus_share: float
    themes: list[str] = field(default_factory=list)
    suggested_questions: list[str] = field(default_factory=list)
    rank: int = 0


def find_gaps(per_cluster_coverage: Sequence[float], gap_threshold: float) -> list[int]:
    """Cluster ids whose coverage falls strictly below the threshold."""
    if len(per_cluster_coverage) == 0:
        raise DataError("no per-cluster coverages")
    if not 0.0 <= gap_threshold <= 1.0:
        raise DataError(f"gap_threshold must be in [0, 1], got {gap_threshold}")
    return [c for c, cov in enumerate(per_cluster_coverage) if cov < gap_threshold]


def tfidf_terms(
    cluster_chunks: Sequence[DocumentChunk],
    corpus_chunks: Sequence[DocumentChunk],
    top_n: int = 5,
) -> list[str]:
    """Top cluster terms by TF-IDF against the whole corpus, stop words
    removed. Ties break alphabetically so the output is deterministic."""
    if not cluster_chunks:
        raise DataError("empty cluster")
    tf: Counter[str] = Counter()
    for chunk in cluster_chunks:
        tf.update(t for t in tokenize(chunk.text) if t not in STOPWORDS)
    df: Counter[str] = Counter()
    for chunk in corpus_chunks:
        df.update(set(tokenize(chunk.text)) - STOPWORDS)
    n_docs = max(len(corpus_chunks), 1)
    scored = [
        (tf[term] * (math.log(n_docs / (1.0 + df[term])) + 1.0), term)
        for term in tf
    ]
    scored.sort(key=lambda pair: (-pair[0], pair[1]))
    return [term for _, term in scored[:top_n]]


def _chat_completion(cfg: ConceptBackendConfig, prompt: str) -> str:
    """One LLM chat call returning the raw completion text; stubbed in tests."""
    api_key = os.environ.get(cfg.api_key_env, "")
    if not api_key:
        raise ConfigError(
            f"remote concept backend requires the {cfg.api_key_env} environment variable"
        )
    resp = requests.post(
        _CHAT_URL,
        headers={"Authorization": f"Bearer {api_key}"},
        json={
            "model": cfg.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        },
        timeout=cfg.timeout,
    )
    if resp.status_code != 200:
        raise ProviderError(f"chat completion failed: HTTP {resp.status_code}")
    try:
        return resp.json()["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ProviderError(f"malformed chat completion response: {exc}") from exc


def _parse_json_list(raw: str, lo: int, hi: int) -> list[str]:
    parsed = json.loads(raw)
    if (
        not isinstance(parsed, list)
        or not all(isinstance(x, str) and x.strip() for x in parsed)
        or not lo <= len(parsed) <= hi
    ):
        raise ProviderError(f"expected a JSON list of {lo}-{hi} strings")
    return [x.strip() for x in parsed]


def extract_themes(
    cluster_chunks: Sequence[DocumentChunk],
    corpus_chunks: Sequence[DocumentChunk],
    cfg: ConceptBackendConfig = ConceptBackendConfig(),
    warnings: list[str] | None = None,
) -> list[str]:
    """3-5 key concepts for one cluster.

    The remote backend sees up to ``max_chunks_per_prompt`` representative
    chunks (callers pass them ordered nearest-to-centroid first) and must
    answer with a JSON list of noun phrases; anything else falls back to the
    offline TF-IDF terms. Fewer than 3 themes is possible for tiny clusters
    and is recorded as a warning.
    """
    cfg.validate()
    if not cluster_chunks:
        raise DataError("empty cluster")
    themes: list[str] | None = None
    if cfg.backend == "remote":
        sample = "\n---\n".join(
            c.text[:2000] for c in cluster_chunks[: cfg.max_chunks_per_prompt]
        )
        prompt = (
            "These text excerpts come from one topical cluster of a knowledge "
            "base. Reply with ONLY a JSON list of 3 to 5 concise noun-phrase "
            f"themes that summarize the cluster.\n\n{sample}"
        )
        try:
            themes = _parse_json_list(_chat_completion(cfg, prompt), 3, 5)
        except (ProviderError, json.JSONDecodeError) as exc:
            if warnings is not None:
                warnings.append(
                    f"remote theme extraction failed ({exc}); fell back to TF-IDF"
                )
    if themes is None:
        themes = tfidf_terms(cluster_chunks, corpus_chunks, top_n=5)
    if len(themes) < 3 and warnings is not None:
        warnings.append(
            f"only {len(themes)} theme(s) extractable from a "
            f"{len(cluster_chunks)}-chunk cluster"
        )
    return themes


def suggest_questions(
    themes: Sequence[str],
    cluster_chunks: Sequence[DocumentChunk],
    cfg: ConceptBackendConfig = ConceptBackendConfig(),
    warnings: list[str] | None = None,
) -> list[str]:
    """Candidate test questions for a gap cluster, one per theme offline."""
    cfg.validate()
    if not themes:
        raise DataError("no themes to suggest questions for")
    if cfg.backend == "remote":
        sample = "\n---\n".join(
            c.text[:2000] for c in cluster_chunks[: cfg.max_chunks_per_prompt]
        )
        prompt = (
            "A documentation cluster covers these themes: "
            + ", ".join(themes)
            + ". Reply with ONLY a JSON list of 1 to 3 natural-language "
            "questions a user might ask about them, grounded in these "
            f"excerpts:\n\n{sample}"
        )
        try:
            return _parse_json_list(_chat_completion(cfg, prompt), 1, 3)
        except (ProviderError, json.JSONDecodeError) as exc:
            if warnings is not None:
                warnings.append(
                    f"remote question suggestion failed ({exc}); fell back to templates"
                )
    return [QUESTION_TEMPLATE.format(theme=theme) for theme in themes]


def rank_gaps(
    gaps: Sequence[GapRecommendation], gap_threshold: float
) -> list[GapRecommendation]:
    """Order gaps by priority = corpus_share * (gap_threshold - coverage),
    descending; ties prefer the larger cluster, then the lower id. Ranks are
    assigned contiguously from 1."""
    def sort_key(gap: GapRecommendation):
        priority = gap.corpus_share * (gap_threshold - gap.coverage_score)
        return (-priority, -gap.cluster_size, gap.cluster_id)

    ordered = sorted(gaps, key=sort_key)
    return [replace(gap, rank=i + 1) for i, gap in enumerate(ordered)]
