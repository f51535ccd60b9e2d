"""Synthetic corpus generation for tests and demos.

Documents are bags of pseudo-words drawn from per-topic vocabularies that are
pairwise disjoint, which makes cluster ground truth exact and the offline
embedder's geometry predictable. Word draws are Zipf-weighted so each topic
has genuinely frequent terms for TF-IDF themes to find. On-topic questions
are anchored to individual chunks (resampled from the anchor's words), which
keeps them dense with the corpus; off-topic questions draw from a separate
vocabulary that no document uses.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import RawDocument, TestQuestion
from .embed import offline_embed
from .errors import DataError
from .geometry import pairwise_distances

OFF_TOPIC = None


@dataclass(frozen=True)
class TopicSpec:
    name: str
    n_chunks: int
    vocab_size: int = 50
    chunk_words: int = 24


@dataclass(frozen=True)
class QuestionGroup:
    """``topic`` indexes into the topic list; ``None`` means off-topic."""

    topic: int | None
    count: int
    question_words: int = 30


@dataclass(frozen=True)
class SyntheticSpec:
    topics: list[TopicSpec]
    questions: list[QuestionGroup] = field(default_factory=list)
    seed: int = 0
    off_topic_vocab_size: int = 50

    def validate(self) -> None:
        if not self.topics:
            raise DataError("need at least one topic")
        names = [t.name for t in self.topics]
        if len(set(names)) != len(names):
            raise DataError(f"topic names must be distinct, got {names}")
        for t in self.topics:
            if t.n_chunks < 1 or t.vocab_size < 2 or t.chunk_words < 2:
                raise DataError(f"invalid topic spec {t}")
        for g in self.questions:
            if g.count < 1 or g.question_words < 2:
                raise DataError(f"invalid question group {g}")
            if g.topic is not None and not 0 <= g.topic < len(self.topics):
                raise DataError(f"question group references unknown topic {g.topic}")


@dataclass(frozen=True)
class SyntheticCorpus:
    documents: list[RawDocument]
    questions: list[TestQuestion]
    doc_topics: list[int]
    question_topics: list[int | None]
    spec: SyntheticSpec


def _vocabulary(prefix: str, size: int) -> list[str]:
    letters = string.ascii_lowercase
    words = []
    for i in range(size):
        hi, lo = divmod(i, 26)
        words.append(f"{prefix}{letters[hi % 26]}{letters[lo]}")
    return words


def _zipf_weights(size: int) -> np.ndarray:
    w = 1.0 / np.arange(1, size + 1)
    return w / w.sum()


def generate_corpus(spec: SyntheticSpec) -> SyntheticCorpus:
    """Deterministic bag-of-words corpus with exact topic labels.

    One document per chunk-to-be (documents are shorter than any realistic
    chunk size, so the splitter passes them through whole).
    """
    spec.validate()
    vocabs = [_vocabulary(t.name, t.vocab_size) for t in spec.topics]
    noise_vocab = _vocabulary("offtopicz", spec.off_topic_vocab_size)
    all_vocabs = vocabs + [noise_vocab]
    for i in range(len(all_vocabs)):
        for j in range(i + 1, len(all_vocabs)):
            shared = set(all_vocabs[i]) & set(all_vocabs[j])
            if shared:
                raise DataError(f"vocabularies overlap: {sorted(shared)[:5]}")

    rng = np.random.default_rng(spec.seed)
    documents: list[RawDocument] = []
    doc_topics: list[int] = []
    topic_chunk_words: list[list[list[str]]] = []
    for ti, topic in enumerate(spec.topics):
        weights = _zipf_weights(topic.vocab_size)
        chunk_words: list[list[str]] = []
        for ci in range(topic.n_chunks):
            words = list(rng.choice(vocabs[ti], size=topic.chunk_words, p=weights))
            chunk_words.append(words)
            doc_id = f"{topic.name}-{ci:03d}"
            documents.append(
                RawDocument(id=doc_id, text=" ".join(words), source_path=f"synthetic://{doc_id}")
            )
            doc_topics.append(ti)
        topic_chunk_words.append(chunk_words)

    questions: list[TestQuestion] = []
    question_topics: list[int | None] = []
    noise_weights = _zipf_weights(spec.off_topic_vocab_size)
    for group in spec.questions:
        for qi in range(group.count):
            if group.topic is OFF_TOPIC:
                words = rng.choice(noise_vocab, size=group.question_words, p=noise_weights)
            else:
                anchors = topic_chunk_words[group.topic]
                anchor = anchors[qi % len(anchors)]
                words = rng.choice(anchor, size=group.question_words)
            questions.append(
                TestQuestion(index=len(questions), text=" ".join(words))
            )
            question_topics.append(group.topic)

    return SyntheticCorpus(
        documents=documents,
        questions=questions,
        doc_topics=doc_topics,
        question_topics=question_topics,
        spec=spec,
    )


def separation_stats(corpus: SyntheticCorpus, dimension: int = 256) -> tuple[float, float]:
    """(mean within-topic, mean cross-topic) cosine distance over document
    pairs under the offline embedder; within < cross is the generator's
    separation guarantee."""
    vectors = np.vstack([offline_embed(d.text, dimension) for d in corpus.documents])
    dist = pairwise_distances(vectors, vectors)
    topics = np.asarray(corpus.doc_topics)
    same = topics[:, None] == topics[None, :]
    off_diag = ~np.eye(len(topics), dtype=bool)
    within = dist[same & off_diag]
    cross = dist[~same]
    if within.size == 0 or cross.size == 0:
        raise DataError("separation stats need at least two topics with two chunks")
    return float(within.mean()), float(cross.mean())


def write_corpus(corpus: SyntheticCorpus, out_dir: str | Path) -> tuple[Path, Path]:
    """Write documents (one .txt per chunk) and questions.txt under out_dir;
    returns (docs directory, questions file)."""
    out = Path(out_dir)
    docs_dir = out / "docs"
    docs_dir.mkdir(parents=True, exist_ok=True)
    for doc in corpus.documents:
        (docs_dir / f"{doc.id}.txt").write_text(doc.text + "\n", encoding="utf-8")
    questions_path = out / "questions.txt"
    questions_path.write_text(
        "".join(q.text + "\n" for q in corpus.questions), encoding="utf-8"
    )
    return docs_dir, questions_path
