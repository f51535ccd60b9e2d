"""Corpus loading and recursive chunking.

Documents are split with a recursive splitter: try the first separator, and
re-split any piece that is still too large with the next separator, down to a
character-level fallback. Chunks are contiguous character spans of the source
document, so stitching them back together (dropping the declared overlaps) is
lossless. Sizes are measured in "tokens", approximated by whitespace-delimited
words unless a custom tokenizer is supplied.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .errors import DataError

DEFAULT_SEPARATORS: tuple[str, ...] = ("\n\n", "\n", " ", "")
TEXT_SUFFIXES: frozenset[str] = frozenset({".txt", ".md", ".markdown", ".text"})


@dataclass(frozen=True)
class RawDocument:
    """One loaded source file, before chunking."""

    id: str
    text: str
    source_path: str


@dataclass(frozen=True)
class DocumentChunk:
    """A contiguous segment of one document.

    ``char_start``/``char_end`` locate the chunk inside the source text;
    consecutive chunks of the same document may overlap by construction.
    """

    index: int
    doc_id: str
    text: str
    token_count: int
    char_start: int
    char_end: int


@dataclass(frozen=True)
class TestQuestion:
    index: int
    text: str


@dataclass(frozen=True)
class ChunkingConfig:
    """Splitter parameters. ``tokenizer`` defaults to whitespace splitting."""

    chunk_size: int = 500
    chunk_overlap: int = 50
    separators: tuple[str, ...] = DEFAULT_SEPARATORS
    tokenizer: Callable[[str], list[str]] | None = field(default=None, compare=False)

    def validate(self) -> None:
        if self.chunk_size < 1:
            raise DataError(f"chunk_size must be >= 1, got {self.chunk_size}")
        if not 0 <= self.chunk_overlap < self.chunk_size:
            raise DataError(
                "chunk_overlap must satisfy 0 <= overlap < chunk_size, got "
                f"overlap={self.chunk_overlap} size={self.chunk_size}"
            )
        if not self.separators or self.separators[-1] != "":
            raise DataError("separators must be non-empty and end with ''")


def load_documents(
    paths: Sequence[str | Path],
    formats: Iterable[str] = TEXT_SUFFIXES,
    warnings: list[str] | None = None,
) -> list[RawDocument]:
    """Load plain-text/Markdown documents from files or directories.

    Unreadable or empty files are skipped with a warning recorded per file;
    loading fails only when nothing readable remains. Documents are ordered
    lexicographically by path and ids are the path strings.
    """
    formats = {s.lower() for s in formats}
    warnings = warnings if warnings is not None else []
    files: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            files.extend(
                child
                for child in p.rglob("*")
                if child.is_file() and child.suffix.lower() in formats
            )
        else:
            files.append(p)
    files.sort(key=str)

    docs: list[RawDocument] = []
    for path in files:
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            warnings.append(f"unreadable file {path}: {exc}")
            continue
        except UnicodeDecodeError as exc:
            warnings.append(f"undecodable file {path}: {exc}")
            continue
        text = text.replace("\r\n", "\n").replace("\r", "\n")
        if not text.strip():
            warnings.append(f"empty document: {path}")
            continue
        docs.append(RawDocument(id=str(path), text=text, source_path=str(path)))

    if not docs:
        raise DataError(
            "no readable documents"
            + (" (" + "; ".join(warnings) + ")" if warnings else "")
        )
    return docs


def load_questions(path: str | Path) -> list[TestQuestion]:
    """Load test questions from a ``.txt`` (one per line) or ``.json`` (array
    of strings) file. Blank lines are dropped; indices follow file order."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"unreadable question file {path}: {exc}") from exc

    if path.suffix.lower() == ".json":
        parsed = json.loads(raw)
        if not isinstance(parsed, list) or not all(isinstance(q, str) for q in parsed):
            raise DataError(f"{path}: expected a JSON array of strings")
        lines = parsed
    else:
        lines = raw.splitlines()

    questions = [
        TestQuestion(index=i, text=line.strip())
        for i, line in enumerate(line for line in lines if line.strip())
    ]
    if not questions:
        raise DataError("no test questions")
    return questions


def _find_separator(
    text: str, start: int, end: int, separators: Sequence[str]
) -> tuple[str, Sequence[str]]:
    """First separator present in text[start:end]; '' always matches."""
    for i, sep in enumerate(separators):
        if sep == "" or text.find(sep, start, end) != -1:
            return sep, separators[i + 1 :]
    return "", ()


def _split_spans(text: str, start: int, end: int, sep: str) -> list[tuple[int, int]]:
    """Tile [start, end) into pieces, attaching each separator to the piece
    before it. Character-level when ``sep`` is ''."""
    if sep == "":
        return [(i, i + 1) for i in range(start, end)]
    spans: list[tuple[int, int]] = []
    pos = start
    while True:
        hit = text.find(sep, pos, end)
        if hit == -1:
            break
        spans.append((pos, hit + len(sep)))
        pos = hit + len(sep)
    if pos < end:
        spans.append((pos, end))
    return spans


def _pack_spans(
    pieces: list[tuple[int, int]],
    sizes: list[int],
    chunk_size: int,
    overlap: int,
) -> list[tuple[int, int]]:
    """Greedily merge adjacent pieces into chunks of at most ``chunk_size``
    units, retaining a trailing window of at most ``overlap`` units as the
    start of the next chunk."""
    chunks: list[tuple[int, int]] = []
    window: list[int] = []
    total = 0
    for i, size in enumerate(sizes):
        if window and total + size > chunk_size:
            chunks.append((pieces[window[0]][0], pieces[window[-1]][1]))
            while window and (
                total > overlap or (total + size > chunk_size and total > 0)
            ):
                total -= sizes[window[0]]
                window.pop(0)
        window.append(i)
        total += size
    if window:
        chunks.append((pieces[window[0]][0], pieces[window[-1]][1]))
    return chunks


def _recursive_spans(
    text: str,
    start: int,
    end: int,
    separators: Sequence[str],
    chunk_size: int,
    overlap: int,
    size_of: Callable[[int, int], int],
) -> list[tuple[int, int]]:
    sep, remaining = _find_separator(text, start, end, separators)
    pieces = [(s, e) for s, e in _split_spans(text, start, end, sep) if e > s]

    chunks: list[tuple[int, int]] = []
    good: list[tuple[int, int]] = []
    good_sizes: list[int] = []
    for piece in pieces:
        size = size_of(*piece)
        if size <= chunk_size:
            good.append(piece)
            good_sizes.append(size)
            continue
        # Oversized piece: flush what we have, then split it finer.
        chunks.extend(_pack_spans(good, good_sizes, chunk_size, overlap))
        good, good_sizes = [], []
        if remaining:
            chunks.extend(
                _recursive_spans(
                    text, piece[0], piece[1], remaining, chunk_size, overlap, size_of
                )
            )
        else:
            chunks.append(piece)  # nothing finer to try
    chunks.extend(_pack_spans(good, good_sizes, chunk_size, overlap))
    return chunks


def chunk_document(
    doc: RawDocument, cfg: ChunkingConfig, start_index: int = 0
) -> list[DocumentChunk]:
    """Split one document into overlapping chunks.

    Every chunk is an exact character span of ``doc.text``; spans tile the
    document (first starts at 0, last ends at the end, and each chunk begins
    at or before the previous chunk's end), so overlap-aware concatenation
    reconstructs the source exactly.
    """
    cfg.validate()
    tokenizer = cfg.tokenizer or str.split
    text = doc.text

    def size_of(s: int, e: int) -> int:
        return len(tokenizer(text[s:e]))

    spans = _recursive_spans(
        text, 0, len(text), cfg.separators, cfg.chunk_size, cfg.chunk_overlap, size_of
    )
    return [
        DocumentChunk(
            index=start_index + i,
            doc_id=doc.id,
            text=text[s:e],
            token_count=size_of(s, e),
            char_start=s,
            char_end=e,
        )
        for i, (s, e) in enumerate(spans)
    ]


def chunk_corpus(docs: Sequence[RawDocument], cfg: ChunkingConfig) -> list[DocumentChunk]:
    """Chunk every document, assigning contiguous global indices."""
    chunks: list[DocumentChunk] = []
    for doc in docs:
        chunks.extend(chunk_document(doc, cfg, start_index=len(chunks)))
    return chunks


def reconstruct_document(chunks: Sequence[DocumentChunk]) -> str:
    """Rebuild one document's text from its chunks, dropping span overlaps."""
    parts: list[str] = []
    prev_end = 0
    for i, chunk in enumerate(chunks):
        if i == 0:
            parts.append(chunk.text)
        else:
            shared = prev_end - chunk.char_start
            if shared < 0:
                raise DataError(f"gap before chunk {chunk.index}")
            parts.append(chunk.text[shared:])
        prev_end = chunk.char_end
    return "".join(parts)
