import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from ragcov.corpus import RawDocument, TestQuestion

TestQuestion.__test__ = False  # dataclass, not a pytest class


def random_embeddings(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    """Random non-degenerate embedding rows."""
    return rng.normal(size=(n, dim)) + rng.normal(size=dim)


def nonneg_embeddings(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    """Nonnegative rows: pairwise cosine similarity >= 0, like real embedding
    models, so every coverage value lands in [0, 1]."""
    return np.abs(rng.normal(size=(n, dim))) + 1e-3


def word_document(rng: np.random.Generator, n_words: int, doc_id: str = "doc") -> RawDocument:
    words = [f"w{rng.integers(0, 500):03d}" for _ in range(n_words)]
    return RawDocument(id=doc_id, text=" ".join(words), source_path=doc_id)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
