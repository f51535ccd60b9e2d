"""Embedding providers with a content-addressed disk cache.

Three providers are supported: ``openai`` and ``voyage`` speak the vendors'
HTTPS embedding APIs; ``offline`` is a deterministic hashing embedder that
needs no credentials, so the full pipeline runs in CI. Vectors are cached one
file per (provider, model, text) key and stored as received; normalization
happens downstream where the geometry needs it.
"""

from __future__ import annotations

import hashlib
import os
import struct
import tempfile
import time
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
import requests

from .errors import ConfigError, DataError, ProviderError
from .textutil import content_words

CACHE_MAGIC = b"EMBV"
CACHE_VERSION = 1

_PROVIDER_URLS = {
    "openai": "https://api.openai.com/v1/embeddings",
    "voyage": "https://api.voyageai.com/v1/embeddings",
}
_DEFAULT_KEY_ENVS = {"openai": "OPENAI_API_KEY", "voyage": "VOYAGE_API_KEY"}


@dataclass(frozen=True)
class ProviderConfig:
    """Which embedding backend to use and how to talk to it.

    ``dimension`` is honored by the offline provider only; remote providers
    return whatever width the model produces.
    """

    provider_name: str = "offline"
    model_name: str = "offline-hash-v1"
    api_key_env: str = ""
    batch_size: int = 64
    max_retries: int = 3
    timeout: float = 30.0
    dimension: int = 256

    def validate(self) -> None:
        if self.provider_name not in ("openai", "voyage", "offline"):
            raise ConfigError(f"unknown provider {self.provider_name!r}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_retries < 0:
            raise ConfigError(f"max_retries must be >= 0, got {self.max_retries}")
        if self.provider_name == "offline" and self.dimension < 8:
            raise ConfigError(f"offline dimension must be >= 8, got {self.dimension}")

    def key_env(self) -> str:
        return self.api_key_env or _DEFAULT_KEY_ENVS.get(self.provider_name, "")


@lru_cache(maxsize=1 << 16)
def _word_vector(word: str, dimension: int) -> np.ndarray:
    seed = int.from_bytes(hashlib.sha256(word.encode("utf-8")).digest()[:8], "little")
    v = np.random.default_rng(seed).standard_normal(dimension)
    v /= np.linalg.norm(v)
    v.flags.writeable = False
    return v


def offline_embed(text: str, dimension: int = 256) -> np.ndarray:
    """Deterministic bag-of-words embedding.

    Each distinct content word is hashed to a seed that generates a fixed
    pseudo-random unit vector; the text embedding is the normalized sum over
    the text's word set. Texts sharing vocabulary land measurably closer in
    cosine distance than texts with disjoint vocabularies.
    """
    if dimension < 8:
        raise DataError(f"offline embedding dimension must be >= 8, got {dimension}")
    words = sorted(set(content_words(text)))
    if not words:
        raise DataError("cannot embed blank text")
    total = np.zeros(dimension)
    for word in words:
        total += _word_vector(word, dimension)
    norm = np.linalg.norm(total)
    if norm < 1e-12:
        raise DataError("degenerate offline embedding (word vectors cancelled)")
    return total / norm


class EmbeddingCache:
    """One file per key under ``directory``; filename is the hex key.

    Payload: 4-byte magic, version byte, little-endian uint32 dimension,
    then float64 values. Writes go through a temp file and rename, so
    concurrent readers never observe a partial vector.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key_for(provider_name: str, model_name: str, text: str) -> str:
        h = hashlib.sha256()
        for part in (provider_name, model_name, text):
            h.update(part.encode("utf-8"))
            h.update(b"\x00")
        return h.hexdigest()

    def get(self, key: str) -> np.ndarray | None:
        path = self.directory / key
        try:
            blob = path.read_bytes()
        except OSError:
            return None
        header = struct.calcsize("<4sBI")
        if len(blob) < header:
            return None
        magic, version, dim = struct.unpack_from("<4sBI", blob)
        if magic != CACHE_MAGIC or version != CACHE_VERSION:
            return None
        values = np.frombuffer(blob, dtype="<f8", offset=header)
        if values.shape[0] != dim:
            return None  # truncated; treat as a miss and rewrite
        return values.astype(np.float64)

    def put(self, key: str, vector: np.ndarray) -> None:
        vector = np.asarray(vector, dtype=np.float64)
        blob = struct.pack("<4sBI", CACHE_MAGIC, CACHE_VERSION, vector.shape[0])
        blob += vector.astype("<f8").tobytes()
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(blob)
            os.replace(tmp, self.directory / key)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise


def _http_post_json(url: str, headers: dict, payload: dict, timeout: float) -> dict:
    """Single POST returning parsed JSON; isolated for tests to stub."""
    resp = requests.post(url, headers=headers, json=payload, timeout=timeout)
    if resp.status_code in (429,) or resp.status_code >= 500:
        raise ProviderError(f"{url} returned HTTP {resp.status_code}")
    if resp.status_code != 200:
        raise ConfigError(f"{url} rejected the request: HTTP {resp.status_code} {resp.text[:200]}")
    return resp.json()


def _remote_embed_batch(cfg: ProviderConfig, texts: list[str]) -> list[list[float]]:
    env = cfg.key_env()
    api_key = os.environ.get(env, "")
    if not api_key:
        raise ConfigError(
            f"provider {cfg.provider_name!r} requires the {env or 'API key'} "
            "environment variable"
        )
    url = _PROVIDER_URLS[cfg.provider_name]
    headers = {"Authorization": f"Bearer {api_key}"}
    payload = {"model": cfg.model_name, "input": texts}
    body = _http_post_json(url, headers, payload, cfg.timeout)
    try:
        data = sorted(body["data"], key=lambda item: item["index"])
        return [item["embedding"] for item in data]
    except (KeyError, TypeError) as exc:
        raise ProviderError(f"malformed embedding response from {url}: {exc}") from exc


def _embed_batch(cfg: ProviderConfig, texts: list[str]) -> list[list[float]]:
    if cfg.provider_name == "offline":
        return [offline_embed(t, cfg.dimension).tolist() for t in texts]
    return _remote_embed_batch(cfg, texts)


def _embed_batch_with_retry(cfg: ProviderConfig, texts: list[str]) -> list[list[float]]:
    delay = 0.5
    for attempt in range(cfg.max_retries + 1):
        try:
            return _embed_batch(cfg, texts)
        except ProviderError:
            if attempt == cfg.max_retries:
                raise ProviderError(
                    f"{cfg.provider_name} embedding request failed after "
                    f"{cfg.max_retries + 1} attempts (model={cfg.model_name}, "
                    f"batch of {len(texts)} texts)"
                )
            time.sleep(delay)
            delay *= 2
    raise AssertionError("unreachable")


def embed_texts(
    texts: list[str],
    cfg: ProviderConfig,
    cache: EmbeddingCache | None = None,
) -> np.ndarray:
    """Embed texts in order, consulting the cache before the provider.

    Returns a float64 matrix with one row per input text. Cache misses are
    fetched in batches of ``cfg.batch_size`` with exponential-backoff retry.
    A dimension mismatch anywhere aborts the run: mixing embedding widths
    silently would corrupt every downstream distance.
    """
    cfg.validate()
    if not texts:
        raise DataError("no texts to embed")
    if any(not t.strip() for t in texts):
        bad = next(i for i, t in enumerate(texts) if not t.strip())
        raise DataError(f"text {bad} is blank")
    if cfg.provider_name != "offline" and not os.environ.get(cfg.key_env(), ""):
        raise ConfigError(
            f"provider {cfg.provider_name!r} requires the "
            f"{cfg.key_env() or 'API key'} environment variable"
        )

    keys = [cache.key_for(cfg.provider_name, cfg.model_name, t) if cache else "" for t in texts]
    vectors: list[np.ndarray | None] = [None] * len(texts)
    misses: list[int] = []
    for i, text in enumerate(texts):
        hit = cache.get(keys[i]) if cache else None
        if hit is None:
            misses.append(i)
        else:
            vectors[i] = hit

    for lo in range(0, len(misses), cfg.batch_size):
        batch = misses[lo : lo + cfg.batch_size]
        rows = _embed_batch_with_retry(cfg, [texts[i] for i in batch])
        if len(rows) != len(batch):
            raise ProviderError(
                f"provider returned {len(rows)} vectors for {len(batch)} texts"
            )
        for i, row in zip(batch, rows):
            vec = np.asarray(row, dtype=np.float64)
            if vec.ndim != 1 or vec.size == 0 or not np.all(np.isfinite(vec)):
                raise DataError(f"provider returned a malformed vector for text {i}")
            vectors[i] = vec
            if cache:
                cache.put(keys[i], vec)

    dims = {v.shape[0] for v in vectors}  # type: ignore[union-attr]
    if len(dims) != 1:
        raise DataError(f"embedding dimension mismatch across texts: {sorted(dims)}")
    return np.vstack(vectors)
