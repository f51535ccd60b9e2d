"""Run configuration with flags > config file > defaults layering.

The config file is TOML with keys mirroring the CLI flag names (dashes or
underscores both accepted). ``RunConfig.validate`` returns the list of
violated invariants so the validate subcommand can name each one.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .embed import ProviderConfig
from .errors import ConfigError


@dataclass
class RunConfig:
    docs: str = ""
    questions: str = ""
    provider: str = "offline"
    model: str = "offline-hash-v1"
    api_key_env: str = ""
    embed_dim: int = 256
    batch_size: int = 64
    max_retries: int = 3
    timeout: float = 30.0
    chunk_size: int = 500
    chunk_overlap: int = 50
    clusters: int | str = "auto"
    seed: int = 0
    lof_neighbors: int = 20
    lof_threshold: float = 0.5
    lof_mode: str = "novelty"
    multi_threshold: float = 0.5
    gap_threshold: float = 0.7
    theme_backend: str = "offline"
    theme_model: str = "gpt-4o-mini"
    theme_api_key_env: str = "OPENAI_API_KEY"
    max_chunks_per_prompt: int = 8
    out: str = "coverage_report.json"
    markdown_out: str = ""
    plot: bool = False
    plot_method: str = "tsne"
    cache_dir: str = ".ragcov_cache"

    def provider_config(self) -> ProviderConfig:
        return ProviderConfig(
            provider_name=self.provider,
            model_name=self.model,
            api_key_env=self.api_key_env,
            batch_size=self.batch_size,
            max_retries=self.max_retries,
            timeout=self.timeout,
            dimension=self.embed_dim,
        )

    def validate(self, check_paths: bool = True) -> list[str]:
        """All violated invariants, empty when the config is runnable."""
        problems: list[str] = []
        if not self.docs:
            problems.append("docs path is required")
        elif check_paths and not Path(self.docs).exists():
            problems.append(f"docs path does not exist: {self.docs}")
        if not self.questions:
            problems.append("questions path is required")
        elif check_paths and not Path(self.questions).exists():
            problems.append(f"questions path does not exist: {self.questions}")

        if self.provider not in ("offline", "openai", "voyage"):
            problems.append(f"unknown provider {self.provider!r}")
        elif self.provider != "offline":
            env = self.api_key_env or {
                "openai": "OPENAI_API_KEY",
                "voyage": "VOYAGE_API_KEY",
            }[self.provider]
            if not os.environ.get(env, ""):
                problems.append(
                    f"provider {self.provider!r} requires the {env} environment variable"
                )
        if self.provider == "offline" and self.embed_dim < 8:
            problems.append(f"embed_dim must be >= 8, got {self.embed_dim}")

        if self.chunk_size < 1:
            problems.append(f"chunk_size must be >= 1, got {self.chunk_size}")
        if not 0 <= self.chunk_overlap < max(self.chunk_size, 1):
            problems.append(
                f"chunk_overlap must satisfy 0 <= overlap < chunk_size, got "
                f"{self.chunk_overlap} with chunk_size {self.chunk_size}"
            )
        if self.clusters != "auto":
            try:
                if int(self.clusters) < 1:
                    problems.append(f"clusters must be >= 1 or 'auto', got {self.clusters}")
            except (TypeError, ValueError):
                problems.append(f"clusters must be an integer or 'auto', got {self.clusters!r}")
        if self.lof_neighbors < 1:
            problems.append(f"lof_neighbors must be >= 1, got {self.lof_neighbors}")
        if self.lof_mode not in ("novelty", "questions-only"):
            problems.append(f"unknown lof_mode {self.lof_mode!r}")
        if not 0.0 <= self.multi_threshold <= 2.0:
            problems.append(f"multi_threshold must be in [0, 2], got {self.multi_threshold}")
        if not 0.0 <= self.gap_threshold <= 1.0:
            problems.append(f"gap_threshold must be in [0, 1], got {self.gap_threshold}")
        if self.theme_backend not in ("offline", "remote"):
            problems.append(f"unknown theme_backend {self.theme_backend!r}")
        if self.theme_backend == "remote" and not os.environ.get(self.theme_api_key_env, ""):
            problems.append(
                f"theme_backend 'remote' requires the {self.theme_api_key_env} "
                "environment variable"
            )
        if self.batch_size < 1:
            problems.append(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_retries < 0:
            problems.append(f"max_retries must be >= 0, got {self.max_retries}")
        if self.plot_method not in ("tsne", "pca"):
            problems.append(f"unknown plot_method {self.plot_method!r}")
        if not self.out:
            problems.append("out path is required")
        return problems

    def snapshot(self) -> dict:
        return asdict(self)


_FIELD_NAMES = {f.name for f in fields(RunConfig)}


def load_config_file(path: str | Path) -> dict:
    """Parse a TOML config file into normalized RunConfig keys."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    normalized = {}
    for key, value in raw.items():
        name = key.replace("-", "_")
        if name not in _FIELD_NAMES:
            raise ConfigError(f"unknown config key {key!r} in {path}")
        normalized[name] = value
    return normalized


def merge_config(file_values: dict | None, flag_values: dict | None) -> RunConfig:
    """Layer config sources: flags beat the file, the file beats defaults.

    ``flag_values`` entries that are None are treated as unset.
    """
    merged = asdict(RunConfig())
    for source in (file_values or {}), (flag_values or {}):
        for key, value in source.items():
            if value is None:
                continue
            if key not in _FIELD_NAMES:
                raise ConfigError(f"unknown config key {key!r}")
            merged[key] = value
    cfg = RunConfig(**merged)
    if cfg.clusters != "auto":
        try:
            cfg.clusters = int(cfg.clusters)
        except (TypeError, ValueError):
            pass  # validate() reports it
    return cfg
