"""2-D projection and SVG scatter rendering.

t-SNE is the exact O(N^2) variant with PCA initialization; the corpora this
tool targets are a few hundred chunks, where exact gradients are cheap and
reproducible. Above 5000 points the projection falls back to plain PCA.
Output is hand-assembled SVG with all coordinates fixed to 4 decimals, so
identical runs produce byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .coverage import CoverageScores
from .errors import DataError
from .geometry import as_matrix

TSNE_FALLBACK_POINTS = 5000

ROLE_CHUNK = "chunk"
ROLE_INLIER = "inlier_question"
ROLE_OUTLIER = "outlier_question"

_PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5",
    "#c49c94", "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5",
]


@dataclass(frozen=True)
class Projection2D:
    """Joint 2-D layout of chunks followed by questions.

    ``roles[i]`` is chunk / inlier_question / outlier_question for row i;
    ``cluster_of`` aligns with the chunk rows only.
    """

    points: np.ndarray
    roles: list[str]
    cluster_of: np.ndarray
    method: str
    seed: int


def _pca_components(x: np.ndarray, n_components: int = 2) -> np.ndarray:
    centered = x - x.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    comps = vt[:n_components]
    if comps.shape[0] < n_components:
        comps = np.vstack(
            [comps, np.zeros((n_components - comps.shape[0], x.shape[1]))]
        )
    for i in range(n_components):
        j = int(np.argmax(np.abs(comps[i])))
        if comps[i, j] < 0:
            comps[i] = -comps[i]
    return comps


def _pca_2d(x: np.ndarray) -> np.ndarray:
    comps = _pca_components(x, 2)
    return (x - x.mean(axis=0)) @ comps.T


def _conditional_probs(d2: np.ndarray, perplexity: float) -> np.ndarray:
    """Row-stochastic affinities matching log(perplexity) entropy per point,
    found by binary search over the Gaussian precision."""
    n = d2.shape[0]
    target = np.log(perplexity)
    p = np.zeros((n, n))
    for i in range(n):
        row = np.delete(d2[i], i)
        beta, beta_min, beta_max = 1.0, 0.0, np.inf
        for _ in range(64):
            expo = np.exp(-row * beta)
            total = expo.sum()
            if total <= 0.0:
                h, probs = 0.0, np.zeros_like(row)
            else:
                probs = expo / total
                h = np.log(total) + beta * float(row @ expo) / total
            if abs(h - target) < 1e-7:
                break
            if h > target:
                beta_min = beta
                beta = beta * 2.0 if beta_max == np.inf else (beta + beta_max) / 2.0
            else:
                beta_max = beta
                beta = (beta + beta_min) / 2.0
        p[i, np.arange(n) != i] = probs
    return p


def _tsne_2d(
    x: np.ndarray,
    seed: int,
    perplexity: float,
    n_iter: int = 1000,
    early_iters: int = 250,
    exaggeration: float = 12.0,
    learning_rate: float = 200.0,
) -> np.ndarray:
    n = x.shape[0]
    sq_norms = np.einsum("ij,ij->i", x, x)
    d2 = np.clip(sq_norms[:, None] - 2.0 * x @ x.T + sq_norms[None, :], 0.0, None)

    cond = _conditional_probs(d2, perplexity)
    p = cond + cond.T
    p /= max(p.sum(), 1e-12)
    p = np.maximum(p, 1e-12)

    # PCA init at tiny scale, plus seeded jitter so coincident points separate.
    y = _pca_2d(x)
    spread = y.std(axis=0).max()
    y = y / (spread / 1e-4) if spread > 0 else y
    y = y + np.random.default_rng(seed).normal(0.0, 1e-6, size=y.shape)

    velocity = np.zeros_like(y)
    gains = np.ones_like(y)
    for it in range(n_iter):
        yd2 = np.einsum("ij,ij->i", y, y)
        num = 1.0 / (1.0 + yd2[:, None] - 2.0 * y @ y.T + yd2[None, :])
        np.fill_diagonal(num, 0.0)
        q = np.maximum(num / max(num.sum(), 1e-12), 1e-12)

        p_eff = p * exaggeration if it < early_iters else p
        pq_num = (p_eff - q) * num
        grad = 4.0 * ((np.diag(pq_num.sum(axis=1)) - pq_num) @ y)

        momentum = 0.5 if it < early_iters else 0.8
        same_sign = np.sign(grad) == np.sign(velocity)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        gains = np.maximum(gains, 0.01)
        velocity = momentum * velocity - learning_rate * gains * grad
        y = y + velocity
        y = y - y.mean(axis=0)
    return y


def project_2d(
    embeddings,
    method: str = "tsne",
    seed: int = 0,
    perplexity: float | None = None,
    roles: list[str] | None = None,
    cluster_of=None,
) -> Projection2D:
    """Project embeddings to 2-D for plotting.

    ``roles``/``cluster_of`` are carried through for the renderer; when
    omitted every point is treated as a chunk of cluster 0.
    """
    x = as_matrix(embeddings)
    n = x.shape[0]
    if method not in ("tsne", "pca"):
        raise DataError(f"unknown projection method {method!r}")
    if method == "tsne" and n > TSNE_FALLBACK_POINTS:
        method = "pca"

    if method == "tsne":
        if n < 4:
            raise DataError(f"t-SNE needs at least 4 points, got {n}; use method='pca'")
        limit = (n - 1) / 3.0
        if perplexity is None:
            perplexity = min(30.0, limit)
        elif not 0 < perplexity < limit:
            raise DataError(
                f"perplexity must be in (0, {limit:.2f}) for {n} points, got "
                f"{perplexity}; lower it or add points"
            )
        points = _tsne_2d(x, seed, perplexity)
    else:
        if n < 2:
            raise DataError("PCA projection needs at least 2 points")
        points = _pca_2d(x)

    if not np.all(np.isfinite(points)):
        raise DataError("projection produced non-finite coordinates")
    roles = roles if roles is not None else [ROLE_CHUNK] * n
    if len(roles) != n:
        raise DataError(f"{len(roles)} roles for {n} points")
    n_chunks = sum(1 for r in roles if r == ROLE_CHUNK)
    cluster_arr = (
        np.asarray(cluster_of, dtype=int)
        if cluster_of is not None
        else np.zeros(n_chunks, dtype=int)
    )
    if cluster_arr.shape[0] != n_chunks:
        raise DataError(f"{cluster_arr.shape[0]} cluster ids for {n_chunks} chunks")
    return Projection2D(
        points=points, roles=list(roles), cluster_of=cluster_arr, method=method, seed=seed
    )


def _fmt(v: float) -> str:
    return f"{v:.4f}"


def render_scatter(
    proj: Projection2D,
    scores: CoverageScores,
    out_path: str | Path,
    width: int = 840,
    height: int = 620,
) -> Path:
    """Write a self-contained SVG scatter plot.

    Chunks are small cluster-colored dots, inlier questions large dark
    triangles, outlier questions red crosses with a label. A legend and a
    three-line coverage annotation block are always present.
    """
    pts = proj.points
    margin = 40.0
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)

    def sx(v: float) -> str:
        return _fmt(margin + (v - lo[0]) / span[0] * (width - 2 * margin))

    def sy(v: float) -> str:
        return _fmt(height - margin - (v - lo[1]) / span[1] * (height - 2 * margin))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]

    chunk_rows = [i for i, r in enumerate(proj.roles) if r == ROLE_CHUNK]
    question_no = 0
    for i, role in enumerate(proj.roles):
        x, y = sx(pts[i, 0]), sy(pts[i, 1])
        if role == ROLE_CHUNK:
            cid = int(proj.cluster_of[chunk_rows.index(i)])
            color = _PALETTE[cid % len(_PALETTE)]
            parts.append(f'<circle class="pt chunk" cx="{x}" cy="{y}" r="3" fill="{color}"/>')
        elif role == ROLE_INLIER:
            xf, yf = float(x), float(y)
            d = (
                f"M {_fmt(xf)} {_fmt(yf - 6)} L {_fmt(xf + 6)} {_fmt(yf + 5)} "
                f"L {_fmt(xf - 6)} {_fmt(yf + 5)} Z"
            )
            parts.append(f'<path class="pt question" d="{d}" fill="#222222"/>')
            question_no += 1
        elif role == ROLE_OUTLIER:
            xf, yf = float(x), float(y)
            d = (
                f"M {_fmt(xf - 5)} {_fmt(yf - 5)} L {_fmt(xf + 5)} {_fmt(yf + 5)} "
                f"M {_fmt(xf - 5)} {_fmt(yf + 5)} L {_fmt(xf + 5)} {_fmt(yf - 5)}"
            )
            parts.append(
                f'<path class="pt outlier" d="{d}" stroke="#d62728" '
                'stroke-width="2.5" fill="none"/>'
            )
            parts.append(
                f'<text class="outlier-label" x="{_fmt(float(x) + 7)}" y="{_fmt(float(y) - 7)}" '
                f'font-size="11" fill="#d62728">Q{question_no}</text>'
            )
            question_no += 1
        else:
            raise DataError(f"unknown role {role!r}")

    cluster_ids = sorted({int(c) for c in proj.cluster_of}) if chunk_rows else []
    parts.append('<g id="legend" font-size="12" font-family="sans-serif">')
    ly = 20.0
    for cid in cluster_ids:
        color = _PALETTE[cid % len(_PALETTE)]
        parts.append(f'<circle cx="{_fmt(width - 170.0)}" cy="{_fmt(ly)}" r="4" fill="{color}"/>')
        parts.append(f'<text x="{_fmt(width - 160.0)}" y="{_fmt(ly + 4)}">cluster {cid}</text>')
        ly += 16.0
    parts.append(
        f'<path d="M {_fmt(width - 174.0)} {_fmt(ly + 4)} L {_fmt(width - 166.0)} {_fmt(ly + 4)}'
        f' M {_fmt(width - 170.0)} {_fmt(ly)} L {_fmt(width - 170.0)} {_fmt(ly + 8)}" '
        'stroke="#222222" stroke-width="2"/>'
    )
    parts.append(f'<text x="{_fmt(width - 160.0)}" y="{_fmt(ly + 8)}">question (inlier)</text>')
    ly += 16.0
    parts.append(
        f'<path d="M {_fmt(width - 174.0)} {_fmt(ly)} L {_fmt(width - 166.0)} {_fmt(ly + 8)} '
        f'M {_fmt(width - 174.0)} {_fmt(ly + 8)} L {_fmt(width - 166.0)} {_fmt(ly)}" '
        'stroke="#d62728" stroke-width="2"/>'
    )
    parts.append(f'<text x="{_fmt(width - 160.0)}" y="{_fmt(ly + 8)}">question (outlier)</text>')
    parts.append("</g>")

    parts.append('<g id="metrics" font-size="13" font-family="sans-serif" fill="#333333">')
    parts.append(f'<text class="metric" x="12" y="20">basic coverage: {_fmt(scores.basic)}</text>')
    parts.append(
        f'<text class="metric" x="12" y="38">weighted coverage: {_fmt(scores.weighted)}</text>'
    )
    parts.append(
        '<text class="metric" x="12" y="56">multi-cluster coverage: '
        f"{_fmt(scores.multi_threshold)}</text>"
    )
    parts.append("</g>")
    parts.append("</svg>")

    out = Path(out_path)
    try:
        out.write_text("\n".join(parts) + "\n", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write plot to {out}: {exc}") from exc
    return out
