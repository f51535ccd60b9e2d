import hashlib

import numpy as np
import pytest

from oracles import silhouette
from ragcov.coverage import CoverageScores
from ragcov.errors import DataError
from ragcov.viz import (
    ROLE_CHUNK,
    ROLE_INLIER,
    ROLE_OUTLIER,
    project_2d,
    render_scatter,
)


def scores() -> CoverageScores:
    return CoverageScores(basic=0.694, weighted=0.71, multi_threshold=0.65, per_cluster=[])


class TestProject2D:
    def test_shape_and_finiteness(self, rng):
        x = rng.normal(size=(25, 16))
        proj = project_2d(x, method="tsne", seed=0)
        assert proj.points.shape == (25, 2)
        assert np.all(np.isfinite(proj.points))
        assert proj.method == "tsne"

    def test_tsne_separates_far_blobs(self):
        rng = np.random.default_rng(7)
        a = rng.normal(scale=0.5, size=(30, 64)) + np.full(64, 8.0)
        b = rng.normal(scale=0.5, size=(30, 64)) - np.full(64, 8.0)
        x = np.vstack([a, b])
        labels = [0] * 30 + [1] * 30
        proj = project_2d(x, method="tsne", seed=1)
        assert silhouette(proj.points.tolist(), labels) > 0.5

    def test_pca_recovers_2d_input(self, rng):
        x = rng.normal(size=(20, 2))
        proj = project_2d(x, method="pca", seed=0)
        # rigid recovery up to rotation/reflection: pairwise distances equal
        def pdist(m):
            diff = m[:, None, :] - m[None, :, :]
            return np.sqrt((diff**2).sum(-1))

        assert np.allclose(pdist(proj.points), pdist(x), atol=1e-9)

    def test_pca_sign_convention_deterministic(self, rng):
        x = rng.normal(size=(15, 6))
        a = project_2d(x, method="pca", seed=0).points
        b = project_2d(x, method="pca", seed=0).points
        assert np.array_equal(a, b)

    def test_tsne_deterministic_for_seed(self, rng):
        x = rng.normal(size=(12, 8))
        a = project_2d(x, method="tsne", seed=3).points
        b = project_2d(x, method="tsne", seed=3).points
        assert np.array_equal(a, b)

    def test_too_few_points_for_tsne(self, rng):
        with pytest.raises(DataError, match="at least 4"):
            project_2d(rng.normal(size=(3, 5)), method="tsne")

    def test_perplexity_guidance(self, rng):
        with pytest.raises(DataError, match="perplexity"):
            project_2d(rng.normal(size=(10, 5)), method="tsne", perplexity=5.0)

    def test_roles_carried_through(self, rng):
        x = rng.normal(size=(6, 4))
        roles = [ROLE_CHUNK] * 4 + [ROLE_INLIER, ROLE_OUTLIER]
        proj = project_2d(x, method="pca", roles=roles, cluster_of=[0, 0, 1, 1])
        assert proj.roles == roles
        assert proj.cluster_of.tolist() == [0, 0, 1, 1]

    def test_role_length_mismatch(self, rng):
        with pytest.raises(DataError):
            project_2d(rng.normal(size=(4, 4)), method="pca", roles=[ROLE_CHUNK])


class TestRenderScatter:
    def build_projection(self, rng):
        x = rng.normal(size=(12, 8))
        roles = [ROLE_CHUNK] * 10 + [ROLE_INLIER, ROLE_OUTLIER]
        cluster_of = [0] * 5 + [1] * 5
        return project_2d(x, method="pca", roles=roles, cluster_of=cluster_of)

    def test_element_counts(self, rng, tmp_path):
        proj = self.build_projection(rng)
        out = render_scatter(proj, scores(), tmp_path / "plot.svg")
        svg = out.read_text()
        assert svg.count('class="pt') == 12
        assert 'id="legend"' in svg
        assert svg.count('class="metric"') == 3

    def test_outlier_labelled(self, rng, tmp_path):
        proj = self.build_projection(rng)
        svg = render_scatter(proj, scores(), tmp_path / "p.svg").read_text()
        assert 'class="pt outlier"' in svg
        assert 'class="outlier-label"' in svg and ">Q1<" in svg

    def test_byte_identical_rerender(self, rng, tmp_path):
        proj = self.build_projection(rng)
        a = render_scatter(proj, scores(), tmp_path / "a.svg").read_bytes()
        b = render_scatter(proj, scores(), tmp_path / "b.svg").read_bytes()
        assert hashlib.sha256(a).hexdigest() == hashlib.sha256(b).hexdigest()

    def test_metric_annotations_present(self, rng, tmp_path):
        proj = self.build_projection(rng)
        svg = render_scatter(proj, scores(), tmp_path / "m.svg").read_text()
        assert "basic coverage: 0.6940" in svg
        assert "weighted coverage: 0.7100" in svg
        assert "multi-cluster coverage: 0.6500" in svg

    def test_unwritable_path_is_error(self, rng, tmp_path):
        proj = self.build_projection(rng)
        with pytest.raises(DataError, match="cannot write"):
            render_scatter(proj, scores(), tmp_path / "missing-dir" / "x.svg")
