import numpy as np
import pytest

from needminer.errors import SamplingError
from needminer.sampling import (
    SamplingSpec,
    Strategy,
    apply_sampling,
    smote_generate,
)
from needminer.textproc import FeatureVector, to_matrix


def vec(values):
    return FeatureVector.from_dense(np.asarray(values, dtype=float))


def cloud(n_major, n_minor, dim=4, seed=0):
    rng = np.random.default_rng(seed)
    vectors, labels = [], []
    for _ in range(n_major):
        vectors.append(vec(rng.integers(1, 6, size=dim)))
        labels.append(0)
    for _ in range(n_minor):
        vectors.append(vec(rng.integers(1, 6, size=dim)))
        labels.append(1)
    return vectors, labels


class TestApplySampling:
    def test_none_identity(self):
        vectors, labels = cloud(8, 2)
        result = apply_sampling(vectors, labels, SamplingSpec(Strategy.NONE))
        assert result.vectors == list(vectors)
        assert result.labels == list(labels)

    def test_undersample_counts(self):
        vectors, labels = cloud(80, 20)
        result = apply_sampling(vectors, labels, SamplingSpec(Strategy.UNDERSAMPLE, seed=1))
        assert result.labels.count(0) == 20
        assert result.labels.count(1) == 20

    def test_undersample_subset_of_input(self):
        vectors, labels = cloud(30, 10)
        result = apply_sampling(vectors, labels, SamplingSpec(Strategy.UNDERSAMPLE, seed=3))
        pool = {id(v) for v in vectors}
        assert all(id(v) in pool for v in result.vectors)

    def test_oversample_balances_and_keeps_input(self):
        vectors, labels = cloud(50, 10)
        result = apply_sampling(vectors, labels, SamplingSpec(Strategy.OVERSAMPLE, seed=2))
        assert result.labels.count(0) == 50
        assert result.labels.count(1) == 50
        assert result.vectors[: len(vectors)] == list(vectors)
        minority_pool = {id(v) for v, y in zip(vectors, labels) if y == 1}
        assert all(id(v) in minority_pool for v in result.vectors[len(vectors) :])

    def test_smote_balances_with_synthetics(self):
        vectors, labels = cloud(80, 20)
        result = apply_sampling(vectors, labels, SamplingSpec(Strategy.SMOTE, smote_k=5, seed=4))
        assert result.labels.count(0) == 80
        assert result.labels.count(1) == 80
        assert len(result.synthetic_origins) == 60

    def test_smote_segment_identity(self):
        vectors, labels = cloud(40, 12, dim=6, seed=9)
        result = apply_sampling(vectors, labels, SamplingSpec(Strategy.SMOTE, smote_k=3, seed=5))
        n_input = len(vectors)
        for offset, origin in enumerate(result.synthetic_origins):
            synthetic = result.vectors[n_input + offset].to_dense()
            base = vectors[origin.base_index].to_dense()
            neighbor = vectors[origin.neighbor_index].to_dense()
            expected = base + origin.u * (neighbor - base)
            assert np.allclose(synthetic, expected, atol=1e-9)
            assert labels[origin.base_index] == 1
            assert labels[origin.neighbor_index] == 1
            assert 0.0 <= origin.u <= 1.0

    def test_neighbor_is_among_k_nearest(self):
        vectors, labels = cloud(20, 10, dim=3, seed=2)
        k = 4
        result = apply_sampling(vectors, labels, SamplingSpec(Strategy.SMOTE, smote_k=k, seed=6))
        minority_idx = [i for i, y in enumerate(labels) if y == 1]
        mat = to_matrix([vectors[i] for i in minority_idx])
        for origin in result.synthetic_origins:
            local_base = minority_idx.index(origin.base_index)
            local_neighbor = minority_idx.index(origin.neighbor_index)
            dists = np.linalg.norm(mat - mat[local_base], axis=1)
            dists[local_base] = np.inf
            kth = np.sort(dists)[k - 1]
            assert dists[local_neighbor] <= kth + 1e-12

    def test_deterministic_given_seed(self):
        vectors, labels = cloud(30, 10)
        spec = SamplingSpec(Strategy.SMOTE, smote_k=3, seed=11)
        a = apply_sampling(vectors, labels, spec)
        b = apply_sampling(vectors, labels, spec)
        assert a.synthetic_origins == b.synthetic_origins
        assert [v.counts for v in a.vectors] == [v.counts for v in b.vectors]

    def test_single_class_rejected(self):
        vectors, _ = cloud(5, 5)
        with pytest.raises(SamplingError, match="two classes"):
            apply_sampling(vectors, [1] * 10, SamplingSpec(Strategy.OVERSAMPLE))

    def test_smote_shortfall_named(self):
        vectors, labels = cloud(10, 3)
        with pytest.raises(SamplingError, match="k=5.*got 3"):
            apply_sampling(vectors, labels, SamplingSpec(Strategy.SMOTE, smote_k=5))


class TestSmoteGenerate:
    def test_collinear_two_points(self):
        points = [vec([0.1, 0.1]), vec([2, 2])]
        # counts must stay > 0, so the base point is slightly off origin
        out, origins = smote_generate(points, count=1, k=1, seed=0)
        synthetic = out[0].to_dense()
        assert synthetic[0] == pytest.approx(synthetic[1])
        assert 0.1 <= synthetic[0] <= 2.0
        assert origins[0].base_index in (0, 1)

    def test_identical_points_degenerate_segment(self):
        points = [vec([3, 1]), vec([3, 1]), vec([3, 1])]
        out, _ = smote_generate(points, count=4, k=2, seed=1)
        for v in out:
            assert np.array_equal(v.to_dense(), np.array([3.0, 1.0]))

    def test_synthetics_on_segment_random_cloud(self):
        rng = np.random.default_rng(7)
        points = [vec(rng.uniform(0.5, 4.0, size=5)) for _ in range(15)]
        out, origins = smote_generate(points, count=30, k=4, seed=2)
        for v, origin in zip(out, origins):
            a = points[origin.base_index].to_dense()
            b = points[origin.neighbor_index].to_dense()
            s = v.to_dense()
            # s - a must be u * (b - a): parallel and within the segment
            assert np.allclose(s - a, origin.u * (b - a), atol=1e-9)

    def test_fractional_values_kept(self):
        points = [vec([1, 0]), vec([2, 0]), vec([4, 0])]
        out, origins = smote_generate(points, count=20, k=2, seed=3)
        assert any(v.to_dense()[0] % 1 != 0 for v in out)
