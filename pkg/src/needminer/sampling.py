"""Rebalance training folds: none, oversample, undersample, SMOTE.

Only ever applied to training data; callers keep test folds out. Synthetic
SMOTE points carry provenance (parent indices and the interpolation factor)
so the segment identity x = m_i + u * (m_j - m_i) is directly checkable.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import SamplingError
from .textproc import FeatureVector, to_matrix


class Strategy(str, Enum):
    NONE = "none"
    OVERSAMPLE = "oversample"
    UNDERSAMPLE = "undersample"
    SMOTE = "smote"


@dataclass(frozen=True)
class SamplingSpec:
    strategy: Strategy = Strategy.NONE
    smote_k: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.smote_k < 1:
            raise SamplingError("smote_k must be >= 1")

    def to_dict(self) -> dict:
        return {"strategy": self.strategy.value, "smote_k": self.smote_k, "seed": self.seed}


@dataclass(frozen=True)
class SyntheticOrigin:
    """Provenance of one SMOTE point; indices refer to the input vectors."""

    base_index: int
    neighbor_index: int
    u: float


@dataclass
class SamplingResult:
    vectors: list[FeatureVector]
    labels: list[int]
    synthetic_origins: list[SyntheticOrigin] = field(default_factory=list)


def _class_split(labels: Sequence[int]) -> tuple[int, int, list[int], list[int]]:
    counts = Counter(labels)
    if len(counts) < 2:
        raise SamplingError(f"sampling needs two classes, got {dict(counts)}")
    if len(counts) > 2:
        raise SamplingError(f"sampling supports binary labels only, got {sorted(counts)}")
    # minority = fewer instances; ties resolved toward the positive class (1)
    (a, na), (b, nb) = sorted(counts.items(), key=lambda kv: (kv[1], kv[0] != 1))
    minority, majority = a, b
    min_idx = [i for i, y in enumerate(labels) if y == minority]
    maj_idx = [i for i, y in enumerate(labels) if y == majority]
    return minority, majority, min_idx, maj_idx


def smote_generate(
    minority: Sequence[FeatureVector], count: int, k: int, seed: int
) -> tuple[list[FeatureVector], list[SyntheticOrigin]]:
    """Interpolate `count` synthetic points between minority instances.

    Each point lies on the segment from a random minority instance to one
    of its k nearest minority neighbors (Euclidean); values stay
    real-valued. Origins index into `minority`.
    """
    n = len(minority)
    if n < k + 1:
        raise SamplingError(
            f"SMOTE with k={k} needs at least {k + 1} minority instances, got {n}"
        )
    mat = to_matrix(minority)
    dists = np.linalg.norm(mat[:, None, :] - mat[None, :, :], axis=2)
    np.fill_diagonal(dists, np.inf)
    # stable argsort keeps ties ordered by index for determinism
    neighbor_lists = np.argsort(dists, axis=1, kind="stable")[:, :k]

    rng = np.random.default_rng(seed)
    vectors: list[FeatureVector] = []
    origins: list[SyntheticOrigin] = []
    for _ in range(count):
        i = int(rng.integers(n))
        j = int(neighbor_lists[i][int(rng.integers(k))])
        u = float(rng.random())
        point = mat[i] + u * (mat[j] - mat[i])
        vectors.append(FeatureVector.from_dense(point))
        origins.append(SyntheticOrigin(i, j, u))
    return vectors, origins


def apply_sampling(
    vectors: Sequence[FeatureVector], labels: Sequence[int], spec: SamplingSpec
) -> SamplingResult:
    """Equalize class counts per the chosen strategy; deterministic given
    the spec seed. Input order is preserved; duplicates/synthetics append."""
    if len(vectors) != len(labels):
        raise SamplingError("vectors and labels length mismatch")
    if spec.strategy is Strategy.NONE:
        return SamplingResult(list(vectors), list(labels))

    minority, majority, min_idx, maj_idx = _class_split(labels)
    deficit = len(maj_idx) - len(min_idx)
    rng = np.random.default_rng(spec.seed)

    if spec.strategy is Strategy.UNDERSAMPLE:
        keep = set(rng.permutation(len(maj_idx))[: len(min_idx)])
        kept_maj = {maj_idx[i] for i in keep}
        out_idx = [i for i in range(len(vectors)) if labels[i] == minority or i in kept_maj]
        return SamplingResult([vectors[i] for i in out_idx], [labels[i] for i in out_idx])

    if spec.strategy is Strategy.OVERSAMPLE:
        extra = [min_idx[int(rng.integers(len(min_idx)))] for _ in range(deficit)]
        out_vectors = list(vectors) + [vectors[i] for i in extra]
        out_labels = list(labels) + [minority] * deficit
        return SamplingResult(out_vectors, out_labels)

    # SMOTE
    synthetic, local_origins = smote_generate(
        [vectors[i] for i in min_idx], deficit, spec.smote_k, spec.seed
    )
    origins = [
        SyntheticOrigin(min_idx[o.base_index], min_idx[o.neighbor_index], o.u)
        for o in local_origins
    ]
    return SamplingResult(
        list(vectors) + synthetic, list(labels) + [minority] * deficit, origins
    )
