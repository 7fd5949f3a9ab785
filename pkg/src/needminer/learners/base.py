"""Algorithm specs, the trained-model container and its file format.

A trained model embeds the preprocessing config and vocabulary it was
fitted with, so a model file on disk is a complete text -> label function.
The on-disk format is a versioned JSON envelope: self-describing and
endianness-independent by construction.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from ..errors import ModelFormatError, TrainingError
from ..textproc import (
    FeatureVector,
    LexicalResource,
    PipelineConfig,
    Vocabulary,
    to_matrix,
    tokens_for_text,
    vectorize,
)
from .naive_bayes import NaiveBayesPayload
from .pegasos import PegasosPayload
from .random_forest import RandomForestPayload

FORMAT_NAME = "needminer-model"
FORMAT_VERSION = 1

KIND_NAIVE_BAYES = "naive_bayes"
KIND_RANDOM_FOREST = "random_forest"
KIND_PEGASOS = "pegasos_svm"


@dataclass(frozen=True)
class NaiveBayesParams:
    alpha: float = 1.0

    def __post_init__(self):
        if self.alpha < 0:
            raise TrainingError("alpha must be >= 0")


@dataclass(frozen=True)
class RandomForestParams:
    p: float = 1.0  # bag size as fraction of the training set
    l: int = 100  # number of trees
    K: int | None = None  # features sampled per split; None = all
    d: int | None = None  # maximum tree depth; None = unbounded

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise TrainingError("bag fraction p must be in (0, 1]")
        if self.l < 1:
            raise TrainingError("tree count l must be >= 1")
        if self.K is not None and self.K < 1:
            raise TrainingError("features per split K must be >= 1")
        if self.d is not None and self.d < 1:
            raise TrainingError("tree depth d must be >= 1")


@dataclass(frozen=True)
class PegasosParams:
    lam: float = 0.01
    epochs: int = 10
    loss: str = "hinge"

    def __post_init__(self):
        if self.lam <= 0:
            raise TrainingError("lambda must be > 0")
        if self.epochs < 1:
            raise TrainingError("epochs must be >= 1")
        if self.loss != "hinge":
            raise TrainingError(f"unsupported loss {self.loss!r}")


Params = Union[NaiveBayesParams, RandomForestParams, PegasosParams]

_PARAMS_BY_KIND = {
    KIND_NAIVE_BAYES: NaiveBayesParams,
    KIND_RANDOM_FOREST: RandomForestParams,
    KIND_PEGASOS: PegasosParams,
}


@dataclass(frozen=True)
class AlgorithmSpec:
    kind: str
    params: Params
    seed: int = 0

    def __post_init__(self):
        if self.kind not in _PARAMS_BY_KIND:
            raise TrainingError(f"unknown algorithm kind {self.kind!r}")
        if not isinstance(self.params, _PARAMS_BY_KIND[self.kind]):
            raise TrainingError(f"params type does not match kind {self.kind!r}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": self.params.__dict__.copy(), "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "AlgorithmSpec":
        kind = d["kind"]
        if kind not in _PARAMS_BY_KIND:
            raise ModelFormatError(f"unknown algorithm kind {kind!r}")
        return cls(kind, _PARAMS_BY_KIND[kind](**d["params"]), d.get("seed", 0))


def make_spec(kind: str, params: dict | None = None, seed: int = 0) -> AlgorithmSpec:
    """Build a spec from a plain parameter dict (CLI / grid cells)."""
    cls = _PARAMS_BY_KIND.get(kind)
    if cls is None:
        raise TrainingError(f"unknown algorithm kind {kind!r}")
    return AlgorithmSpec(kind, cls(**(params or {})), seed)


@dataclass(frozen=True)
class TrainedModel:
    spec: AlgorithmSpec
    payload: object
    dimension: int
    vocabulary: Vocabulary | None = None
    pipeline: PipelineConfig | None = None
    positive_label: str = "positive"
    negative_label: str = "negative"
    format_version: int = FORMAT_VERSION

    def score_rows(self, X: np.ndarray) -> np.ndarray:
        if X.ndim != 2 or X.shape[1] != self.dimension:
            raise TrainingError(
                f"input dimension {X.shape} does not match model dimension {self.dimension}"
            )
        return self.payload.score_positive(X)

    def score_vector(self, x: FeatureVector) -> float:
        if x.dimension != self.dimension:
            raise TrainingError(
                f"vector dimension {x.dimension} does not match model dimension {self.dimension}"
            )
        return float(self.score_rows(x.to_dense()[None, :])[0])

    def score_text(self, text: str, lex: LexicalResource | None = None) -> float:
        if self.vocabulary is None or self.pipeline is None:
            raise TrainingError("model has no bound vocabulary/pipeline for raw text")
        tokens = tokens_for_text(text, self.pipeline, lex)
        return self.score_vector(vectorize(tokens, self.vocabulary))

    def predict_label(self, x: FeatureVector) -> str:
        return self.positive_label if self.score_vector(x) > 0.5 else self.negative_label


def train(
    spec: AlgorithmSpec,
    vectors: Sequence[FeatureVector],
    labels: Sequence[int],
    vocabulary: Vocabulary | None = None,
    pipeline: PipelineConfig | None = None,
    positive_label: str = "positive",
    negative_label: str = "negative",
) -> TrainedModel:
    """Fit the chosen algorithm on labeled vectors (labels 1 = positive)."""
    if len(vectors) != len(labels):
        raise TrainingError("vectors and labels length mismatch")
    if not vectors:
        raise TrainingError("cannot train on an empty data set")
    y = np.asarray(labels, dtype=float)
    if not set(np.unique(y)) <= {0.0, 1.0}:
        raise TrainingError("labels must be 0/1")
    if len(np.unique(y)) < 2:
        raise TrainingError("training data contains a single class")
    X = to_matrix(vectors)

    if spec.kind == KIND_NAIVE_BAYES:
        payload = NaiveBayesPayload.fit(X, y, spec.params.alpha)
    elif spec.kind == KIND_RANDOM_FOREST:
        params = spec.params
        payload = RandomForestPayload.fit(
            X,
            y,
            bag_fraction=params.p,
            n_trees=params.l,
            features_per_split=params.K if params.K is not None else X.shape[1],
            max_depth=params.d,
            seed=spec.seed,
        )
    else:
        payload = PegasosPayload.fit(X, y, spec.params.lam, spec.params.epochs, spec.seed)

    return TrainedModel(
        spec=spec,
        payload=payload,
        dimension=X.shape[1],
        vocabulary=vocabulary,
        pipeline=pipeline,
        positive_label=positive_label,
        negative_label=negative_label,
    )


def score(model: TrainedModel, x: FeatureVector) -> float:
    return model.score_vector(x)


def predict(model: TrainedModel, x: FeatureVector) -> int:
    """1 iff score > 0.5; the 0.5 tie goes to the negative class."""
    return int(model.score_vector(x) > 0.5)


def score_many(model: TrainedModel, vectors: Sequence[FeatureVector]) -> np.ndarray:
    if not vectors:
        return np.zeros(0)
    return model.score_rows(to_matrix(vectors))


def predict_many(model: TrainedModel, vectors: Sequence[FeatureVector]) -> np.ndarray:
    return (score_many(model, vectors) > 0.5).astype(int)


_PAYLOADS = {
    KIND_NAIVE_BAYES: NaiveBayesPayload,
    KIND_RANDOM_FOREST: RandomForestPayload,
    KIND_PEGASOS: PegasosPayload,
}


def save_model(model: TrainedModel, path: str | Path):
    envelope = {
        "format": FORMAT_NAME,
        "format_version": model.format_version,
        "algorithm": model.spec.to_dict(),
        "dimension": model.dimension,
        "positive_label": model.positive_label,
        "negative_label": model.negative_label,
        "pipeline": model.pipeline.to_dict() if model.pipeline else None,
        "vocabulary": model.vocabulary.to_dict() if model.vocabulary else None,
        "parameters": model.payload.to_dict(),
    }
    Path(path).write_text(json.dumps(envelope), encoding="utf-8")


def load_model(path: str | Path) -> TrainedModel:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelFormatError(f"cannot read model file {path}: {exc}") from exc
    try:
        envelope = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"corrupt model file {path} at offset {exc.pos}: {exc.msg}") from exc
    if not isinstance(envelope, dict) or envelope.get("format") != FORMAT_NAME:
        raise ModelFormatError(f"{path} is not a {FORMAT_NAME} file")
    version = envelope.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(
            f"{path}: format version {version} not supported (expected {FORMAT_VERSION})"
        )
    try:
        spec = AlgorithmSpec.from_dict(envelope["algorithm"])
        payload = _PAYLOADS[spec.kind].from_dict(envelope["parameters"])
        vocabulary = (
            Vocabulary.from_dict(envelope["vocabulary"]) if envelope.get("vocabulary") else None
        )
        pipeline = (
            PipelineConfig.from_dict(envelope["pipeline"]) if envelope.get("pipeline") else None
        )
        return TrainedModel(
            spec=spec,
            payload=payload,
            dimension=int(envelope["dimension"]),
            vocabulary=vocabulary,
            pipeline=pipeline,
            positive_label=envelope.get("positive_label", "positive"),
            negative_label=envelope.get("negative_label", "negative"),
            format_version=version,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: malformed model envelope: {exc}") from exc
