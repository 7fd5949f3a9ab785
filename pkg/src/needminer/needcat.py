"""Need categories: one-vs-rest classifiers over the eight major
categories, multi-label assignment and time-bucketed quantification."""
from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import AggregatedLabel, Corpus, Tweet, Verdict
from .errors import EvaluationError
from .evaluation import EvaluationReport, GridSpec, LineageRecorder, nested_cv
from .learners import TrainedModel, train
from .learners.base import make_spec
from .sampling import SamplingSpec
from .textproc import LexicalResource, PipelineConfig, build_vocabulary, tokens_for_text, vectorize


@dataclass(frozen=True)
class NeedCategory:
    id: str
    title: str
    sub_needs: tuple[str, ...]


# The eight major need categories with their fine-grained needs. The fine
# needs are metadata only; classification happens at category granularity.
NEED_CATEGORIES: tuple[NeedCategory, ...] = (
    NeedCategory(
        "price",
        "Price",
        ("car price", "electrical price", "oil/gas price", "price (other)"),
    ),
    NeedCategory(
        "car_characteristics",
        "Car characteristics",
        (
            "car performance",
            "driving experience",
            "car sound",
            "car smell",
            "car comfort",
            "car design",
            "car characteristics (other)",
        ),
    ),
    NeedCategory(
        "charging_infrastructure",
        "Charging infrastructure",
        (
            "charging infrastructure (general)",
            "charging infrastructure existence",
            "charging infrastructure availability (physical)",
            "charging infrastructure availability (technical)",
        ),
    ),
    NeedCategory("range", "Range", ("range",)),
    NeedCategory(
        "charging_technology",
        "Charging technology",
        ("charging interfaces and technologies", "range extender", "battery (other)", "charging speed"),
    ),
    NeedCategory(
        "environment_health",
        "Environment & health",
        (
            "environmentally friendly car production",
            "environmentally friendly car usage",
            "environment & health (other)",
        ),
    ),
    NeedCategory("society", "Society", ("politics", "desire for e-mobility")),
    NeedCategory("other", "Other", ("joke", "definable", "other (miscellaneous)")),
)

CATEGORY_IDS: tuple[str, ...] = tuple(c.id for c in NEED_CATEGORIES)


@dataclass(frozen=True)
class CategoryAssignment:
    """Multi-label category decision for one tweet."""

    tweet_id: str
    categories: tuple[str, ...]
    scores: dict[str, float]
    low_confidence: bool = False

    def __post_init__(self):
        if not self.categories:
            raise EvaluationError("a category assignment must name at least one category")
        unknown = set(self.categories) - set(CATEGORY_IDS)
        if unknown:
            raise EvaluationError(f"unknown categories {sorted(unknown)}")

    def to_dict(self) -> dict:
        return {
            "tweet_id": self.tweet_id,
            "categories": list(self.categories),
            "scores": self.scores,
            "low_confidence": self.low_confidence,
        }


def load_category_labels(path: str | Path) -> dict[str, set[str]]:
    """Read the category CSV (header: tweet_id,category; repeated rows for
    multi-label tweets)."""
    raw = Path(path).read_text(encoding="utf-8")
    reader = csv.DictReader(raw.splitlines())
    if reader.fieldnames is None or not {"tweet_id", "category"} <= set(reader.fieldnames):
        raise EvaluationError(f"{path}: category CSV header must be tweet_id,category")
    out: dict[str, set[str]] = defaultdict(set)
    for line_no, rec in enumerate(reader, start=2):
        cat = (rec["category"] or "").strip()
        if cat not in CATEGORY_IDS:
            raise EvaluationError(f"{path}:{line_no}: unknown category {cat!r}")
        out[rec["tweet_id"]].add(cat)
    return dict(out)


@dataclass
class CategoryTrainingResult:
    models: dict[str, TrainedModel]
    reports: dict[str, EvaluationReport]
    skipped: dict[str, str]  # category -> reason


def _one_vs_rest_corpus(
    corpus: Corpus, labels_by_tweet: dict[str, set[str]], category: str
) -> Corpus:
    """Relabel need tweets as Need (has category) vs NoNeed (rest)."""
    agg = []
    for t in corpus.tweets:
        positive = category in labels_by_tweet.get(t.id, ())
        agg.append(
            AggregatedLabel(t.id, Verdict.NEED if positive else Verdict.NO_NEED, 3 if positive else 0)
        )
    return corpus.with_labels(agg)


def train_category_models(
    corpus: Corpus,
    labels_by_tweet: dict[str, set[str]],
    kind: str = "pegasos_svm",
    grid: GridSpec | None = None,
    seed: int = 42,
    outer_k: int = 10,
    inner_k: int = 5,
    sampling: SamplingSpec = SamplingSpec(),
    pipeline: PipelineConfig = PipelineConfig(),
    lex: LexicalResource | None = None,
    lineage: LineageRecorder | None = None,
    jobs: int = 1,
) -> CategoryTrainingResult:
    """One-vs-rest nested CV and a final model per category.

    Categories with fewer than 2 * inner_k positive tweets are skipped with
    a named reason. The final model per category selects its grid cell by
    inner-style CV on all data and retrains on everything.
    """
    if grid is None:
        grid = GridSpec.from_dict({})  # single default cell
    models: dict[str, TrainedModel] = {}
    reports: dict[str, EvaluationReport] = {}
    skipped: dict[str, str] = {}

    for category in CATEGORY_IDS:
        positives = sum(1 for cats in labels_by_tweet.values() if category in cats)
        needed = 2 * inner_k
        if positives < needed:
            skipped[category] = (
                f"only {positives} positive tweets, need at least {needed} for inner_k={inner_k}"
            )
            continue
        ovr = _one_vs_rest_corpus(corpus, labels_by_tweet, category)
        reports[category] = nested_cv(
            kind, grid, ovr, outer_k, inner_k, seed, sampling, pipeline, lex,
            lineage=lineage, jobs=jobs,
        )
        models[category] = _fit_final_model(
            ovr, kind, grid, seed, inner_k, sampling, pipeline, lex, category
        )
    return CategoryTrainingResult(models, reports, skipped)


def _fit_final_model(
    corpus: Corpus,
    kind: str,
    grid: GridSpec,
    seed: int,
    inner_k: int,
    sampling: SamplingSpec,
    pipeline: PipelineConfig,
    lex: LexicalResource | None,
    category: str,
) -> TrainedModel:
    from .evaluation import cross_validate  # local to avoid cycle at import time

    cells = grid.cells()
    best_cell = cells[0]
    if len(cells) > 1:
        best_f1 = -1.0
        for cell in cells:
            algo = make_spec(kind, cell, seed=seed)
            metrics = cross_validate(algo, corpus, inner_k, seed, sampling, pipeline, lex)
            mean_f1 = float(np.mean([m.f_beta for m in metrics]))
            if mean_f1 > best_f1:
                best_cell, best_f1 = cell, mean_f1

    pairs = corpus.labeled()
    tokens = [tokens_for_text(t.text, pipeline, lex) for t, _ in pairs]
    vocab = build_vocabulary(tokens)
    vectors = [vectorize(toks, vocab) for toks in tokens]
    labels = [1 if v is Verdict.NEED else 0 for _, v in pairs]
    algo = make_spec(kind, best_cell, seed=seed)
    return train(
        algo, vectors, labels, vocab, pipeline, positive_label=category, negative_label=f"not_{category}"
    )


def classify_needs(
    models: dict[str, TrainedModel],
    tweet_id: str,
    text: str,
    threshold: float = 0.5,
    lex: LexicalResource | None = None,
) -> CategoryAssignment:
    """Run all category models; categories scoring above the threshold are
    assigned. If none clears it, the tweet falls back to `other` carrying
    the best score seen, flagged low-confidence."""
    if not text.strip():
        raise EvaluationError("cannot classify empty text")
    if not models:
        raise EvaluationError("no category models loaded")
    scores = {cat: model.score_text(text, lex) for cat, model in models.items()}
    chosen = tuple(cat for cat in CATEGORY_IDS if scores.get(cat, 0.0) > threshold)
    if chosen:
        return CategoryAssignment(tweet_id, chosen, scores)
    return CategoryAssignment(
        tweet_id, ("other",), {**scores, "other": max(scores.values())}, low_confidence=True
    )


# ---------------------------------------------------------------------------
# quantification


@dataclass
class NeedQuantification:
    bucket_start: datetime
    counts: dict[str, int]
    shares: dict[str, float]
    total_assignments: int
    total_tweets: int

    def to_dict(self) -> dict:
        return {
            "bucket_start": self.bucket_start.isoformat(),
            "counts": self.counts,
            "shares": self.shares,
            "total_assignments": self.total_assignments,
            "total_tweets": self.total_tweets,
        }


def bucket_start(ts: datetime, bucket: str) -> datetime:
    day = ts.replace(hour=0, minute=0, second=0, microsecond=0)
    if bucket == "day":
        return day
    if bucket == "week":
        return day - timedelta(days=day.weekday())
    if bucket == "month":
        return day.replace(day=1)
    raise EvaluationError(f"unknown bucket {bucket!r}; choose day, week or month")


def quantify(
    assignments: Iterable[tuple[CategoryAssignment, datetime]],
    window: tuple[datetime | None, datetime | None] = (None, None),
    bucket: str = "month",
) -> list[NeedQuantification]:
    """Per-bucket category counts and shares.

    Shares use the assignment total as denominator (multi-label tweets
    contribute once per category); the distinct tweet count is reported
    alongside. An empty window yields an empty series.
    """
    start, end = window
    grouped: dict[datetime, list[CategoryAssignment]] = defaultdict(list)
    for assignment, ts in assignments:
        if ts is None:
            raise EvaluationError(f"assignment {assignment.tweet_id} has no timestamp")
        if start is not None and ts < start:
            continue
        if end is not None and ts >= end:
            continue
        grouped[bucket_start(ts, bucket)].append(assignment)

    series = []
    for b_start in sorted(grouped):
        members = grouped[b_start]
        counts = Counter(cat for a in members for cat in a.categories)
        total = sum(counts.values())
        series.append(
            NeedQuantification(
                bucket_start=b_start,
                counts={cat: counts.get(cat, 0) for cat in CATEGORY_IDS},
                shares={cat: counts.get(cat, 0) / total for cat in CATEGORY_IDS},
                total_assignments=total,
                total_tweets=len({a.tweet_id for a in members}),
            )
        )
    return series
