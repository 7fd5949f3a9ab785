"""Measurement apparatus: metrics, cross-validation, nested CV with grid
search, analytic baselines, learning curves, cross-domain transfer and the
labeling-cost model.

Seed discipline (mirrored by the brute-force oracles in the test suite):

* outer folds come from ``stratified_split(corpus, k, seed)``;
* the inner folds of outer fold ``i`` use seed ``seed + i + 1``;
* sampling inside fold ``j`` of any cross-validation uses
  ``sampling.seed + j``;
* every grid cell trains with the run seed.

Vocabulary is rebuilt from the training portion of every fold, so no test
instance ever influences preprocessing, sampling or parameter choice.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .corpus import Corpus, Tweet, Verdict, stratified_split, subsample
from .errors import EvaluationError
from .learners import AlgorithmSpec, score_many, train
from .learners.base import make_spec
from .sampling import SamplingSpec, apply_sampling
from .textproc import (
    LexicalResource,
    PipelineConfig,
    build_vocabulary,
    tokens_for_text,
    vectorize,
)


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise EvaluationError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f_beta: float
    beta: float = 1.0
    auc: float | None = None

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f_beta": self.f_beta,
            "beta": self.beta,
            "auc": self.auc,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Metrics":
        return cls(
            accuracy=d["accuracy"],
            precision=d["precision"],
            recall=d["recall"],
            f_beta=d["f_beta"],
            beta=d.get("beta", 1.0),
            auc=d.get("auc"),
        )


def f_beta_score(precision: float, recall: float, beta: float = 1.0) -> float:
    """(1 + b^2) P R / (b^2 P + R); zero when both P and R are zero."""
    if precision + recall == 0:
        return 0.0
    b2 = beta * beta
    denom = b2 * precision + recall
    if denom == 0:
        return 0.0
    return (1 + b2) * precision * recall / denom


def metrics_from_confusion(c: ConfusionCounts, beta: float = 1.0) -> Metrics:
    if c.total == 0:
        raise EvaluationError("cannot compute metrics from an empty confusion matrix")
    if beta <= 0:
        raise EvaluationError("beta must be > 0")
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp else 0.0
    recall = c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0
    accuracy = (c.tp + c.tn) / c.total
    return Metrics(accuracy, precision, recall, f_beta_score(precision, recall, beta), beta)


def confusion_from_pairs(y_true: Sequence[int], y_pred: Sequence[int]) -> ConfusionCounts:
    if len(y_true) != len(y_pred):
        raise EvaluationError("prediction/truth length mismatch")
    tp = sum(1 for t, p in zip(y_true, y_pred) if t == 1 and p == 1)
    fp = sum(1 for t, p in zip(y_true, y_pred) if t == 0 and p == 1)
    tn = sum(1 for t, p in zip(y_true, y_pred) if t == 0 and p == 0)
    fn = sum(1 for t, p in zip(y_true, y_pred) if t == 1 and p == 0)
    return ConfusionCounts(tp, fp, tn, fn)


def auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Probability that a random positive outranks a random negative,
    counting ties as one half (the rank-statistic form)."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise EvaluationError("AUC needs both classes present")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(len(scores))
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1  # midrank, 1-based
        i = j + 1
    rank_sum = float(ranks[labels == 1].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg)


# ---------------------------------------------------------------------------
# fold evaluation


def _labeled_pairs(corpus: Corpus) -> list[tuple[Tweet, int]]:
    pairs = corpus.labeled()
    if not pairs:
        raise EvaluationError("corpus has no usable labels")
    return [(t, 1 if v is Verdict.NEED else 0) for t, v in pairs]


def _evaluate_split(
    algo: AlgorithmSpec,
    train_pairs: Sequence[tuple[Tweet, int]],
    test_pairs: Sequence[tuple[Tweet, int]],
    sampling: SamplingSpec,
    pipeline: PipelineConfig,
    lex: LexicalResource | None,
    beta: float,
    sampling_seed: int,
) -> Metrics:
    """Train on one split, score the untouched test side.

    The vocabulary is fitted on training tokens only and sampling only
    ever sees training vectors.
    """
    train_tokens = [tokens_for_text(t.text, pipeline, lex) for t, _ in train_pairs]
    vocab = build_vocabulary(train_tokens)
    x_train = [vectorize(toks, vocab) for toks in train_tokens]
    y_train = [y for _, y in train_pairs]
    sampled = apply_sampling(x_train, y_train, replace(sampling, seed=sampling_seed))
    model = train(algo, sampled.vectors, sampled.labels, vocab, pipeline)

    x_test = [vectorize(tokens_for_text(t.text, pipeline, lex), vocab) for t, _ in test_pairs]
    y_test = [y for _, y in test_pairs]
    scores = score_many(model, x_test)
    preds = (scores > 0.5).astype(int)
    metrics = metrics_from_confusion(confusion_from_pairs(y_test, preds), beta)
    if len(set(y_test)) == 2:
        metrics = replace(metrics, auc=auc(scores, y_test))
    return metrics


def _folds_to_pairs(
    folds: Sequence[Sequence[Tweet]], corpus: Corpus
) -> list[list[tuple[Tweet, int]]]:
    return [
        [(t, 1 if corpus.verdict(t.id) is Verdict.NEED else 0) for t in fold] for fold in folds
    ]


def cross_validate(
    algo: AlgorithmSpec,
    corpus: Corpus,
    k: int,
    seed: int,
    sampling: SamplingSpec = SamplingSpec(),
    pipeline: PipelineConfig = PipelineConfig(),
    lex: LexicalResource | None = None,
    beta: float = 1.0,
) -> list[Metrics]:
    """Stratified k-fold cross-validation; returns per-fold metrics."""
    folds = _folds_to_pairs(stratified_split(corpus, k, seed), corpus)
    out: list[Metrics] = []
    for j in range(len(folds)):
        test = folds[j]
        train_pairs = [p for i, fold in enumerate(folds) if i != j for p in fold]
        out.append(
            _evaluate_split(
                algo, train_pairs, test, sampling, pipeline, lex, beta, sampling.seed + j
            )
        )
    return out


# ---------------------------------------------------------------------------
# grids, nested CV, reports


@dataclass(frozen=True)
class GridSpec:
    """Finite per-parameter value lists; cells enumerate in declared order."""

    axes: tuple[tuple[str, tuple], ...]

    def __post_init__(self):
        if any(len(values) == 0 for _, values in self.axes):
            raise EvaluationError("grid axes must be non-empty")

    @classmethod
    def from_dict(cls, d: dict[str, Sequence]) -> "GridSpec":
        return cls(tuple((k, tuple(v)) for k, v in d.items()))

    @property
    def size(self) -> int:
        n = 1
        for _, values in self.axes:
            n *= len(values)
        return n

    def cells(self) -> list[dict]:
        names = [name for name, _ in self.axes]
        value_lists = [values for _, values in self.axes]
        return [dict(zip(names, combo)) for combo in itertools.product(*value_lists)]

    def to_dict(self) -> dict:
        return {name: list(values) for name, values in self.axes}


def default_grid(kind: str) -> GridSpec:
    """Shipped default grids; the forest grid covers the value ranges the
    tuned configurations were drawn from."""
    if kind == "random_forest":
        return GridSpec.from_dict(
            {
                "p": [0.6, 0.8, 1.0],
                "l": [100, 200, 300, 400, 500],
                "K": [50, 100, 200],
                "d": [100, 200, 300, 400, 500],
            }
        )
    if kind == "pegasos_svm":
        return GridSpec.from_dict({"lam": [0.1, 0.01, 0.001], "epochs": [10, 30]})
    if kind == "naive_bayes":
        return GridSpec.from_dict({"alpha": [0.1, 0.5, 1.0, 2.0]})
    raise EvaluationError(f"no default grid for {kind!r}")


def _parallel_map(fn, items: Sequence, jobs: int) -> list:
    """Order-preserving map; a thread pool when jobs > 1. Work items are
    pure and pre-seeded, so scheduling cannot change any result."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


class LineageRecorder:
    """Collects (stage, fold, tweet ids) events for leakage assertions."""

    def __init__(self):
        self.events: list[tuple[str, int, frozenset[str]]] = []

    def record(self, stage: str, fold: int, ids: Iterable[str]):
        self.events.append((stage, fold, frozenset(ids)))

    def ids(self, stage: str, fold: int) -> frozenset[str]:
        merged: set[str] = set()
        for s, f, ids in self.events:
            if s == stage and f == fold:
                merged |= ids
        return frozenset(merged)


@dataclass
class FoldResult:
    fold: int
    params: dict
    metrics: Metrics

    def to_dict(self) -> dict:
        return {"fold": self.fold, "params": self.params, "metrics": self.metrics.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "FoldResult":
        return cls(d["fold"], d["params"], Metrics.from_dict(d["metrics"]))


@dataclass
class BaselineEntry:
    name: str
    p_guess: float
    f1: float
    improvement_pct: float

    def to_dict(self) -> dict:
        return self.__dict__.copy()


@dataclass
class EvaluationReport:
    algorithm: str
    per_fold: list[FoldResult]
    baselines: list[BaselineEntry] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def f1_values(self) -> list[float]:
        return [fr.metrics.f_beta for fr in self.per_fold]

    def aggregate(self) -> dict:
        f1s = self.f1_values()
        return {
            "mean": float(np.mean(f1s)),
            "min": float(np.min(f1s)),
            "max": float(np.max(f1s)),
            "stddev": float(np.std(f1s, ddof=1)) if len(f1s) > 1 else 0.0,
        }

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "per_fold": [fr.to_dict() for fr in self.per_fold],
            "aggregate": self.aggregate(),
            "baselines": [b.to_dict() for b in self.baselines],
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvaluationReport":
        return cls(
            algorithm=d["algorithm"],
            per_fold=[FoldResult.from_dict(fr) for fr in d["per_fold"]],
            baselines=[BaselineEntry(**b) for b in d.get("baselines", [])],
            config=d.get("config", {}),
        )


def standard_baselines(prevalence: float, f1_model: float) -> list[BaselineEntry]:
    """Informed random guess, coin flip and assign-all-positive."""
    entries = []
    for name, p_guess in (
        ("random_guess_informed", prevalence),
        ("random_guess_uninformed", 0.5),
        ("simple_assignment", 1.0),
    ):
        f1 = analytic_baseline(prevalence, p_guess).f_beta
        entries.append(BaselineEntry(name, p_guess, f1, improvement(f1_model, f1)))
    return entries


def nested_cv(
    kind: str,
    grid: GridSpec,
    corpus: Corpus,
    outer_k: int,
    inner_k: int,
    seed: int,
    sampling: SamplingSpec = SamplingSpec(),
    pipeline: PipelineConfig = PipelineConfig(),
    lex: LexicalResource | None = None,
    beta: float = 1.0,
    lineage: LineageRecorder | None = None,
    jobs: int = 1,
) -> EvaluationReport:
    """Grid search inside nested cross-validation.

    Per outer fold: every grid cell is cross-validated on the outer
    training portion only, the cell with the best mean inner F1 wins
    (ties go to the first cell in canonical grid order), the winner is
    retrained on the full outer training portion and scored on the
    untouched outer test fold. ``jobs`` caps parallel grid-cell
    evaluation; results reduce in canonical grid order either way.
    """
    if outer_k < 2 or inner_k < 2:
        raise EvaluationError("outer_k and inner_k must be >= 2")
    cells = grid.cells()
    outer_folds = _folds_to_pairs(stratified_split(corpus, outer_k, seed), corpus)

    per_fold: list[FoldResult] = []
    for i in range(len(outer_folds)):
        test_pairs = outer_folds[i]
        train_pairs = [p for j, fold in enumerate(outer_folds) if j != i for p in fold]
        if lineage is not None:
            lineage.record("outer_train", i, (t.id for t, _ in train_pairs))
            lineage.record("outer_test", i, (t.id for t, _ in test_pairs))

        if len(cells) == 1:
            best_cell = cells[0]
        else:
            train_sub = corpus.restricted_to(
                (t.id for t, _ in train_pairs), provenance=f"outer-train fold {i}"
            )
            inner_folds = _folds_to_pairs(
                stratified_split(train_sub, inner_k, seed + i + 1), train_sub
            )
            if lineage is not None:
                lineage.record(
                    "inner_folds", i, (t.id for fold in inner_folds for t, _ in fold)
                )
            def inner_mean_f1(cell: dict) -> float:
                algo = make_spec(kind, cell, seed=seed)
                f1s = []
                for j in range(len(inner_folds)):
                    inner_test = inner_folds[j]
                    inner_train = [
                        p for m, fold in enumerate(inner_folds) if m != j for p in fold
                    ]
                    m = _evaluate_split(
                        algo,
                        inner_train,
                        inner_test,
                        sampling,
                        pipeline,
                        lex,
                        beta,
                        sampling.seed + j,
                    )
                    f1s.append(m.f_beta)
                return float(np.mean(f1s))

            cell_means = _parallel_map(inner_mean_f1, cells, jobs)
            best_cell, best_f1 = None, -1.0
            for cell, mean_f1 in zip(cells, cell_means):
                if mean_f1 > best_f1:
                    best_cell, best_f1 = cell, mean_f1

        algo = make_spec(kind, best_cell, seed=seed)
        metrics = _evaluate_split(
            algo, train_pairs, test_pairs, sampling, pipeline, lex, beta, sampling.seed + i
        )
        per_fold.append(FoldResult(i, dict(best_cell), metrics))

    report = EvaluationReport(
        algorithm=kind,
        per_fold=per_fold,
        config={
            "seed": seed,
            "outer_k": outer_k,
            "inner_k": inner_k,
            "grid": grid.to_dict(),
            "sampling": sampling.to_dict(),
            "pipeline": pipeline.to_dict(),
            "corpus": corpus.provenance,
            "beta": beta,
        },
    )
    mean_f1 = report.aggregate()["mean"]
    report.baselines = standard_baselines(corpus.need_share(), mean_f1)
    return report


# ---------------------------------------------------------------------------
# analytic baselines and derived quantities


def analytic_baseline(prevalence: float, p_guess: float, beta: float = 1.0) -> Metrics:
    """Expected metrics of a classifier labeling positive with probability
    p_guess on a stream of the given prevalence: precision = prevalence,
    recall = p_guess."""
    if not 0 < prevalence < 1:
        raise EvaluationError("prevalence must be in (0, 1)")
    if not 0 < p_guess <= 1:
        raise EvaluationError("p_guess must be in (0, 1]")
    precision = prevalence
    recall = p_guess
    accuracy = prevalence * p_guess + (1 - prevalence) * (1 - p_guess)
    return Metrics(accuracy, precision, recall, f_beta_score(precision, recall, beta), beta, 0.5)


def improvement(f1_model: float, f1_baseline: float) -> float:
    """Relative gain over a baseline, in percent."""
    if f1_baseline <= 0:
        raise EvaluationError("baseline F1 must be > 0")
    return (f1_model / f1_baseline - 1.0) * 100.0


def labeling_cost(n_items: int, seconds_per_item: float) -> float:
    """Manual labeling effort in hours."""
    if n_items < 0 or seconds_per_item < 0:
        raise EvaluationError("labeling cost inputs must be non-negative")
    return n_items * seconds_per_item / 3600.0


# ---------------------------------------------------------------------------
# learning curve


@dataclass
class LearningPoint:
    size: int
    mean_f1: float

    def to_dict(self) -> dict:
        return {"size": self.size, "mean_f1": self.mean_f1}


@dataclass
class LearningCurve:
    points: list[LearningPoint]
    plateau_index: int | None
    plateau_threshold_pp: float
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "points": [p.to_dict() for p in self.points],
            "plateau_index": self.plateau_index,
            "plateau_threshold_pp": self.plateau_threshold_pp,
            "config": self.config,
        }


def plateau_index(f1_series: Sequence[float], threshold_pp: float = 0.5) -> int | None:
    """Index of the first size after which the marginal gain drops below
    the threshold (in F1 percentage points); None if it never does."""
    for i in range(len(f1_series) - 1):
        if (f1_series[i + 1] - f1_series[i]) * 100.0 < threshold_pp:
            return i
    return None


def learning_curve(
    algo: AlgorithmSpec,
    corpus: Corpus,
    sizes: Sequence[int],
    k: int,
    seed: int,
    sampling: SamplingSpec = SamplingSpec(),
    pipeline: PipelineConfig = PipelineConfig(),
    lex: LexicalResource | None = None,
    beta: float = 1.0,
    plateau_threshold_pp: float = 0.5,
) -> LearningCurve:
    """Mean k-fold F1 at increasing stratified subsample sizes."""
    if list(sizes) != sorted(sizes):
        raise EvaluationError("sizes must be increasing")
    n_labeled = len(corpus.labeled())
    if sizes and sizes[-1] > n_labeled:
        raise EvaluationError(f"size {sizes[-1]} exceeds labeled corpus size {n_labeled}")
    points = []
    for idx, size in enumerate(sizes):
        sub = subsample(corpus, size, seed + idx, stratified=True)
        metrics = cross_validate(algo, sub, k, seed, sampling, pipeline, lex, beta)
        points.append(LearningPoint(size, float(np.mean([m.f_beta for m in metrics]))))
    f1s = [p.mean_f1 for p in points]
    return LearningCurve(
        points,
        plateau_index(f1s, plateau_threshold_pp),
        plateau_threshold_pp,
        config={"seed": seed, "k": k, "algorithm": algo.to_dict(), "sizes": list(sizes)},
    )


# ---------------------------------------------------------------------------
# cross-domain transfer


def simple_assignment_f1(prevalence: float) -> float:
    """Expected F1 of labeling everything positive: 2 pi / (1 + pi)."""
    return 2 * prevalence / (1 + prevalence)


@dataclass
class CrossDomainReport:
    domains: list[str]
    intra: dict[str, float]
    cross: dict[str, float]  # "A->B": trained on A, tested on B
    combined_f1: float
    domain_baselines: dict[str, float]
    combined_baseline: float
    improvement_pct: float  # best cross cell over the averaged baseline
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "domains": self.domains,
            "intra": self.intra,
            "cross": self.cross,
            "combined_f1": self.combined_f1,
            "domain_baselines": self.domain_baselines,
            "combined_baseline": self.combined_baseline,
            "improvement_pct": self.improvement_pct,
            "config": self.config,
        }


def cross_domain(
    domains: dict[str, Corpus],
    algo: AlgorithmSpec,
    seed: int,
    k: int = 5,
    sampling: SamplingSpec = SamplingSpec(),
    pipeline: PipelineConfig = PipelineConfig(),
    lex: LexicalResource | None = None,
    beta: float = 1.0,
    size_match: bool = False,
) -> CrossDomainReport:
    """Intra-domain CV, full cross-domain transfer in both directions and a
    combined-corpus CV, benchmarked against the averaged simple-assignment
    baseline of the two domains."""
    if len(domains) != 2:
        raise EvaluationError("cross_domain expects exactly two domains")
    names = list(domains)
    corpora = dict(domains)
    if size_match:
        smallest = min(len(c.labeled()) for c in corpora.values())
        for name in names:
            if len(corpora[name].labeled()) > smallest:
                corpora[name] = subsample(corpora[name], smallest, seed, stratified=True)

    intra = {}
    for name in names:
        metrics = cross_validate(algo, corpora[name], k, seed, sampling, pipeline, lex, beta)
        intra[name] = float(np.mean([m.f_beta for m in metrics]))

    cross = {}
    for a, b in ((names[0], names[1]), (names[1], names[0])):
        m = _evaluate_split(
            algo,
            _labeled_pairs(corpora[a]),
            _labeled_pairs(corpora[b]),
            sampling,
            pipeline,
            lex,
            beta,
            sampling.seed,
        )
        cross[f"{a}->{b}"] = m.f_beta

    merged = Corpus(
        corpora[names[0]].tweets + corpora[names[1]].tweets,
        {**corpora[names[0]].labels, **corpora[names[1]].labels},
        provenance="+".join(names),
    )
    combined_metrics = cross_validate(algo, merged, k, seed, sampling, pipeline, lex, beta)
    combined_f1 = float(np.mean([m.f_beta for m in combined_metrics]))

    domain_baselines = {name: simple_assignment_f1(corpora[name].need_share()) for name in names}
    combined_baseline = float(np.mean(list(domain_baselines.values())))
    best_cross = max(cross.values())

    return CrossDomainReport(
        domains=names,
        intra=intra,
        cross=cross,
        combined_f1=combined_f1,
        domain_baselines=domain_baselines,
        combined_baseline=combined_baseline,
        improvement_pct=improvement(best_cross, combined_baseline),
        config={"seed": seed, "k": k, "algorithm": algo.to_dict(), "size_match": size_match},
    )
