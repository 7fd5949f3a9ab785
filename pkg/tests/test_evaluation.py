import itertools
import random

import numpy as np
import pytest

from needminer.corpus import Verdict, stratified_split
from needminer.errors import EvaluationError
from needminer.evaluation import (
    BaselineEntry,
    ConfusionCounts,
    EvaluationReport,
    FoldResult,
    GridSpec,
    LineageRecorder,
    Metrics,
    analytic_baseline,
    auc,
    confusion_from_pairs,
    cross_domain,
    cross_validate,
    default_grid,
    f_beta_score,
    improvement,
    labeling_cost,
    learning_curve,
    metrics_from_confusion,
    nested_cv,
    plateau_index,
    simple_assignment_f1,
    standard_baselines,
)
from needminer.learners.base import make_spec
from needminer.sampling import SamplingSpec, Strategy, apply_sampling
from needminer.textproc import PipelineConfig, build_vocabulary, tokens_for_text, vectorize
from needminer.learners import score_many, train

from conftest import separable_corpus

PIPE = PipelineConfig()  # whitespace tokenization is enough for synthetic text
NB = make_spec("naive_bayes", {"alpha": 1.0}, seed=0)


class TestMetrics:
    def test_reported_fold_values(self):
        # published per-fold precision/recall pairs and their F1
        assert abs(f_beta_score(0.405, 0.664) - 0.503) <= 5e-4 + 1e-12
        assert abs(f_beta_score(0.459, 0.697) - 0.553) <= 5e-4 + 1e-12

    def test_degenerate_all_negative(self):
        m = metrics_from_confusion(ConfusionCounts(tp=0, fp=0, tn=10, fn=0))
        assert (m.precision, m.recall, m.f_beta, m.accuracy) == (0.0, 0.0, 0.0, 1.0)

    def test_brute_force_equality(self):
        rng = random.Random(0)
        for _ in range(50):
            n = rng.randint(2, 200)
            y_true = [rng.randint(0, 1) for _ in range(n)]
            y_pred = [rng.randint(0, 1) for _ in range(n)]
            c = confusion_from_pairs(y_true, y_pred)
            m = metrics_from_confusion(c, beta=rng.choice([0.5, 1.0, 2.0]))
            tp = sum(1 for t, p in zip(y_true, y_pred) if (t, p) == (1, 1))
            fp = sum(1 for t, p in zip(y_true, y_pred) if (t, p) == (0, 1))
            fn = sum(1 for t, p in zip(y_true, y_pred) if (t, p) == (1, 0))
            precision = tp / (tp + fp) if tp + fp else 0.0
            recall = tp / (tp + fn) if tp + fn else 0.0
            assert m.precision == precision
            assert m.recall == recall
            b2 = m.beta**2
            expected = (
                (1 + b2) * precision * recall / (b2 * precision + recall)
                if precision + recall
                else 0.0
            )
            assert abs(m.f_beta - expected) < 1e-12

    def test_beta_weighting(self):
        # beta < 1 leans on precision, beta > 1 on recall
        high_p = metrics_from_confusion(ConfusionCounts(8, 1, 80, 12))
        assert metrics_from_confusion(ConfusionCounts(8, 1, 80, 12), beta=0.5).f_beta > high_p.f_beta
        assert metrics_from_confusion(ConfusionCounts(8, 1, 80, 12), beta=2.0).f_beta < high_p.f_beta

    def test_empty_confusion_rejected(self):
        with pytest.raises(EvaluationError):
            metrics_from_confusion(ConfusionCounts(0, 0, 0, 0))


class TestAuc:
    def test_perfect_separation(self):
        assert auc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0

    def test_all_ties(self):
        assert auc([0.5] * 6, [1, 0, 1, 0, 1, 0]) == 0.5

    def test_pairwise_oracle(self):
        rng = random.Random(1)
        for _ in range(40):
            n = rng.randint(4, 60)
            labels = [rng.randint(0, 1) for _ in range(n)]
            if len(set(labels)) < 2:
                labels[0], labels[1] = 0, 1
            scores = [rng.choice([0.1, 0.3, 0.5, 0.7, 0.9]) for _ in range(n)]
            wins = 0.0
            pairs = 0
            for (si, yi), (sj, yj) in itertools.product(zip(scores, labels), repeat=2):
                if yi == 1 and yj == 0:
                    pairs += 1
                    wins += 1.0 if si > sj else (0.5 if si == sj else 0.0)
            assert auc(scores, labels) == pytest.approx(wins / pairs, abs=1e-12)

    def test_single_class_rejected(self):
        with pytest.raises(EvaluationError):
            auc([0.1, 0.9], [1, 1])


class TestCrossValidate:
    def test_separable_corpus_high_f1(self):
        corpus = separable_corpus(n=150, pos_share=0.3, seed=3)
        metrics = cross_validate(NB, corpus, 5, seed=1, pipeline=PIPE)
        assert len(metrics) == 5
        assert float(np.mean([m.f_beta for m in metrics])) >= 0.95

    def test_reproducible(self):
        corpus = separable_corpus(n=60, pos_share=0.5, seed=4)
        a = cross_validate(NB, corpus, 2, seed=9, pipeline=PIPE)
        b = cross_validate(NB, corpus, 2, seed=9, pipeline=PIPE)
        assert [m.to_dict() for m in a] == [m.to_dict() for m in b]

    def test_auc_present_for_two_class_folds(self):
        corpus = separable_corpus(n=80, pos_share=0.25, seed=5)
        metrics = cross_validate(NB, corpus, 4, seed=2, pipeline=PIPE)
        assert all(m.auc is not None and 0 <= m.auc <= 1 for m in metrics)

    @pytest.mark.parametrize("strategy", list(Strategy))
    def test_all_sampling_strategies_run(self, strategy):
        corpus = separable_corpus(n=100, pos_share=0.2, seed=6)
        metrics = cross_validate(
            NB, corpus, 5, seed=11,
            sampling=SamplingSpec(strategy, smote_k=3, seed=0), pipeline=PIPE,
        )
        assert len(metrics) == 5
        assert all(0 <= m.f_beta <= 1 for m in metrics)


class TestGridSpec:
    def test_canonical_order(self):
        grid = GridSpec.from_dict({"a": [1, 2], "b": ["x", "y"]})
        assert grid.cells() == [
            {"a": 1, "b": "x"},
            {"a": 1, "b": "y"},
            {"a": 2, "b": "x"},
            {"a": 2, "b": "y"},
        ]
        assert grid.size == 4

    def test_empty_axis_rejected(self):
        with pytest.raises(EvaluationError):
            GridSpec.from_dict({"a": []})

    def test_default_rf_grid_shape(self):
        grid = default_grid("random_forest")
        assert grid.size == 3 * 5 * 3 * 5


class TestNestedCv:
    def test_grid_of_one_collapses_to_plain_cv(self):
        corpus = separable_corpus(n=60, pos_share=0.3, seed=8)
        grid = GridSpec.from_dict({"alpha": [1.0]})
        report = nested_cv("naive_bayes", grid, corpus, 3, 2, seed=5, pipeline=PIPE)
        algo = make_spec("naive_bayes", {"alpha": 1.0}, seed=5)
        plain = cross_validate(algo, corpus, 3, seed=5, pipeline=PIPE)
        assert [fr.metrics.to_dict() for fr in report.per_fold] == [m.to_dict() for m in plain]

    def test_matches_brute_force_enumeration(self):
        """Full independent re-enumeration of the nested procedure."""
        corpus = separable_corpus(n=120, pos_share=0.25, seed=10)
        grid = GridSpec.from_dict({"alpha": [0.1, 0.5, 1.0, 2.0]})
        outer_k, inner_k, seed = 3, 2, 7
        report = nested_cv("naive_bayes", grid, corpus, outer_k, inner_k, seed, pipeline=PIPE)

        def eval_split(algo, train_pairs, test_pairs, sampling_seed):
            train_tokens = [tokens_for_text(t.text, PIPE, None) for t, _ in train_pairs]
            vocab = build_vocabulary(train_tokens)
            x_train = [vectorize(toks, vocab) for toks in train_tokens]
            y_train = [y for _, y in train_pairs]
            sampled = apply_sampling(x_train, y_train, SamplingSpec(seed=sampling_seed))
            model = train(algo, sampled.vectors, sampled.labels, vocab, PIPE)
            x_test = [vectorize(tokens_for_text(t.text, PIPE, None), vocab) for t, _ in test_pairs]
            y_test = [y for _, y in test_pairs]
            preds = (score_many(model, x_test) > 0.5).astype(int)
            tp = int(((preds == 1) & (np.array(y_test) == 1)).sum())
            fp = int(((preds == 1) & (np.array(y_test) == 0)).sum())
            fn = int(((preds == 0) & (np.array(y_test) == 1)).sum())
            return 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0

        def pairs(fold, corpus):
            return [(t, 1 if corpus.verdict(t.id) is Verdict.NEED else 0) for t in fold]

        outer_folds = [pairs(f, corpus) for f in stratified_split(corpus, outer_k, seed)]
        for i in range(outer_k):
            test_pairs = outer_folds[i]
            train_pairs = [p for j, f in enumerate(outer_folds) if j != i for p in f]
            sub = corpus.restricted_to(t.id for t, _ in train_pairs)
            inner = [pairs(f, sub) for f in stratified_split(sub, inner_k, seed + i + 1)]
            best_cell, best_mean = None, -1.0
            for cell in grid.cells():
                algo = make_spec("naive_bayes", cell, seed=seed)
                f1s = []
                for j in range(inner_k):
                    itr = [p for m, f in enumerate(inner) if m != j for p in f]
                    f1s.append(eval_split(algo, itr, inner[j], sampling_seed=j))
                mean = float(np.mean(f1s))
                if mean > best_mean:
                    best_cell, best_mean = cell, mean
            outer_f1 = eval_split(
                make_spec("naive_bayes", best_cell, seed=seed), train_pairs, test_pairs, i
            )
            assert report.per_fold[i].params == best_cell, f"fold {i} selection differs"
            assert report.per_fold[i].metrics.f_beta == outer_f1, f"fold {i} score differs"

    def test_tie_goes_to_first_cell(self):
        # identical cells tie on inner F1; canonical order must win
        corpus = separable_corpus(n=60, pos_share=0.3, seed=12)
        grid = GridSpec.from_dict({"alpha": [1.0, 1.0]})
        report = nested_cv("naive_bayes", grid, corpus, 2, 2, seed=2, pipeline=PIPE)
        assert all(fr.params == {"alpha": 1.0} for fr in report.per_fold)

    def test_lineage_purity(self):
        corpus = separable_corpus(n=80, pos_share=0.25, seed=13)
        recorder = LineageRecorder()
        grid = GridSpec.from_dict({"alpha": [0.5, 1.0]})
        nested_cv("naive_bayes", grid, corpus, 2, 2, seed=3, pipeline=PIPE, lineage=recorder)
        for fold in (0, 1):
            test_ids = recorder.ids("outer_test", fold)
            assert test_ids
            assert not test_ids & recorder.ids("outer_train", fold)
            assert not test_ids & recorder.ids("inner_folds", fold)
            assert recorder.ids("inner_folds", fold) <= recorder.ids("outer_train", fold)

    def test_fold_counts_validated(self):
        corpus = separable_corpus(n=40, seed=1)
        with pytest.raises(EvaluationError):
            nested_cv("naive_bayes", GridSpec.from_dict({"alpha": [1]}), corpus, 1, 2, 0)

    def test_report_aggregate_recomputable(self):
        corpus = separable_corpus(n=60, pos_share=0.3, seed=14)
        report = nested_cv(
            "naive_bayes", GridSpec.from_dict({"alpha": [1.0]}), corpus, 3, 2, 1, pipeline=PIPE
        )
        f1s = [fr.metrics.f_beta for fr in report.per_fold]
        agg = report.aggregate()
        assert agg["mean"] == pytest.approx(np.mean(f1s))
        assert agg["min"] == min(f1s)
        assert agg["max"] == max(f1s)
        assert agg["stddev"] == pytest.approx(np.std(f1s, ddof=1))

    def test_report_json_roundtrip(self):
        corpus = separable_corpus(n=60, pos_share=0.3, seed=15)
        report = nested_cv(
            "naive_bayes", GridSpec.from_dict({"alpha": [1.0]}), corpus, 2, 2, 1, pipeline=PIPE
        )
        clone = EvaluationReport.from_dict(report.to_dict())
        assert clone.to_dict() == report.to_dict()


class TestBaselines:
    def test_reported_baseline_f1(self):
        assert analytic_baseline(0.2, 0.2).f_beta == pytest.approx(0.200, abs=1e-3)
        assert analytic_baseline(0.2, 0.5).f_beta == pytest.approx(0.286, abs=1e-3)
        assert analytic_baseline(0.2, 1.0).f_beta == pytest.approx(0.333, abs=1e-3)

    def test_f1_symmetric_in_arguments(self):
        for a, b in [(0.2, 0.7), (0.35, 0.9), (0.5, 0.5)]:
            assert analytic_baseline(a, b).f_beta == pytest.approx(analytic_baseline(b, a).f_beta)

    def test_improvement_chain(self):
        assert improvement(0.521, 0.2) == pytest.approx(160.5, abs=0.3)
        assert improvement(0.521, 0.286) == pytest.approx(82.2, abs=0.3)
        assert improvement(0.521, 0.333) == pytest.approx(56.3, abs=0.3)
        assert improvement(0.4, 0.4) == 0.0

    def test_standard_baseline_block(self):
        entries = standard_baselines(0.2, 0.521)
        by_name = {e.name: e for e in entries}
        assert by_name["random_guess_informed"].f1 == pytest.approx(0.2)
        assert by_name["simple_assignment"].improvement_pct == pytest.approx(56.3, abs=0.3)

    def test_range_validation(self):
        with pytest.raises(EvaluationError):
            analytic_baseline(0.0, 0.5)
        with pytest.raises(EvaluationError):
            analytic_baseline(0.2, 0.0)
        with pytest.raises(EvaluationError):
            improvement(0.5, 0.0)


class TestLearningCurve:
    def test_plateau_threshold_rule(self):
        # gains of 5, 2, 0.4, 0.1 percentage points flag the third size
        series = [0.50, 0.55, 0.57, 0.574, 0.575]
        assert plateau_index(series, threshold_pp=0.5) == 2

    def test_no_plateau(self):
        assert plateau_index([0.1, 0.2, 0.3], threshold_pp=0.5) is None

    def test_single_size_collapses_to_plain_cv(self):
        corpus = separable_corpus(n=80, pos_share=0.25, seed=16)
        curve = learning_curve(NB, corpus, [80], 4, seed=2, pipeline=PIPE)
        metrics = cross_validate(NB, corpus, 4, seed=2, pipeline=PIPE)
        assert len(curve.points) == 1
        assert curve.points[0].mean_f1 == pytest.approx(
            float(np.mean([m.f_beta for m in metrics]))
        )

    def test_monotone_within_noise(self):
        corpus = separable_corpus(n=300, pos_share=0.3, seed=17, noise=0.05)
        curve = learning_curve(NB, corpus, [60, 120, 200, 280], 4, seed=3, pipeline=PIPE)
        f1s = [p.mean_f1 for p in curve.points]
        assert all(b >= a - 0.05 for a, b in zip(f1s, f1s[1:]))

    def test_sizes_validated(self):
        corpus = separable_corpus(n=50, seed=1)
        with pytest.raises(EvaluationError):
            learning_curve(NB, corpus, [40, 20], 2, seed=0, pipeline=PIPE)
        with pytest.raises(EvaluationError):
            learning_curve(NB, corpus, [10, 500], 2, seed=0, pipeline=PIPE)


class TestLabelingCost:
    def test_reported_total(self):
        assert labeling_cost(5500, 20) == pytest.approx(30.6, abs=0.05)

    def test_zero(self):
        assert labeling_cost(0, 20) == 0.0

    def test_unit_arithmetic(self):
        assert labeling_cost(180, 20) == pytest.approx(1.0)


class TestCrossDomain:
    def test_twin_domains_transfer(self):
        domains = {
            "a": separable_corpus(n=120, pos_share=0.25, seed=18, id_prefix="a"),
            "b": separable_corpus(n=120, pos_share=0.25, seed=19, id_prefix="b"),
        }
        report = cross_domain(domains, NB, seed=4, k=4, pipeline=PIPE)
        for pair, f1 in report.cross.items():
            intra = np.mean(list(report.intra.values()))
            assert abs(f1 - intra) <= 0.1, (pair, f1, intra)

    def test_disjoint_vocabulary_transfer_collapses(self):
        domains = {
            "a": separable_corpus(n=100, pos_share=0.3, seed=20, token_prefix="x", id_prefix="a"),
            "b": separable_corpus(n=100, pos_share=0.3, seed=21, token_prefix="y", id_prefix="b"),
        }
        report = cross_domain(domains, NB, seed=5, k=4, pipeline=PIPE)
        assert min(report.intra.values()) >= 0.9
        assert max(report.cross.values()) <= 0.1

    def test_published_improvement_formula(self):
        b_a = simple_assignment_f1(332 / 2396)
        b_b = simple_assignment_f1(172 / 2396)
        combined = (b_a + b_b) / 2
        assert improvement(0.284, combined) == pytest.approx(50.3, abs=0.5)

    def test_size_match_reduces_larger_domain(self):
        domains = {
            "big": separable_corpus(n=200, pos_share=0.25, seed=22, id_prefix="big"),
            "small": separable_corpus(n=100, pos_share=0.25, seed=23, id_prefix="s"),
        }
        report = cross_domain(domains, NB, seed=6, k=4, pipeline=PIPE, size_match=True)
        assert report.config["size_match"] is True
        assert set(report.cross) == {"big->small", "small->big"}

    def test_two_domains_required(self):
        with pytest.raises(EvaluationError):
            cross_domain({"only": separable_corpus(50, seed=0)}, NB, seed=0)
