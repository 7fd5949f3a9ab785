from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from needminer.errors import EvaluationError
from needminer.evaluation import GridSpec
from needminer.needcat import (
    CATEGORY_IDS,
    NEED_CATEGORIES,
    CategoryAssignment,
    bucket_start,
    classify_needs,
    load_category_labels,
    quantify,
    train_category_models,
)
from needminer.textproc import PipelineConfig

from conftest import CATEGORY_MARKERS, category_corpus

PIPE = PipelineConfig()

# category counts whose printed shares the quantifier must reproduce
REFERENCE_COUNTS = {
    "price": 202,
    "car_characteristics": 145,
    "charging_infrastructure": 305,
    "range": 135,
    "charging_technology": 119,
    "environment_health": 71,
    "society": 283,
    "other": 109,
}
REFERENCE_SHARES_PCT = {
    "price": 14.8,
    "car_characteristics": 10.6,
    "charging_infrastructure": 22.3,
    "range": 9.9,
    "charging_technology": 8.7,
    "environment_health": 5.2,
    "society": 20.7,
    "other": 8.0,
}


class TestCategoryCatalog:
    def test_eight_categories(self):
        assert len(NEED_CATEGORIES) == 8
        assert CATEGORY_IDS == (
            "price",
            "car_characteristics",
            "charging_infrastructure",
            "range",
            "charging_technology",
            "environment_health",
            "society",
            "other",
        )

    def test_twenty_eight_fine_needs(self):
        assert sum(len(c.sub_needs) for c in NEED_CATEGORIES) == 28


@pytest.fixture(scope="module")
def trained():
    corpus, labels = category_corpus(per_category=30, seed=1)
    return train_category_models(
        corpus,
        labels,
        kind="pegasos_svm",
        grid=GridSpec.from_dict({"lam": [0.01], "epochs": [15]}),
        seed=7,
        outer_k=10,
        inner_k=5,
        pipeline=PIPE,
    )


@pytest.fixture(scope="module")
def models():
    corpus, labels = category_corpus(per_category=20, seed=3)
    result = train_category_models(
        corpus,
        labels,
        kind="pegasos_svm",
        grid=GridSpec.from_dict({"lam": [0.01], "epochs": [15]}),
        seed=2,
        outer_k=4,
        inner_k=2,
        pipeline=PIPE,
    )
    return result.models


class TestTrainCategoryModels:
    def test_every_category_f1(self, trained):
        assert not trained.skipped
        for category, report in trained.reports.items():
            assert report.aggregate()["mean"] >= 0.9, category

    def test_reports_have_ten_outer_folds(self, trained):
        for report in trained.reports.values():
            assert len(report.per_fold) == 10

    def test_models_classify_their_marker(self, trained):
        for category, marker in CATEGORY_MARKERS.items():
            assignment = classify_needs(trained.models, "probe", f"fill0 fill1 {marker}")
            assert category in assignment.categories, (category, assignment)

    def test_insufficient_positives_skipped(self):
        corpus, labels = category_corpus(per_category=12, seed=2)
        # cut one category down to 3 positives
        kept = {}
        dropped = 0
        for tweet_id, cats in labels.items():
            if "range" in cats and dropped < 9:
                dropped += 1
                continue
            kept[tweet_id] = cats
        corpus = corpus.restricted_to(kept.keys())
        result = train_category_models(
            corpus,
            kept,
            kind="naive_bayes",
            grid=GridSpec.from_dict({"alpha": [1.0]}),
            seed=1,
            outer_k=3,
            inner_k=3,
            pipeline=PIPE,
        )
        assert "range" in result.skipped
        assert "3 positive" in result.skipped["range"]
        assert "range" not in result.models


class TestClassifyNeeds:
    def test_single_marker_hits_single_category(self, models):
        assignment = classify_needs(models, "x1", "fill2 markerweite fill3")
        assert assignment.categories == ("range",)
        assert not assignment.low_confidence

    def test_two_markers_give_multi_label(self, models):
        assignment = classify_needs(models, "x2", "markerweite und markerpreis fill1")
        assert "range" in assignment.categories
        assert "price" in assignment.categories

    def test_no_marker_falls_back_to_other(self, models):
        assignment = classify_needs(models, "x3", "nur unbekannte woerter hier")
        assert assignment.categories == ("other",)
        assert assignment.low_confidence
        assert assignment.scores["other"] == max(assignment.scores.values())

    def test_deterministic(self, models):
        a = classify_needs(models, "x4", "fill1 markerumwelt")
        b = classify_needs(models, "x4", "fill1 markerumwelt")
        assert a == b

    def test_empty_text_rejected(self, models):
        with pytest.raises(EvaluationError):
            classify_needs(models, "x5", "   ")


def ts(day, hour=12):
    return datetime(2021, 6, day, hour, tzinfo=timezone.utc)


def assignment(i, cats, score=0.9):
    return CategoryAssignment(f"q{i}", tuple(cats), {c: score for c in cats})


class TestQuantify:
    def test_reference_share_table(self):
        stamped = []
        i = 0
        for category, count in REFERENCE_COUNTS.items():
            for _ in range(count):
                stamped.append((assignment(i, [category]), ts(3)))
                i += 1
        series = quantify(stamped, bucket="month")
        assert len(series) == 1
        q = series[0]
        assert q.total_assignments == 1369
        for category, printed in REFERENCE_SHARES_PCT.items():
            assert abs(q.shares[category] * 100 - printed) <= 0.1, category

    def test_singleton_share(self):
        series = quantify([(assignment(0, ["range"]), ts(1))], bucket="day")
        assert series[0].shares["range"] == 1.0
        assert series[0].total_tweets == 1

    def test_shares_sum_to_one_per_bucket(self):
        stamped = [
            (assignment(0, ["price"]), ts(1)),
            (assignment(1, ["range", "society"]), ts(1)),
            (assignment(2, ["other"]), ts(20)),
        ]
        for q in quantify(stamped, bucket="week"):
            assert sum(q.shares.values()) == pytest.approx(1.0, abs=1e-9)

    def test_multi_label_counts_once_per_category(self):
        stamped = [(assignment(0, ["price", "range"]), ts(2))]
        q = quantify(stamped, bucket="month")[0]
        assert q.total_assignments == 2
        assert q.total_tweets == 1
        assert q.counts["price"] == 1 and q.counts["range"] == 1

    def test_counts_additive_across_disjoint_buckets(self):
        stamped = [
            (assignment(0, ["price"]), ts(1)),
            (assignment(1, ["price"]), ts(9)),
            (assignment(2, ["price"]), ts(16)),
        ]
        weekly = quantify(stamped, bucket="week")
        monthly = quantify(stamped, bucket="month")
        assert sum(q.counts["price"] for q in weekly) == monthly[0].counts["price"] == 3

    def test_window_filtering_and_empty_series(self):
        stamped = [(assignment(0, ["price"]), ts(5))]
        window = (ts(10), ts(20))
        assert quantify(stamped, window=window, bucket="day") == []

    def test_bucket_starts(self):
        wednesday = datetime(2021, 6, 16, 15, 30, tzinfo=timezone.utc)
        assert bucket_start(wednesday, "day") == datetime(2021, 6, 16, tzinfo=timezone.utc)
        assert bucket_start(wednesday, "week") == datetime(2021, 6, 14, tzinfo=timezone.utc)
        assert bucket_start(wednesday, "month") == datetime(2021, 6, 1, tzinfo=timezone.utc)
        with pytest.raises(EvaluationError):
            bucket_start(wednesday, "year")


def test_category_csv_loader(tmp_path):
    path = tmp_path / "cats.csv"
    path.write_text(
        "tweet_id,category\nt0,range\nt0,price\nt1,other\n", encoding="utf-8"
    )
    labels = load_category_labels(path)
    assert labels == {"t0": {"range", "price"}, "t1": {"other"}}


def test_category_csv_unknown_category(tmp_path):
    path = tmp_path / "cats.csv"
    path.write_text("tweet_id,category\nt0,unknown_cat\n", encoding="utf-8")
    with pytest.raises(EvaluationError, match="unknown category"):
        load_category_labels(path)
