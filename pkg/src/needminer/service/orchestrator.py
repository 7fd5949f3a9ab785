"""Pass stored raw tweets through the model chain and answer summary queries.

Orchestration is idempotent per model-version pair: tweets already
processed at the active versions are left untouched, and a version bump
reprocesses everything exactly once. All active models are loaded before
the first write, so a record can never mix model versions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone

from ..enrich import NameLexicon, SentimentLexicon, predict_gender, sentiment_score
from ..errors import ServiceError
from ..needcat import NeedQuantification, classify_needs, quantify
from ..textproc import LexicalResource
from .registry import ModelRegistry
from .store import StoredTweet, TweetStore


@dataclass
class OrchestrationReport:
    processed: int = 0
    needs: int = 0
    skipped: int = 0  # already current
    versions: dict[str, str | None] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def orchestrate(
    store: TweetStore,
    registry: ModelRegistry,
    threshold: float = 0.5,
    sentiment_lex: SentimentLexicon | None = None,
    name_lex: NameLexicon | None = None,
    lex: LexicalResource | None = None,
) -> OrchestrationReport:
    """need model -> (if need) category models -> sentiment -> gender."""
    need_version, need_model = registry.load_need()  # raises before any write
    cat_version, cat_models = registry.load_categories()
    versions = {"need": need_version}
    if cat_version:
        versions["categories"] = cat_version

    report = OrchestrationReport(versions=dict(versions))
    for tweet in store.raw_tweets():
        if store.processed_versions(tweet.id) == versions:
            report.skipped += 1
            continue
        score = need_model.score_text(tweet.text, lex)
        is_need = score > threshold
        assignment = None
        if is_need and cat_models:
            assignment = classify_needs(cat_models, tweet.id, tweet.text, threshold=0.5, lex=lex)
        stored = StoredTweet(
            tweet=tweet,
            need_score=float(score),
            is_need=is_need,
            threshold=threshold,
            model_versions=dict(versions),
            processed_at=datetime.now(timezone.utc),
            assignment=assignment,
            sentiment=sentiment_score(tweet.text, sentiment_lex) if sentiment_lex else None,
            gender=predict_gender(tweet.author_name, name_lex) if name_lex else None,
        )
        store.put_processed(stored)
        report.processed += 1
        if is_need:
            report.needs += 1
    return report


@dataclass
class SummaryResult:
    window: tuple[datetime | None, datetime | None]
    threshold: float
    total_tweets: int  # processed tweets inside the window after filters
    flagged_needs: int  # need_score > threshold
    quantification: NeedQuantification | None  # None when nothing is flagged
    top_tweets: list[StoredTweet] = field(default_factory=list)

    def to_dict(self) -> dict:
        start, end = self.window
        return {
            "window": {
                "from": start.isoformat() if start else None,
                "to": end.isoformat() if end else None,
            },
            "threshold": self.threshold,
            "total_tweets": self.total_tweets,
            "flagged_needs": self.flagged_needs,
            "quantification": self.quantification.to_dict() if self.quantification else None,
            "top_tweets": [st.to_dict() for st in self.top_tweets],
        }


def _in_window(st: StoredTweet, start: datetime | None, end: datetime | None) -> bool:
    ts = st.tweet.created_at
    if ts is None:
        return start is None and end is None
    if start is not None and ts < start:
        return False
    if end is not None and ts >= end:
        return False
    return True


def select_stored(
    store: TweetStore,
    window: tuple[datetime | None, datetime | None] = (None, None),
    category: str | None = None,
    min_score: float | None = None,
    gender: str | None = None,
) -> list[StoredTweet]:
    start, end = window
    out = []
    for st in store.processed_tweets():
        if not _in_window(st, start, end):
            continue
        if category is not None and (
            st.assignment is None or category not in st.assignment.categories
        ):
            continue
        if min_score is not None and st.need_score < min_score:
            continue
        if gender is not None and st.gender != gender:
            continue
        out.append(st)
    return out


def query_summary(
    store: TweetStore,
    window: tuple[datetime | None, datetime | None] = (None, None),
    category: str | None = None,
    min_score: float | None = None,
    gender: str | None = None,
    threshold: float = 0.5,
    top_limit: int = 10,
) -> SummaryResult:
    """Quantify flagged needs over matching stored tweets.

    The runtime threshold is applied to the stored scores, so tightening
    it never increases the flagged count. Top tweets are ordered by score
    descending, ties broken by recency.
    """
    matching = select_stored(store, window, category, min_score, gender)
    flagged = [st for st in matching if st.need_score > threshold]
    with_assignment = [st for st in flagged if st.assignment is not None]

    quantification = None
    if with_assignment:
        epoch = datetime.min.replace(tzinfo=timezone.utc)
        series = quantify(
            ((st.assignment, st.tweet.created_at or st.processed_at) for st in with_assignment),
            window=(None, None),  # window already applied by select_stored
            bucket="month",
        )
        # collapse the per-month series into one window-level quantification
        counts: dict[str, int] = {}
        for q in series:
            for cat, n in q.counts.items():
                counts[cat] = counts.get(cat, 0) + n
        total = sum(counts.values())
        quantification = NeedQuantification(
            bucket_start=min((q.bucket_start for q in series), default=epoch),
            counts=counts,
            shares={cat: n / total for cat, n in counts.items()},
            total_assignments=total,
            total_tweets=len({st.tweet.id for st in with_assignment}),
        )

    def sort_key(st: StoredTweet):
        ts = st.tweet.created_at or st.processed_at
        return (-st.need_score, -ts.timestamp())

    top = sorted(flagged, key=sort_key)[:top_limit]
    return SummaryResult(
        window=window,
        threshold=threshold,
        total_tweets=len(matching),
        flagged_needs=len(flagged),
        quantification=quantification,
        top_tweets=top,
    )


def timeseries(
    store: TweetStore,
    bucket: str,
    window: tuple[datetime | None, datetime | None] = (None, None),
    category: str | None = None,
    threshold: float = 0.5,
) -> list[NeedQuantification]:
    flagged = [
        st
        for st in select_stored(store, window, category=category)
        if st.need_score > threshold and st.assignment is not None
    ]
    return quantify(
        ((st.assignment, st.tweet.created_at or st.processed_at) for st in flagged),
        window=(None, None),
        bucket=bucket,
    )
