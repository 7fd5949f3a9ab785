"""Corpus handling: load short-text posts and rater labels, filter noise,
aggregate votes into Need / NoNeed / Suspended, build stratified splits.

A corpus is immutable once loaded; every operation returns a new corpus.
"""
from __future__ import annotations

import csv
import json
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import re

from .errors import CorpusError

URL_RE = re.compile(r"(?:https?://|www\.)", re.IGNORECASE)

# message label tokens of the raw rater CSV
LABEL_NEED = "need"
LABEL_NO_NEED = "no_need"


class Verdict(str, Enum):
    """Three-way consensus of three raters."""

    NEED = "Need"
    NO_NEED = "NoNeed"
    SUSPENDED = "Suspended"


@dataclass(frozen=True)
class Tweet:
    id: str
    text: str
    lang: str = "de"
    created_at: datetime | None = None
    author_id: str = ""
    author_name: str | None = None
    domain_tag: str | None = None

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "text": self.text,
            "lang": self.lang,
            "created_at": self.created_at.isoformat() if self.created_at else None,
            "author_id": self.author_id,
        }
        if self.author_name is not None:
            d["author_name"] = self.author_name
        if self.domain_tag is not None:
            d["domain_tag"] = self.domain_tag
        return d


@dataclass(frozen=True)
class LabelRecord:
    tweet_id: str
    labeler_id: str
    label: str  # LABEL_NEED | LABEL_NO_NEED


@dataclass(frozen=True)
class AggregatedLabel:
    tweet_id: str
    verdict: Verdict
    votes_need: int


def verdict_for_votes(votes_need: int) -> Verdict:
    """2-of-3 rule: >=2 votes Need, 0 votes NoNeed, exactly 1 Suspended."""
    if votes_need >= 2:
        return Verdict.NEED
    if votes_need == 0:
        return Verdict.NO_NEED
    return Verdict.SUSPENDED


@dataclass
class Corpus:
    tweets: list[Tweet]
    labels: dict[str, AggregatedLabel] = field(default_factory=dict)
    provenance: str = ""

    def __post_init__(self):
        self._by_id = {t.id: t for t in self.tweets}
        if len(self._by_id) != len(self.tweets):
            dupes = [tid for tid, n in Counter(t.id for t in self.tweets).items() if n > 1]
            raise CorpusError(f"duplicate tweet ids in corpus: {dupes[:5]}")
        missing = [tid for tid in self.labels if tid not in self._by_id]
        if missing:
            raise CorpusError(f"labels reference unknown tweet ids: {missing[:5]}")

    def __len__(self) -> int:
        return len(self.tweets)

    def tweet(self, tweet_id: str) -> Tweet:
        return self._by_id[tweet_id]

    def verdict(self, tweet_id: str) -> Verdict | None:
        lab = self.labels.get(tweet_id)
        return lab.verdict if lab else None

    def labeled(self, include_suspended: bool = False) -> list[tuple[Tweet, Verdict]]:
        """(tweet, verdict) pairs; Suspended excluded unless asked for."""
        out = []
        for t in self.tweets:
            lab = self.labels.get(t.id)
            if lab is None:
                continue
            if lab.verdict is Verdict.SUSPENDED and not include_suspended:
                continue
            out.append((t, lab.verdict))
        return out

    def partition_counts(self) -> dict[str, int]:
        counts = Counter(lab.verdict.value for lab in self.labels.values())
        return {v.value: counts.get(v.value, 0) for v in Verdict}

    def need_share(self) -> float:
        """Share of Need among non-suspended labeled tweets."""
        pairs = self.labeled()
        if not pairs:
            raise CorpusError("corpus has no non-suspended labeled tweets")
        pos = sum(1 for _, v in pairs if v is Verdict.NEED)
        return pos / len(pairs)

    def with_labels(self, labels: Iterable[AggregatedLabel]) -> "Corpus":
        return Corpus(self.tweets, {lab.tweet_id: lab for lab in labels}, self.provenance)

    def restricted_to(self, tweet_ids: Iterable[str], provenance: str = "") -> "Corpus":
        keep = set(tweet_ids)
        tweets = [t for t in self.tweets if t.id in keep]
        labels = {tid: lab for tid, lab in self.labels.items() if tid in keep}
        return Corpus(tweets, labels, provenance or self.provenance)


@dataclass(frozen=True)
class RecordError:
    line: int
    message: str


@dataclass
class LoadResult:
    corpus: Corpus
    errors: list[RecordError]


_REQUIRED_TWEET_KEYS = ("id", "text")


def _parse_created_at(value, now: datetime) -> datetime | None:
    if value in (None, ""):
        return None
    if not isinstance(value, str):
        raise ValueError("created_at must be an RFC 3339 string")
    ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    if ts > now:
        raise ValueError(f"created_at {value} is in the future")
    return ts


def _tweet_from_record(rec: dict, now: datetime) -> Tweet:
    for key in _REQUIRED_TWEET_KEYS:
        if not str(rec.get(key) or "").strip():
            raise ValueError(f"missing or empty field {key!r}")
    return Tweet(
        id=str(rec["id"]),
        text=str(rec["text"]),
        lang=str(rec.get("lang") or "de"),
        created_at=_parse_created_at(rec.get("created_at"), now),
        author_id=str(rec.get("author_id") or ""),
        author_name=rec.get("author_name"),
        domain_tag=rec.get("domain_tag"),
    )


def load_tweets(path: str | Path, fmt: str = "jsonl", provenance: str = "") -> LoadResult:
    """Load tweets from JSONL or CSV.

    Malformed records and duplicate ids are rejected record by record and
    reported with their line number; an unreadable file raises CorpusError.
    """
    path = Path(path)
    if fmt not in ("jsonl", "csv"):
        raise CorpusError(f"unsupported tweet format {fmt!r}")
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc

    now = datetime.now(timezone.utc)
    tweets: list[Tweet] = []
    seen: set[str] = set()
    errors: list[RecordError] = []

    def add(rec: dict, line_no: int):
        try:
            tweet = _tweet_from_record(rec, now)
        except ValueError as exc:
            errors.append(RecordError(line_no, str(exc)))
            return
        if tweet.id in seen:
            errors.append(RecordError(line_no, f"duplicate id {tweet.id!r}"))
            return
        seen.add(tweet.id)
        tweets.append(tweet)

    if fmt == "jsonl":
        for line_no, line in enumerate(raw.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                errors.append(RecordError(line_no, f"invalid JSON: {exc.msg}"))
                continue
            if not isinstance(rec, dict):
                errors.append(RecordError(line_no, "record is not an object"))
                continue
            add(rec, line_no)
    else:
        reader = csv.DictReader(raw.splitlines())
        if reader.fieldnames is None or "id" not in reader.fieldnames:
            raise CorpusError(f"{path}: CSV header must include 'id' and 'text'")
        for line_no, rec in enumerate(reader, start=2):
            add({k: v for k, v in rec.items() if v not in (None, "")}, line_no)

    return LoadResult(Corpus(tweets, provenance=provenance or str(path)), errors)


def load_label_records(path: str | Path) -> list[LabelRecord]:
    """Read the rater CSV (header: tweet_id,labeler_id,label)."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc
    reader = csv.DictReader(raw.splitlines())
    expected = {"tweet_id", "labeler_id", "label"}
    if reader.fieldnames is None or not expected.issubset(reader.fieldnames):
        raise CorpusError(f"{path}: label CSV header must be tweet_id,labeler_id,label")
    records: list[LabelRecord] = []
    seen: set[tuple[str, str]] = set()
    for line_no, rec in enumerate(reader, start=2):
        label = (rec["label"] or "").strip()
        if label not in (LABEL_NEED, LABEL_NO_NEED):
            raise CorpusError(f"{path}:{line_no}: unknown label token {label!r}")
        key = (rec["tweet_id"], rec["labeler_id"])
        if key in seen:
            raise CorpusError(f"{path}:{line_no}: duplicate (tweet_id, labeler_id) {key}")
        seen.add(key)
        records.append(LabelRecord(rec["tweet_id"], rec["labeler_id"], label))
    return records


@dataclass
class AggregationResult:
    labels: list[AggregatedLabel]
    unaggregatable: list[tuple[str, int]]  # (tweet_id, record count != 3)


def aggregate_labels(records: Iterable[LabelRecord]) -> AggregationResult:
    """Fold exactly-three rater votes per tweet into one verdict.

    Tweets with a record count other than three are listed as
    unaggregatable and excluded from the output.
    """
    by_tweet: dict[str, list[LabelRecord]] = defaultdict(list)
    for rec in records:
        by_tweet[rec.tweet_id].append(rec)
    labels: list[AggregatedLabel] = []
    bad: list[tuple[str, int]] = []
    for tweet_id, recs in by_tweet.items():
        if len(recs) != 3:
            bad.append((tweet_id, len(recs)))
            continue
        votes = sum(1 for r in recs if r.label == LABEL_NEED)
        labels.append(AggregatedLabel(tweet_id, verdict_for_votes(votes), votes))
    return AggregationResult(labels, bad)


@dataclass(frozen=True)
class FilterRules:
    """Noise filters; the exact heuristics the original data set used are
    unknown, so every rule is explicit and reported."""

    drop_urls: bool = True
    drop_retweets: bool = True
    max_author_posts_per_day: int | None = None
    author_blocklist: frozenset[str] = frozenset()


# attribution order when a tweet matches several rules
_RULE_ORDER = ("url", "retweet", "blocklist", "author_frequency")


def _is_retweet(text: str) -> bool:
    head = text.split(None, 1)
    return bool(head) and head[0].lower() == "rt"


@dataclass
class FilterResult:
    corpus: Corpus
    removed: dict[str, int]


def filter_corpus(corpus: Corpus, rules: FilterRules) -> FilterResult:
    """Drop tweets matching any enabled rule; report per-rule removal counts.

    A tweet matching several rules is attributed to the first match in the
    order url, retweet, blocklist, author_frequency. Idempotent.
    """
    flooded: set[tuple[str, object]] = set()
    if rules.max_author_posts_per_day is not None:
        per_day = Counter(
            (t.author_id, t.created_at.date() if t.created_at else None) for t in corpus.tweets
        )
        flooded = {key for key, n in per_day.items() if n > rules.max_author_posts_per_day}

    removed = {name: 0 for name in _RULE_ORDER}
    kept: list[Tweet] = []
    for t in corpus.tweets:
        rule = None
        if rules.drop_urls and URL_RE.search(t.text):
            rule = "url"
        elif rules.drop_retweets and _is_retweet(t.text):
            rule = "retweet"
        elif t.author_id in rules.author_blocklist:
            rule = "blocklist"
        elif (t.author_id, t.created_at.date() if t.created_at else None) in flooded:
            rule = "author_frequency"
        if rule is None:
            kept.append(t)
        else:
            removed[rule] += 1

    kept_ids = {t.id for t in kept}
    labels = {tid: lab for tid, lab in corpus.labels.items() if tid in kept_ids}
    return FilterResult(Corpus(kept, labels, corpus.provenance), {k: v for k, v in removed.items() if v})


def stratified_split(corpus: Corpus, k: int, seed: int) -> list[list[Tweet]]:
    """Split the non-suspended labeled tweets into k stratified folds.

    Each class is shuffled with the seed and dealt round-robin, so fold
    class shares track the global share as closely as fold size allows
    (within +-2pp for the sizes used here). Deterministic given the seed.
    """
    if k < 1:
        raise CorpusError(f"fold count must be >= 1, got {k}")
    pairs = corpus.labeled()
    if not pairs:
        raise CorpusError("stratified_split needs aggregated Need/NoNeed labels")
    by_class: dict[Verdict, list[Tweet]] = defaultdict(list)
    for tweet, verdict in pairs:
        by_class[verdict].append(tweet)
    smallest = min(len(ts) for ts in by_class.values())
    if k > smallest:
        raise CorpusError(f"k={k} exceeds smallest class size {smallest}")

    rng = random.Random(seed)
    folds: list[list[Tweet]] = [[] for _ in range(k)]
    for verdict in (Verdict.NEED, Verdict.NO_NEED):
        members = list(by_class.get(verdict, []))
        rng.shuffle(members)
        for i, tweet in enumerate(members):
            folds[i % k].append(tweet)
    return folds


def subsample(corpus: Corpus, n: int, seed: int, stratified: bool = False) -> Corpus:
    """Deterministic subsample of n tweets; stratified keeps the Need share."""
    if n > len(corpus):
        raise CorpusError(f"cannot subsample {n} from corpus of {len(corpus)}")
    rng = random.Random(seed)
    if not stratified:
        chosen = rng.sample(corpus.tweets, n)
        return corpus.restricted_to(t.id for t in chosen)
    pairs = corpus.labeled()
    by_class: dict[Verdict, list[Tweet]] = defaultdict(list)
    for tweet, verdict in pairs:
        by_class[verdict].append(tweet)
    total = len(pairs)
    chosen_ids: list[str] = []
    classes = sorted(by_class, key=lambda v: v.value)
    for verdict in classes:
        members = by_class[verdict]
        take = round(n * len(members) / total)
        take = min(take, len(members))
        chosen_ids.extend(t.id for t in rng.sample(members, take))
    # rounding may leave a deficit; top up from remaining tweets
    if len(chosen_ids) < n:
        pool = [t for t, _ in pairs if t.id not in set(chosen_ids)]
        chosen_ids.extend(t.id for t in rng.sample(pool, n - len(chosen_ids)))
    return corpus.restricted_to(chosen_ids[:n])


def write_tweets_jsonl(corpus: Corpus, path: str | Path):
    with open(path, "w", encoding="utf-8") as fh:
        for t in corpus.tweets:
            fh.write(json.dumps(t.to_dict(), ensure_ascii=False) + "\n")


def write_aggregated_labels_csv(labels: Iterable[AggregatedLabel], path: str | Path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tweet_id", "verdict", "votes_need"])
        for lab in labels:
            writer.writerow([lab.tweet_id, lab.verdict.value, lab.votes_need])


def load_aggregated_labels_csv(path: str | Path) -> list[AggregatedLabel]:
    raw = Path(path).read_text(encoding="utf-8")
    reader = csv.DictReader(raw.splitlines())
    out = []
    for rec in reader:
        out.append(
            AggregatedLabel(rec["tweet_id"], Verdict(rec["verdict"]), int(rec["votes_need"]))
        )
    return out
