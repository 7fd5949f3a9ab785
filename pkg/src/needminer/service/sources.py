"""Tweet sources: file replay for offline runs and a minimal HTTP poll
endpoint speaking the same JSON records, plus keyword-filtered ingestion."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import requests

from ..corpus import Tweet, _tweet_from_record
from ..errors import ServiceError
from .store import TweetStore

KIND_FILE_REPLAY = "file_replay"
KIND_HTTP_POLL = "http_poll"


@dataclass(frozen=True)
class SourceSpec:
    kind: str
    location: str
    keywords: tuple[str, ...]
    poll_interval: int = 60

    def __post_init__(self):
        if self.kind not in (KIND_FILE_REPLAY, KIND_HTTP_POLL):
            raise ServiceError(f"unknown source kind {self.kind!r}")
        if not self.keywords:
            raise ServiceError("keyword filter list must be non-empty")
        if self.kind == KIND_HTTP_POLL and self.poll_interval < 1:
            raise ServiceError("poll interval must be >= 1 second")


@dataclass(frozen=True)
class RetryPolicy:
    attempts: int = 3
    base_delay: float = 0.5  # doubles per retry

    def delays(self):
        for i in range(self.attempts):
            yield self.base_delay * (2**i)


@dataclass
class IngestReport:
    seen: int = 0
    matched: int = 0
    new: int = 0
    duplicates: int = 0
    malformed: int = 0

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def _with_retries(fn, retry: RetryPolicy, what: str):
    last_exc = None
    for attempt, delay in enumerate(retry.delays()):
        try:
            return fn()
        except (OSError, requests.RequestException) as exc:
            last_exc = exc
            if attempt + 1 < retry.attempts:
                time.sleep(delay)
    raise ServiceError(f"{what} unreachable after {retry.attempts} attempts: {last_exc}")


def _read_records(source: SourceSpec, retry: RetryPolicy) -> list:
    if source.kind == KIND_FILE_REPLAY:

        def read_file():
            text = Path(source.location).read_text(encoding="utf-8")
            return [line for line in text.splitlines() if line.strip()]

        lines = _with_retries(read_file, retry, source.location)
        records = []
        for line in lines:
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError:
                records.append(None)  # malformed marker
        return records

    def poll():
        resp = requests.get(source.location, timeout=10)
        resp.raise_for_status()
        return resp.json()

    payload = _with_retries(poll, retry, source.location)
    if not isinstance(payload, list):
        raise ServiceError(f"{source.location}: poll endpoint must return a JSON array")
    return payload


def ingest(source: SourceSpec, store: TweetStore, retry: RetryPolicy = RetryPolicy()) -> IngestReport:
    """Pull records from the source, keep keyword matches, dedup by id.

    Matching is a case-insensitive substring test against any configured
    keyword. Malformed records are skipped and counted; replaying the same
    source again adds nothing.
    """
    report = IngestReport()
    now = datetime.now(timezone.utc)
    keywords = [kw.lower() for kw in source.keywords]
    for rec in _read_records(source, retry):
        report.seen += 1
        if rec is None or not isinstance(rec, dict):
            report.malformed += 1
            continue
        try:
            tweet = _tweet_from_record(rec, now)
        except ValueError:
            report.malformed += 1
            continue
        text = tweet.text.lower()
        if not any(kw in text for kw in keywords):
            continue
        report.matched += 1
        if store.add_raw(tweet):
            report.new += 1
        else:
            report.duplicates += 1
    return report
