"""Embedded persistence: an append-only record log plus a compacted
snapshot, indexed in memory. No external database; the store root is a
plain directory that can be copied around.

Writes append one JSON line per record and flush, so each tweet commits
atomically. A single writer is assumed; readers always get consistent
copies of the in-memory index.
"""
from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from ..corpus import Tweet
from ..errors import ServiceError
from ..needcat import CategoryAssignment

LOG_NAME = "records.log.jsonl"
SNAPSHOT_NAME = "snapshot.json"


@dataclass(frozen=True)
class StoredTweet:
    tweet: Tweet
    need_score: float
    is_need: bool
    threshold: float  # active classification threshold at processing time
    model_versions: dict[str, str]
    processed_at: datetime
    assignment: CategoryAssignment | None = None
    sentiment: tuple[int, int] | None = None
    gender: str | None = None

    def to_dict(self) -> dict:
        return {
            "tweet": self.tweet.to_dict(),
            "need_score": self.need_score,
            "is_need": self.is_need,
            "threshold": self.threshold,
            "model_versions": self.model_versions,
            "processed_at": self.processed_at.isoformat(),
            "assignment": self.assignment.to_dict() if self.assignment else None,
            "sentiment": list(self.sentiment) if self.sentiment else None,
            "gender": self.gender,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StoredTweet":
        t = d["tweet"]
        created = datetime.fromisoformat(t["created_at"]) if t.get("created_at") else None
        tweet = Tweet(
            id=t["id"],
            text=t["text"],
            lang=t.get("lang", "de"),
            created_at=created,
            author_id=t.get("author_id", ""),
            author_name=t.get("author_name"),
            domain_tag=t.get("domain_tag"),
        )
        assignment = None
        if d.get("assignment"):
            a = d["assignment"]
            assignment = CategoryAssignment(
                a["tweet_id"], tuple(a["categories"]), a["scores"], a.get("low_confidence", False)
            )
        return cls(
            tweet=tweet,
            need_score=d["need_score"],
            is_need=d["is_need"],
            threshold=d.get("threshold", 0.5),
            model_versions=d.get("model_versions", {}),
            processed_at=datetime.fromisoformat(d["processed_at"]),
            assignment=assignment,
            sentiment=tuple(d["sentiment"]) if d.get("sentiment") else None,
            gender=d.get("gender"),
        )


def _tweet_from_dict(t: dict) -> Tweet:
    created = datetime.fromisoformat(t["created_at"]) if t.get("created_at") else None
    return Tweet(
        id=t["id"],
        text=t["text"],
        lang=t.get("lang", "de"),
        created_at=created,
        author_id=t.get("author_id", ""),
        author_name=t.get("author_name"),
        domain_tag=t.get("domain_tag"),
    )


class TweetStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._raw: dict[str, Tweet] = {}
        self._processed: dict[str, StoredTweet] = {}
        self._log = None
        self._load()
        self._log = open(self.root / LOG_NAME, "a", encoding="utf-8")

    # -- loading ------------------------------------------------------------

    def _load(self):
        snap_path = self.root / SNAPSHOT_NAME
        if snap_path.exists():
            snap = json.loads(snap_path.read_text(encoding="utf-8"))
            for rec in snap.get("raw", []):
                tweet = _tweet_from_dict(rec)
                self._raw[tweet.id] = tweet
            for rec in snap.get("processed", []):
                st = StoredTweet.from_dict(rec)
                self._processed[st.tweet.id] = st
        log_path = self.root / LOG_NAME
        if log_path.exists():
            for line_no, line in enumerate(log_path.read_text(encoding="utf-8").splitlines(), 1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    # a torn final line from a crashed writer is skipped
                    continue
                if rec.get("type") == "raw":
                    tweet = _tweet_from_dict(rec["record"])
                    self._raw[tweet.id] = tweet
                elif rec.get("type") == "processed":
                    st = StoredTweet.from_dict(rec["record"])
                    self._processed[st.tweet.id] = st

    # -- writes -------------------------------------------------------------

    def _append(self, kind: str, record: dict):
        self._log.write(json.dumps({"type": kind, "record": record}, ensure_ascii=False) + "\n")
        self._log.flush()
        os.fsync(self._log.fileno())

    def add_raw(self, tweet: Tweet) -> bool:
        """Store a raw tweet; returns False (and writes nothing) for a
        duplicate id."""
        with self._lock:
            if tweet.id in self._raw:
                return False
            self._raw[tweet.id] = tweet
            self._append("raw", tweet.to_dict())
            return True

    def put_processed(self, stored: StoredTweet):
        with self._lock:
            if stored.tweet.id not in self._raw:
                raise ServiceError(f"processed record for unknown raw tweet {stored.tweet.id!r}")
            self._processed[stored.tweet.id] = stored
            self._append("processed", stored.to_dict())

    def compact(self):
        """Write a snapshot of the current state and truncate the log."""
        with self._lock:
            snapshot = {
                "compacted_at": datetime.now(timezone.utc).isoformat(),
                "raw": [t.to_dict() for t in self._raw.values()],
                "processed": [st.to_dict() for st in self._processed.values()],
            }
            tmp = self.root / (SNAPSHOT_NAME + ".tmp")
            tmp.write_text(json.dumps(snapshot, ensure_ascii=False), encoding="utf-8")
            tmp.replace(self.root / SNAPSHOT_NAME)
            self._log.close()
            self._log = open(self.root / LOG_NAME, "w", encoding="utf-8")

    def close(self):
        if self._log and not self._log.closed:
            self._log.close()

    # -- reads --------------------------------------------------------------

    def raw_ids(self) -> set[str]:
        with self._lock:
            return set(self._raw)

    def raw_tweets(self) -> list[Tweet]:
        with self._lock:
            return list(self._raw.values())

    def processed_tweets(self) -> list[StoredTweet]:
        with self._lock:
            return list(self._processed.values())

    def processed_versions(self, tweet_id: str) -> dict[str, str] | None:
        with self._lock:
            st = self._processed.get(tweet_id)
            return st.model_versions if st else None

    def __len__(self) -> int:
        with self._lock:
            return len(self._raw)
