"""Shared fixtures: synthetic corpora with known structure.

The generators build corpora whose separability (or lack of it) is known
by construction, so evaluation results can be asserted against thresholds
without ever consulting the pipeline under test.
"""
from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone

import pytest

from needminer.corpus import AggregatedLabel, Corpus, Tweet, Verdict

BASE_TS = datetime(2021, 1, 1, 12, 0, tzinfo=timezone.utc)


def make_tweet(i, text, author="a0", created=None, domain=None, name=None, prefix="t"):
    return Tweet(
        id=f"{prefix}{i}",
        text=text,
        lang="de",
        created_at=created or (BASE_TS + timedelta(hours=i)),
        author_id=author,
        author_name=name,
        domain_tag=domain,
    )


def separable_corpus(
    n: int = 200,
    pos_share: float = 0.2,
    seed: int = 0,
    noise: float = 0.0,
    token_prefix: str = "",
    domain: str | None = None,
    id_prefix: str = "t",
) -> Corpus:
    """Disjoint class vocabularies: every document is a bag of tokens drawn
    exclusively from its class vocabulary, so the task is linearly
    separable. `noise` flips that fraction of labels."""
    rng = random.Random(seed)
    pos_vocab = [f"{token_prefix}need{j}" for j in range(15)]
    neg_vocab = [f"{token_prefix}misc{j}" for j in range(15)]
    n_pos = round(n * pos_share)
    tweets, labels = [], []
    for i in range(n):
        positive = i < n_pos
        vocab = pos_vocab if positive else neg_vocab
        words = rng.choices(vocab, k=rng.randint(5, 8))
        label = positive
        if noise and rng.random() < noise:
            label = not label
        tweet = make_tweet(i, " ".join(words), domain=domain, prefix=id_prefix)
        tweets.append(tweet)
        labels.append(
            AggregatedLabel(
                tweet.id,
                Verdict.NEED if label else Verdict.NO_NEED,
                3 if label else 0,
            )
        )
    return Corpus(tweets, {lab.tweet_id: lab for lab in labels}, provenance="synthetic")


CATEGORY_MARKERS = {
    "price": "markerpreis",
    "car_characteristics": "markerwagen",
    "charging_infrastructure": "markersaeule",
    "range": "markerweite",
    "charging_technology": "markerstecker",
    "environment_health": "markerumwelt",
    "society": "markerpolitik",
    "other": "markerrest",
}


def category_corpus(per_category: int = 30, seed: int = 0):
    """Need tweets with one planted marker token per category plus shared
    filler; returns (corpus, labels_by_tweet)."""
    rng = random.Random(seed)
    filler = [f"fill{j}" for j in range(12)]
    tweets = []
    labels_by_tweet: dict[str, set[str]] = {}
    i = 0
    for category, marker in CATEGORY_MARKERS.items():
        for _ in range(per_category):
            words = rng.choices(filler, k=rng.randint(4, 6)) + [marker]
            rng.shuffle(words)
            tweet = make_tweet(i, " ".join(words), prefix="c")
            tweets.append(tweet)
            labels_by_tweet[tweet.id] = {category}
            i += 1
    return Corpus(tweets, provenance="synthetic-categories"), labels_by_tweet


@pytest.fixture
def small_separable():
    return separable_corpus(n=100, pos_share=0.2, seed=7)
