"""Turn raw post text into sparse term-frequency vectors.

Syntactic steps run in one fixed canonical order regardless of how the
config was written: username removal, retweet-tag removal, special-char
removal, downcasing, hashtag stripping, tokenization, minimum-length
filter, stemming, n-gram augmentation. Semantic steps (lemmatizing,
synset/hypernym expansion) run afterwards against a lexical resource.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np

from .errors import PipelineError
from .stemming import stem

USERNAME_RE = re.compile(r"@\w+")
RETWEET_RE = re.compile(r"\b(?:RT|rt)\b")
SYNSET_PREFIX = "syn:"


@dataclass(frozen=True)
class PipelineConfig:
    username_removal: bool = False
    retweet_tag_removal: bool = False
    special_char_removal: bool = False
    downcasing: bool = False
    hashtag_symbol_removal: bool = False
    min_token_length: int = 1
    stemming: bool = False
    stemmer_language: str = "german"
    ngrams: tuple[int, ...] = ()
    lemmatizing: bool = False
    synset_adder: bool = False
    disambiguator: bool = False
    hypernym_adder: bool = False
    hypernym_level: int = 1

    def __post_init__(self):
        if self.min_token_length < 1:
            raise PipelineError("min_token_length must be >= 1")
        if not set(self.ngrams) <= {2, 3}:
            raise PipelineError(f"ngrams must be a subset of {{2, 3}}, got {self.ngrams}")
        if self.hypernym_level < 1:
            raise PipelineError("hypernym level must be >= 1")
        if self.disambiguator and not self.synset_adder:
            raise PipelineError("disambiguator requires synset_adder")

    @property
    def uses_semantics(self) -> bool:
        return self.lemmatizing or self.synset_adder or self.hypernym_adder

    def to_dict(self) -> dict:
        d = self.__dict__.copy()
        d["ngrams"] = list(self.ngrams)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        d = dict(d)
        d["ngrams"] = tuple(d.get("ngrams", ()))
        return cls(**d)


def default_pipeline(language: str = "german") -> PipelineConfig:
    """All syntactic steps on, no n-grams, semantics off."""
    return PipelineConfig(
        username_removal=True,
        retweet_tag_removal=True,
        special_char_removal=True,
        downcasing=True,
        hashtag_symbol_removal=True,
        min_token_length=2,
        stemming=True,
        stemmer_language=language,
    )


class PosTagger(Protocol):
    """Extension point; part-of-speech features did not pull their weight,
    so only a no-op implementation ships."""

    def tag(self, tokens: Sequence[str]) -> list[tuple[str, str]]: ...


class NullPosTagger:
    def tag(self, tokens: Sequence[str]) -> list[tuple[str, str]]:
        return [(tok, "") for tok in tokens]


@dataclass(frozen=True)
class LexicalResource:
    """Lemma map, ordered synsets (most probable first) and hypernym edges."""

    lemmas: dict[str, str] = field(default_factory=dict)
    synsets: dict[str, tuple[str, ...]] = field(default_factory=dict)
    hypernyms: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        known = {s for syns in self.synsets.values() for s in syns}
        known |= set(self.hypernyms.values())
        for node in self.hypernyms:
            if node not in known:
                raise PipelineError(f"hypernym node {node!r} is not any lemma's synset or a parent")
        for start in self.hypernyms:
            seen = {start}
            node = start
            while node in self.hypernyms:
                node = self.hypernyms[node]
                if node in seen:
                    raise PipelineError(f"hypernym cycle through {node!r}")
                seen.add(node)

    def ancestor(self, synset: str, level: int) -> str:
        """Walk up `level` hypernym edges; stops at the topmost ancestor."""
        node = synset
        for _ in range(level):
            if node not in self.hypernyms:
                break
            node = self.hypernyms[node]
        return node


def load_lexical_resource(path: str | Path) -> LexicalResource:
    """Parse the three-section tab-separated lexicon file
    (LEMMA / SYNSET / HYPERNYM)."""
    lemmas: dict[str, str] = {}
    synsets: dict[str, tuple[str, ...]] = {}
    hypernyms: dict[str, str] = {}
    section = None
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.rstrip()
        if not line or line.startswith("#"):
            continue
        if line in ("LEMMA", "SYNSET", "HYPERNYM"):
            section = line
            continue
        parts = line.split("\t")
        if section == "LEMMA" and len(parts) == 2:
            lemmas[parts[0]] = parts[1]
        elif section == "SYNSET" and len(parts) >= 2:
            synsets[parts[0]] = tuple(parts[1:])
        elif section == "HYPERNYM" and len(parts) == 2:
            hypernyms[parts[0]] = parts[1]
        else:
            raise PipelineError(f"{path}:{line_no}: malformed line in section {section}")
    return LexicalResource(lemmas, synsets, hypernyms)


def _strip_special(text: str) -> str:
    # keep letters/digits, whitespace and hyphens; everything else becomes a space
    return "".join(ch if (ch.isalnum() or ch.isspace() or ch == "-") else " " for ch in text)


def normalize(text: str, cfg: PipelineConfig) -> list[str]:
    """Apply the enabled syntactic steps in canonical order."""
    if cfg.username_removal:
        text = USERNAME_RE.sub(" ", text)
    if cfg.retweet_tag_removal:
        text = RETWEET_RE.sub(" ", text)
    if cfg.special_char_removal:
        text = _strip_special(text)
    if cfg.downcasing:
        text = text.lower()
    if cfg.hashtag_symbol_removal:
        text = text.replace("#", "")

    tokens = text.split()
    if cfg.special_char_removal:
        tokens = [tok.strip("-") for tok in tokens]
        tokens = [tok for tok in tokens if tok]
    if cfg.min_token_length > 1:
        tokens = [tok for tok in tokens if len(tok) >= cfg.min_token_length]
    if cfg.stemming:
        tokens = [stem(tok, cfg.stemmer_language) for tok in tokens]
        tokens = [tok for tok in tokens if tok]
    for n in sorted(cfg.ngrams):
        tokens = tokens + ["_".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]
    return tokens


def semantic_expand(
    tokens: Sequence[str], cfg: PipelineConfig, lex: LexicalResource | None
) -> list[str]:
    """Lemmatize and append synset / hypernym tokens.

    Unknown tokens pass through unchanged; the original (possibly
    lemmatized) token is always kept. A hypernym level beyond the chain
    depth yields the topmost ancestor.
    """
    if not cfg.uses_semantics:
        return list(tokens)
    if lex is None:
        raise PipelineError("semantic steps enabled but no lexical resource given")
    out: list[str] = []
    for tok in tokens:
        base = lex.lemmas.get(tok, tok) if cfg.lemmatizing else tok
        out.append(base)
        syns = lex.synsets.get(base, ())
        if cfg.synset_adder and syns:
            chosen = syns[:1] if cfg.disambiguator else syns
            out.extend(SYNSET_PREFIX + s for s in chosen)
        if cfg.hypernym_adder and syns:
            out.append(SYNSET_PREFIX + lex.ancestor(syns[0], cfg.hypernym_level))
    return out


def tokens_for_text(text: str, cfg: PipelineConfig, lex: LexicalResource | None = None) -> list[str]:
    """normalize + semantic_expand in one call."""
    return semantic_expand(normalize(text, cfg), cfg, lex)


@dataclass(frozen=True)
class Vocabulary:
    index: dict[str, int]
    fitted_on: str = ""

    def __post_init__(self):
        values = sorted(self.index.values())
        if values != list(range(len(values))):
            raise PipelineError("vocabulary indices must form a contiguous 0-based range")

    def __len__(self) -> int:
        return len(self.index)

    def tokens_in_order(self) -> list[str]:
        return [tok for tok, _ in sorted(self.index.items(), key=lambda kv: kv[1])]

    def to_dict(self) -> dict:
        return {"tokens": self.tokens_in_order(), "fitted_on": self.fitted_on}

    @classmethod
    def from_dict(cls, d: dict) -> "Vocabulary":
        return cls({tok: i for i, tok in enumerate(d["tokens"])}, d.get("fitted_on", ""))


def build_vocabulary(sequences: Iterable[Sequence[str]], fitted_on: str = "") -> Vocabulary:
    """One column per distinct token, indexed in first-occurrence order."""
    index: dict[str, int] = {}
    for seq in sequences:
        for tok in seq:
            if tok not in index:
                index[tok] = len(index)
    if not index:
        raise PipelineError("cannot build a vocabulary from all-empty token sequences")
    return Vocabulary(index, fitted_on)


@dataclass(frozen=True)
class FeatureVector:
    """Sparse term-frequency vector. Counts stay integral for real text and
    may be fractional for synthetic (interpolated) points."""

    indices: tuple[int, ...]
    counts: tuple[float, ...]
    dimension: int

    def __post_init__(self):
        if len(self.indices) != len(self.counts):
            raise PipelineError("indices and counts length mismatch")
        if any(c <= 0 for c in self.counts):
            raise PipelineError("feature counts must be > 0")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise PipelineError("indices must be strictly increasing")
        if self.indices and self.indices[-1] >= self.dimension:
            raise PipelineError("index out of range for dimension")

    def to_dense(self) -> np.ndarray:
        arr = np.zeros(self.dimension)
        if self.indices:
            arr[list(self.indices)] = self.counts
        return arr

    def l1(self) -> float:
        return float(sum(self.counts))

    @classmethod
    def from_dense(cls, arr: np.ndarray) -> "FeatureVector":
        nz = np.nonzero(arr)[0]
        return cls(tuple(int(i) for i in nz), tuple(float(arr[i]) for i in nz), int(arr.shape[0]))


def vectorize(tokens: Sequence[str], vocab: Vocabulary) -> FeatureVector:
    """Term-frequency counts over known tokens; out-of-vocabulary tokens
    are dropped so train and test dimensionality stay identical."""
    if not len(vocab):
        raise PipelineError("vocabulary is empty")
    counts = Counter(vocab.index[tok] for tok in tokens if tok in vocab.index)
    items = sorted(counts.items())
    return FeatureVector(
        tuple(i for i, _ in items), tuple(float(c) for _, c in items), len(vocab)
    )


def to_matrix(vectors: Sequence[FeatureVector]) -> np.ndarray:
    """Stack sparse vectors into a dense (n_docs, dimension) array."""
    if not vectors:
        return np.zeros((0, 0))
    dim = vectors[0].dimension
    if any(v.dimension != dim for v in vectors):
        raise PipelineError("feature vectors have mixed dimensions")
    mat = np.zeros((len(vectors), dim))
    for row, vec in enumerate(vectors):
        if vec.indices:
            mat[row, list(vec.indices)] = vec.counts
    return mat
