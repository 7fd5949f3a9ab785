"""Auxiliary tweet annotations: lexicon-based sentiment and author gender.

Both are deliberately simple, pluggable baselines; the interfaces allow
swapping in stronger models without touching the orchestrator.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

_WORD_RE = re.compile(r"\w+", re.UNICODE)

GENDER_MALE = "male"
GENDER_FEMALE = "female"
GENDER_UNISEX = "unisex"
GENDER_UNKNOWN = "unknown"

# a negation flips the polarity of a scored term up to this many tokens later
_NEGATION_WINDOW = 2
_MAX_STRENGTH = 5


@dataclass(frozen=True)
class SentimentLexicon:
    strengths: dict[str, int] = field(default_factory=dict)  # term -> [-5, 5]
    negations: frozenset[str] = frozenset()
    boosters: frozenset[str] = frozenset()

    def __post_init__(self):
        bad = {t: s for t, s in self.strengths.items() if not -5 <= s <= 5}
        if bad:
            raise ConfigError(f"sentiment strengths out of [-5, 5]: {bad}")


@dataclass(frozen=True)
class NameLexicon:
    genders: dict[str, str] = field(default_factory=dict)  # lowercase first name

    def __post_init__(self):
        bad = {n: g for n, g in self.genders.items() if g not in (GENDER_MALE, GENDER_FEMALE, GENDER_UNISEX)}
        if bad:
            raise ConfigError(f"invalid gender values: {bad}")
        not_lower = [n for n in self.genders if n != n.lower()]
        if not_lower:
            raise ConfigError(f"name lexicon keys must be lowercase: {not_lower[:5]}")


def _read_lexicon_rows(path: str | Path, expected_kind: str) -> list[tuple[str, str]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ConfigError(f"{path}: empty lexicon file")
    header = lines[0].split("\t")
    if len(header) != 2 or header[0] != "kind" or header[1] != expected_kind:
        raise ConfigError(f"{path}: expected header 'kind\\t{expected_kind}', got {lines[0]!r}")
    rows = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ConfigError(f"{path}:{line_no}: expected 'term<TAB>value'")
        rows.append((parts[0].strip().lower(), parts[1].strip()))
    return rows


def load_sentiment_lexicon(path: str | Path) -> SentimentLexicon:
    strengths: dict[str, int] = {}
    negations: set[str] = set()
    boosters: set[str] = set()
    for term, value in _read_lexicon_rows(path, "sentiment"):
        if value == "negation":
            negations.add(term)
        elif value == "booster":
            boosters.add(term)
        else:
            try:
                strengths[term] = int(value)
            except ValueError:
                raise ConfigError(f"bad sentiment value {value!r} for term {term!r}") from None
    return SentimentLexicon(strengths, frozenset(negations), frozenset(boosters))


def load_name_lexicon(path: str | Path) -> NameLexicon:
    return NameLexicon({name: value for name, value in _read_lexicon_rows(path, "gender")})


def sentiment_score(text: str, lex: SentimentLexicon) -> tuple[int, int]:
    """Dual-polarity strengths (positive 1..5, negative 1..5).

    The strongest positive and strongest negative hit win; both floor at 1.
    A negation within two tokens before a scored term flips its polarity;
    a booster directly before it raises its magnitude by one (capped at 5).
    """
    tokens = [t.lower() for t in _WORD_RE.findall(text)]
    pos, neg = 1, 1
    for i, tok in enumerate(tokens):
        strength = lex.strengths.get(tok)
        if strength is None or strength == 0:
            continue
        window = tokens[max(0, i - _NEGATION_WINDOW) : i]
        if any(t in lex.negations for t in window):
            strength = -strength
        if i > 0 and tokens[i - 1] in lex.boosters:
            magnitude = min(abs(strength) + 1, _MAX_STRENGTH)
            strength = magnitude if strength > 0 else -magnitude
        if strength > 0:
            pos = max(pos, strength)
        else:
            neg = max(neg, -strength)
    return pos, neg


def predict_gender(author_name: str | None, lex: NameLexicon) -> str:
    """Look up the first token of the display name; unisex or unmapped
    names stay unknown."""
    if not author_name or not author_name.strip():
        return GENDER_UNKNOWN
    first = author_name.split()[0].lower().strip(".,;:!?\"'()[]{}")
    gender = lex.genders.get(first, GENDER_UNKNOWN)
    return gender if gender in (GENDER_MALE, GENDER_FEMALE) else GENDER_UNKNOWN
