"""Suffix-stripping stemmers in the snowball style.

German is the default; "english" covers the toy fixtures, "none" disables
stemming. These are deliberately compact re-implementations: good enough
for bag-of-words features, not full morphological analysis.
"""
from __future__ import annotations

from .errors import PipelineError

_GERMAN_VOWELS = set("aeiouyäöü")
_S_ENDINGS = set("bdfghklmnrt")
_ST_ENDINGS = set("bdfghklmnt")


def _german_regions(word: str) -> tuple[int, int]:
    """Start offsets of R1 and R2 (R1 floored at 3 per the algorithm)."""

    def region_after(start: int) -> int:
        for i in range(start, len(word) - 1):
            if word[i] in _GERMAN_VOWELS and word[i + 1] not in _GERMAN_VOWELS:
                return i + 2
        return len(word)

    r1 = region_after(0)
    r2 = region_after(r1 - 1 if r1 > 0 else 0)
    return max(r1, 3), r2


def _strip(word: str, suffixes: tuple[str, ...], region_start: int) -> str:
    for suf in suffixes:  # listed longest first
        if word.endswith(suf) and len(word) - len(suf) >= region_start:
            return word[: -len(suf)]
    return word


def _stem_german(word: str) -> str:
    word = word.replace("ß", "ss")
    if len(word) <= 3:
        return _deumlaut(word)
    r1, r2 = _german_regions(word)

    # step 1: inflectional suffixes
    stripped = _strip(word, ("ern", "em", "er"), r1)
    if stripped == word:
        stripped = _strip(word, ("en", "es", "e"), r1)
    if stripped == word and word.endswith("s") and len(word) >= 2 and word[-2] in _S_ENDINGS:
        stripped = _strip(word, ("s",), r1)
    word = stripped

    # step 2
    stripped = _strip(word, ("est", "en", "er"), r1)
    if stripped == word and word.endswith("st") and len(word) >= 6 and word[-3] in _ST_ENDINGS:
        stripped = word[:-2]
    word = stripped

    # step 3: derivational suffixes
    if word.endswith(("end", "ung")):
        word = _strip(word, ("end", "ung"), r2)
    elif word.endswith(("isch", "ik", "ig")):
        cut = _strip(word, ("isch", "ik", "ig"), r2)
        if cut != word and not cut.endswith("e"):
            word = cut
    elif word.endswith(("lich", "heit")):
        word = _strip(word, ("lich", "heit"), r2)
    elif word.endswith("keit"):
        word = _strip(word, ("keit",), r2)

    return _deumlaut(word)


def _deumlaut(word: str) -> str:
    return word.translate(str.maketrans("äöü", "aou"))


def _stem_english(word: str) -> str:
    if len(word) <= 3:
        return word
    if word.endswith("sses"):
        return word[:-2]
    if word.endswith("ies"):
        return word[:-2]
    if word.endswith("s") and not word.endswith("ss"):
        word = word[:-1]
    for suf in ("ingly", "edly", "ing", "ed", "ly"):
        if word.endswith(suf) and len(word) - len(suf) >= 3:
            return word[: -len(suf)]
    return word


_STEMMERS = {
    "german": _stem_german,
    "english": _stem_english,
    "none": lambda w: w,
}


def stem(word: str, language: str = "german") -> str:
    try:
        fn = _STEMMERS[language]
    except KeyError:
        raise PipelineError(
            f"unknown stemmer language {language!r}; choose from {sorted(_STEMMERS)}"
        ) from None
    return fn(word)
