import pytest
from importlib.resources import files

from needminer.enrich import (
    GENDER_UNKNOWN,
    NameLexicon,
    SentimentLexicon,
    load_name_lexicon,
    load_sentiment_lexicon,
    predict_gender,
    sentiment_score,
)
from needminer.errors import ConfigError

LEX = SentimentLexicon(
    strengths={"gut": 2, "super": 3, "schlecht": -2, "furchtbar": -4},
    negations=frozenset({"nicht", "kein"}),
    boosters=frozenset({"sehr"}),
)
NAMES = NameLexicon({"anna": "female", "peter": "male", "kim": "unisex"})


class TestSentiment:
    def test_neutral_floor(self):
        assert sentiment_score("keine treffer hier", SentimentLexicon()) == (1, 1)

    def test_single_positive_hit(self):
        assert sentiment_score("das war super heute", LEX) == (3, 1)

    def test_single_negative_hit(self):
        assert sentiment_score("einfach furchtbar", LEX) == (1, 4)

    def test_negation_flips_polarity(self):
        # "nicht gut": +2 becomes -2 -> positive floor, negative 2
        assert sentiment_score("nicht gut", LEX) == (1, 2)

    def test_negation_window_two_tokens(self):
        assert sentiment_score("nicht wirklich gut", LEX) == (1, 2)
        # three tokens in between: out of the window
        assert sentiment_score("nicht a b c gut", LEX) == (2, 1)

    def test_booster_raises_magnitude(self):
        assert sentiment_score("sehr gut", LEX) == (3, 1)
        assert sentiment_score("sehr furchtbar", LEX) == (1, 5)

    def test_booster_caps_at_five(self):
        lex = SentimentLexicon(strengths={"perfekt": 5}, boosters=frozenset({"sehr"}))
        assert sentiment_score("sehr perfekt", lex) == (5, 1)

    def test_strongest_hit_wins_per_polarity(self):
        assert sentiment_score("gut aber schlecht und super", LEX) == (3, 2)

    def test_deterministic_and_case_insensitive(self):
        assert sentiment_score("SUPER!!", LEX) == sentiment_score("super", LEX) == (3, 1)

    def test_strength_range_validated(self):
        with pytest.raises(ConfigError):
            SentimentLexicon(strengths={"zuviel": 9})


class TestGender:
    def test_known_female(self):
        assert predict_gender("Anna Müller", NAMES) == "female"

    def test_known_male_with_punctuation(self):
        assert predict_gender("Peter,", NAMES) == "male"

    def test_handle_misses(self):
        assert predict_gender("xX_driver_Xx", NAMES) == GENDER_UNKNOWN

    def test_unisex_maps_to_unknown(self):
        assert predict_gender("Kim B.", NAMES) == GENDER_UNKNOWN

    def test_empty_name(self):
        assert predict_gender(None, NAMES) == GENDER_UNKNOWN
        assert predict_gender("   ", NAMES) == GENDER_UNKNOWN

    def test_empty_lexicon_always_unknown(self):
        empty = NameLexicon()
        for name in ("Anna", "Peter", "Kim"):
            assert predict_gender(name, empty) == GENDER_UNKNOWN

    def test_lowercase_keys_enforced(self):
        with pytest.raises(ConfigError):
            NameLexicon({"Anna": "female"})


class TestLexiconFiles:
    def test_packaged_sentiment_lexicon(self):
        lex = load_sentiment_lexicon(files("needminer.data") / "sentiment_de.tsv")
        assert lex.strengths["gut"] == 2
        assert "nicht" in lex.negations
        assert "sehr" in lex.boosters
        assert sentiment_score("nicht gut", lex) == (1, 2)

    def test_packaged_name_lexicon(self):
        lex = load_name_lexicon(files("needminer.data") / "names_de.tsv")
        assert predict_gender("Anna Beispiel", lex) == "female"
        assert predict_gender("Kim Beispiel", lex) == GENDER_UNKNOWN

    def test_header_kind_checked(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("kind\tgender\ngut\t2\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="kind"):
            load_sentiment_lexicon(path)

    def test_bad_value_rejected(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("kind\tsentiment\ngut\tzwei\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="bad sentiment value"):
            load_sentiment_lexicon(path)
