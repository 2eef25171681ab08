import pytest

from cascata.corpus import Annotation, Corpus, TweetRecord
from cascata.errors import DataError
from cascata.lexicon import (CategoryLexicon, SentimentLexicon, annotate, annotate_corpus, annotate_text,
                             corpus_means, term_ratio, tokenize)

SLEX = SentimentLexicon({"feliz": 3, "triste": -3})
CLEX = CategoryLexicon(social=["amig*"], cognitive=["pens*", "saber"])


@pytest.mark.parametrize("text, tokens", [
    ("", []),
    ("¡Feliz día!", ["feliz", "día"]),
    ("ver http://x.co @ana #Lunes", ["ver", "lunes"]),
    ("Hola, MUNDO... :)", ["hola", "mundo"]),
    ("www.ejemplo.es y https://t.co/abc", ["y"]),
    ("e-mail «citado»", ["e-mail", "citado"]),
])
def test_tokenize(text, tokens):
    assert tokenize(text) == tokens


def test_tokenize_normalizes_to_nfc():
    decomposed = "café"
    assert tokenize(decomposed) == ["café"]


def _tweet(text):
    return TweetRecord("t", "u", 0, text)


def test_annotate_positive():
    assert annotate(_tweet("feliz"), SLEX, CLEX).e == 1


def test_annotate_tie_is_neutral():
    a = annotate(_tweet("feliz triste"), SLEX, CLEX)
    assert a.e == 0 and a.w == 2


def test_annotate_prefix_wildcard():
    a = annotate(_tweet("mis amigos"), SLEX, CLEX)
    assert (a.soc, a.cog, a.w) == (1, 0, 2)


def test_strongest_match_wins():
    slex = SentimentLexicon({"bueno": 2, "horrible": -4, "genial": 5})
    assert annotate_text("bueno horrible", slex, CLEX).e == -1
    assert annotate_text("bueno horrible genial", slex, CLEX).e == 1


def test_exact_entry_beats_prefix():
    slex = SentimentLexicon({"mal*": -2, "maleta": 1})
    assert slex.strength("maleta") == 1
    assert slex.strength("maldito") == -2
    assert slex.strength("ma") == 0


def test_unannotatable_without_text():
    tw = TweetRecord("t", "u", 0, None, Annotation(0))
    with pytest.raises(DataError, match="unannotatable"):
        annotate(tw, SLEX, CLEX)


@pytest.mark.parametrize("entries", [{"x": 0}, {"x": 6}, {"": 1}, {"*": 1}, {"a*b": 1}])
def test_invalid_sentiment_lexicon(entries):
    with pytest.raises(DataError):
        SentimentLexicon(entries)


def test_swap_flips_sentiment_only():
    text = "feliz amigos pensar triste feliz"
    a = annotate_text(text + " feliz", SLEX, CLEX)
    b = annotate_text(text + " feliz", SLEX.swapped(), CLEX)
    assert a.e == -b.e
    assert (a.soc, a.cog, a.w) == (b.soc, b.cog, b.w)


def test_lexicon_files(tmp_path):
    s = tmp_path / "s.tsv"
    s.write_text("lemma\tstrength\n# comment\nfeliz\t3\ntrist*\t-2\n\n", encoding="utf-8")
    c = tmp_path / "c.tsv"
    c.write_text("lemma\tcategory\namig*\tsocial\npens*\tcognitive\n", encoding="utf-8")
    slex = SentimentLexicon.from_file(s)
    clex = CategoryLexicon.from_file(c)
    assert slex.strength("tristeza") == -2
    assert clex.is_social("amiga") and clex.is_cognitive("pensamos")
    bad = tmp_path / "bad.tsv"
    bad.write_text("feliz\tmucho\n", encoding="utf-8")
    with pytest.raises(DataError):
        SentimentLexicon.from_file(bad)
    with pytest.raises(DataError):
        CategoryLexicon.from_file(s)
    with pytest.raises(DataError):
        SentimentLexicon.from_file(tmp_path / "missing.tsv")


def test_corpus_means_sentiment_shares():
    anns = [Annotation(1), Annotation(0), Annotation(-1), Annotation(0)]
    m = corpus_means(anns)
    assert (m.mu_p, m.mu_n) == (0.25, 0.25)


def test_corpus_means_all_neutral():
    m = corpus_means([Annotation(0, w=3)] * 4)
    assert m.mu_p == m.mu_n == 0


def test_corpus_means_pooled_term_ratio():
    m = corpus_means([Annotation(0, soc=1, w=4), Annotation(0, soc=0, w=6)])
    assert m.mu_soc == pytest.approx(0.1)


def test_tweet_ratio_mode():
    anns = [Annotation(0, soc=1, w=4), Annotation(0, soc=0, w=6), Annotation(0, w=0)]
    assert term_ratio(anns, "soc", "tweet") == pytest.approx(0.25 / 3)
    assert term_ratio(anns, "soc", "pooled") == pytest.approx(0.1)
    with pytest.raises(ValueError):
        term_ratio(anns, "soc", "median")


def test_corpus_means_empty():
    with pytest.raises(DataError):
        corpus_means([])


def test_annotate_corpus_keeps_existing():
    pre = Annotation(-1, 0, 0, 1)
    corpus = Corpus((TweetRecord("a", "u", 1, "feliz"), TweetRecord("b", "u", 2, "feliz", pre)))
    out = annotate_corpus(corpus, SLEX, CLEX)
    assert out["a"].annotation.e == 1
    assert out["b"].annotation == pre
    assert annotate_corpus(corpus, SLEX, CLEX, keep_existing=False)["b"].annotation.e == 1
