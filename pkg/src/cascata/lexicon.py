"""Lexicon-driven sentiment and psycholinguistic annotation.

Lexicons are plain TSV files supplied by the user. A sentiment lexicon maps
lemmas to integer strengths in [-5, -1] or [1, 5]; a category lexicon assigns
lemmas to the ``social`` or ``cognitive`` class. A lemma ending in ``*``
matches any token with that prefix; this prefix match stands in for stemming.
Negation and booster words are not handled.
"""
from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .corpus import Annotation, Corpus, TweetRecord
from .errors import DataError

_URL = re.compile(r"(?:https?://|www\.)\S*", re.IGNORECASE)
_MENTION = re.compile(r"(?<!\w)@\w+")
_HASH = re.compile(r"(?<!\w)#(?=\w)")


def _is_edge_char(ch):
    return unicodedata.category(ch)[0] in "PS"


def tokenize(text: str) -> list:
    """Split a message into lowercased NFC tokens.

    URLs and @mentions are dropped, the ``#`` of hashtags is removed (the
    body is kept) and punctuation or symbols are stripped from token edges.

    >>> tokenize("¡Feliz día!")
    ['feliz', 'día']
    >>> tokenize("ver http://x.co @ana #Lunes")
    ['ver', 'lunes']
    """
    if not text:
        return []
    text = unicodedata.normalize("NFC", text).lower()
    text = _URL.sub(" ", text)
    text = _MENTION.sub(" ", text)
    text = _HASH.sub("", text)
    tokens = []
    for raw in text.split():
        start, end = 0, len(raw)
        while start < end and _is_edge_char(raw[start]):
            start += 1
        while end > start and _is_edge_char(raw[end - 1]):
            end -= 1
        if start < end:
            tokens.append(raw[start:end])
    return tokens


def _normalize_lemma(lemma: str) -> str:
    lemma = unicodedata.normalize("NFC", lemma.strip()).lower()
    body = lemma[:-1] if lemma.endswith("*") else lemma
    if not body:
        raise DataError("empty lemma")
    if "*" in body:
        raise DataError(f"wildcard allowed only in final position: {lemma!r}")
    return lemma


class _Matcher:
    """Exact-or-longest-prefix lookup for lemmas with optional trailing '*'."""

    def __init__(self, entries: Mapping[str, object]):
        self.exact = {}
        self.prefix = {}
        for lemma, value in entries.items():
            if lemma.endswith("*"):
                self.prefix[lemma[:-1]] = value
            else:
                self.exact[lemma] = value
        self._max_prefix = max((len(p) for p in self.prefix), default=0)

    def lookup(self, token: str):
        hit = self.exact.get(token)
        if hit is not None:
            return hit
        for n in range(min(len(token), self._max_prefix), 0, -1):
            hit = self.prefix.get(token[:n])
            if hit is not None:
                return hit
        return None


class SentimentLexicon:
    """Lemma -> strength map; strengths are non-zero integers in [-5, 5]."""

    def __init__(self, entries: Mapping[str, int]):
        clean = {}
        for lemma, strength in entries.items():
            lemma = _normalize_lemma(lemma)
            strength = int(strength)
            if strength == 0 or not -5 <= strength <= 5:
                raise DataError(f"strength of {lemma!r} must be in [-5,-1] or [1,5]")
            clean[lemma] = strength
        self.entries = clean
        self._matcher = _Matcher(clean)

    def __len__(self):
        return len(self.entries)

    def strength(self, token: str) -> int:
        hit = self._matcher.lookup(token)
        return 0 if hit is None else hit

    def swapped(self) -> "SentimentLexicon":
        """Lexicon with every strength negated."""
        return SentimentLexicon({k: -v for k, v in self.entries.items()})

    @classmethod
    def from_file(cls, path) -> "SentimentLexicon":
        entries = {}
        for lineno, fields in _read_tsv(path):
            if len(fields) != 2:
                raise DataError(f"{path}:{lineno}: expected lemma<TAB>strength")
            try:
                entries[fields[0]] = int(fields[1])
            except ValueError:
                raise DataError(f"{path}:{lineno}: strength is not an integer") from None
        return cls(entries)


class CategoryLexicon:
    """Social and cognitive lemma sets."""

    def __init__(self, social: Iterable[str] = (), cognitive: Iterable[str] = ()):
        self.social = frozenset(_normalize_lemma(x) for x in social)
        self.cognitive = frozenset(_normalize_lemma(x) for x in cognitive)
        self._social = _Matcher(dict.fromkeys(self.social, True))
        self._cognitive = _Matcher(dict.fromkeys(self.cognitive, True))

    def is_social(self, token: str) -> bool:
        return self._social.lookup(token) is not None

    def is_cognitive(self, token: str) -> bool:
        return self._cognitive.lookup(token) is not None

    @classmethod
    def from_file(cls, path) -> "CategoryLexicon":
        social, cognitive = [], []
        for lineno, fields in _read_tsv(path):
            if len(fields) != 2 or fields[1] not in ("social", "cognitive"):
                raise DataError(f"{path}:{lineno}: expected lemma<TAB>social|cognitive")
            (social if fields[1] == "social" else cognitive).append(fields[0])
        return cls(social, cognitive)


def _read_tsv(path):
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read lexicon {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = [f.strip() for f in line.split("\t")]
        if lineno == 1 and fields[0] == "lemma":
            continue
        yield lineno, fields


def annotate_text(text: str, slex: SentimentLexicon, clex: CategoryLexicon) -> Annotation:
    tokens = tokenize(text)
    pos = neg = soc = cog = 0
    for tok in tokens:
        s = slex.strength(tok)
        if s > pos:
            pos = s
        elif -s > neg:
            neg = -s
        soc += clex.is_social(tok)
        cog += clex.is_cognitive(tok)
    e = (pos > neg) - (pos < neg)
    return Annotation(e=e, soc=soc, cog=cog, w=len(tokens))


def annotate(tweet: TweetRecord, slex: SentimentLexicon, clex: CategoryLexicon) -> Annotation:
    """Annotate one tweet from its text.

    The sentiment is the sign of (strongest positive match - strongest
    negative match); equal strengths give 0.
    """
    if tweet.text is None:
        raise DataError(f"tweet {tweet.tweet_id!r} is unannotatable: no text")
    return annotate_text(tweet.text, slex, clex)


def annotate_corpus(corpus: Corpus, slex: SentimentLexicon, clex: CategoryLexicon,
                    keep_existing: bool = True) -> Corpus:
    """Return a corpus in which every tweet carries an annotation.

    Pre-annotated tweets are left untouched when ``keep_existing`` is set.
    """
    out = []
    for tw in corpus:
        if tw.annotation is not None and (keep_existing or tw.text is None):
            out.append(tw)
        else:
            out.append(TweetRecord(tw.tweet_id, tw.author_id, tw.timestamp, tw.text,
                                   annotate(tw, slex, clex)))
    return corpus.with_tweets(out)


@dataclass(frozen=True)
class CorpusMeans:
    mu_p: float
    mu_n: float
    mu_soc: float
    mu_cog: float


def term_ratio(annotations, attr: str, ratio_mode: str = "pooled") -> float:
    """Social or cognitive term ratio of a set of annotations.

    ``pooled`` divides summed term counts by summed word counts;
    ``tweet`` averages per-tweet ratios, counting zero-word tweets as 0.
    """
    annotations = list(annotations)
    if ratio_mode == "pooled":
        words = sum(a.w for a in annotations)
        return sum(getattr(a, attr) for a in annotations) / words if words else 0.0
    if ratio_mode == "tweet":
        if not annotations:
            return 0.0
        return sum(getattr(a, attr) / a.w for a in annotations if a.w) / len(annotations)
    raise ValueError(f"unknown ratio mode {ratio_mode!r}")


def corpus_means(corpus, ratio_mode: str = "pooled") -> CorpusMeans:
    """Global positive/negative tweet shares and social/cognitive term ratios.

    ``corpus`` is a :class:`Corpus` or an iterable of annotations.
    """
    annotations = list(corpus.annotations().values()) if isinstance(corpus, Corpus) else list(corpus)
    if not annotations:
        raise DataError("cannot compute means of an empty corpus")
    n = len(annotations)
    return CorpusMeans(
        mu_p=sum(a.e == 1 for a in annotations) / n,
        mu_n=sum(a.e == -1 for a in annotations) / n,
        mu_soc=term_ratio(annotations, "soc", ratio_mode),
        mu_cog=term_ratio(annotations, "cog", ratio_mode),
    )
