"""Message stream ingestion and time windowing.

A corpus is an immutable, time-sorted sequence of :class:`TweetRecord`
objects together with the parameters of the window partition used by
cascade detection. Two input formats are accepted: JSONL (one object per
line) and TSV (header row). Both carry the columns ``tweet_id``,
``author_id``, ``timestamp`` and optionally ``text`` and the four annotation
columns ``e``, ``soc``, ``cog``, ``w``.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Optional, Sequence, Union

from .errors import DataError

logger = logging.getLogger(__name__)

DAY = 86400
REQUIRED_FIELDS = ("tweet_id", "author_id", "timestamp")
ANNOTATION_FIELDS = ("e", "soc", "cog", "w")
COLUMNS = REQUIRED_FIELDS + ("text",) + ANNOTATION_FIELDS


@dataclass(frozen=True)
class Annotation:
    """Per-message sentiment and term counts.

    ``e`` is the sentiment trichotomy (-1, 0, 1), ``soc`` and ``cog`` count
    social and cognitive terms and ``w`` is the word count.
    """

    e: int
    soc: int = 0
    cog: int = 0
    w: int = 0

    def __post_init__(self):
        if self.e not in (-1, 0, 1):
            raise DataError(f"sentiment must be -1, 0 or 1, got {self.e!r}")
        if self.w < 0 or self.soc < 0 or self.cog < 0:
            raise DataError("term counts must be non-negative")
        if self.soc > self.w or self.cog > self.w:
            raise DataError(f"term counts exceed word count: {self}")


@dataclass(frozen=True)
class TweetRecord:
    tweet_id: str
    author_id: str
    timestamp: int
    text: Optional[str] = None
    annotation: Optional[Annotation] = None

    def __post_init__(self):
        if self.text is None and self.annotation is None:
            raise DataError(f"tweet {self.tweet_id!r} has neither text nor annotation")

    @property
    def sort_key(self):
        return (self.timestamp, self.tweet_id)


def midnight_utc(timestamp: int) -> int:
    """Truncate an epoch timestamp to 00:00:00 UTC of its day."""
    return timestamp - timestamp % DAY


@dataclass(frozen=True)
class Corpus:
    """Time-sorted, validated collection of tweets.

    Parameters
    ----------
    tweets : sequence of TweetRecord
        Sorted on construction by ``(timestamp, tweet_id)``.
    window_width : int
        Window width in seconds.
    origin : int, str or None
        Epoch seconds anchoring window 0. ``None`` or ``"midnight"`` uses the
        UTC midnight preceding the earliest tweet; ``"first"`` uses the
        earliest timestamp itself.
    t_start, t_end : int, optional
        Declared collection interval; every timestamp must fall inside it.
    """

    tweets: tuple
    window_width: int = DAY
    origin: Union[int, str, None] = None
    t_start: Optional[int] = None
    t_end: Optional[int] = None
    skipped: int = 0
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.window_width <= 0:
            raise DataError("window_width must be positive")
        tweets = tuple(sorted(self.tweets, key=lambda t: t.sort_key))
        index = {}
        for pos, tw in enumerate(tweets):
            if tw.tweet_id in index:
                raise DataError(f"duplicate tweet_id {tw.tweet_id!r}")
            index[tw.tweet_id] = pos
            if self.t_start is not None and tw.timestamp < self.t_start:
                raise DataError(f"tweet {tw.tweet_id!r} precedes t_start")
            if self.t_end is not None and tw.timestamp > self.t_end:
                raise DataError(f"tweet {tw.tweet_id!r} follows t_end")
        object.__setattr__(self, "tweets", tweets)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "origin", self._resolve_origin(self.origin, tweets))

    @staticmethod
    def _resolve_origin(origin, tweets):
        if isinstance(origin, bool):
            raise DataError("origin must be an integer or 'midnight'/'first'")
        if isinstance(origin, int):
            return origin
        if not tweets:
            return 0
        first = tweets[0].timestamp
        if origin in (None, "midnight"):
            return midnight_utc(first)
        if origin == "first":
            return first
        raise DataError(f"unknown origin {origin!r}")

    def __len__(self):
        return len(self.tweets)

    def __iter__(self) -> Iterator[TweetRecord]:
        return iter(self.tweets)

    def __getitem__(self, tweet_id: str) -> TweetRecord:
        try:
            return self.tweets[self._index[tweet_id]]
        except KeyError:
            raise KeyError(f"unknown tweet {tweet_id!r}") from None

    def __contains__(self, tweet_id):
        return tweet_id in self._index

    def position(self, tweet_id: str) -> int:
        return self._index[tweet_id]

    @property
    def authors(self):
        return sorted({t.author_id for t in self.tweets})

    def window_of(self, tweet: TweetRecord) -> int:
        return window_index(tweet.timestamp, self)

    def annotations(self) -> dict:
        """Map tweet_id -> Annotation; raises if any tweet is unannotated."""
        out = {}
        for tw in self.tweets:
            if tw.annotation is None:
                raise DataError(f"tweet {tw.tweet_id!r} is not annotated")
            out[tw.tweet_id] = tw.annotation
        return out

    @property
    def is_annotated(self):
        return all(t.annotation is not None for t in self.tweets)

    def with_tweets(self, tweets: Iterable[TweetRecord]) -> "Corpus":
        """Copy of this corpus with a replaced tweet set and identical windowing."""
        return Corpus(tuple(tweets), window_width=self.window_width, origin=self.origin,
                      t_start=self.t_start, t_end=self.t_end, skipped=self.skipped)


def window_index(timestamp: int, corpus: Corpus) -> int:
    """Index of the half-open window ``[k*w, (k+1)*w)`` containing ``timestamp``.

    Negative for timestamps before the corpus origin.
    """
    return (timestamp - corpus.origin) // corpus.window_width


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------

def _as_int(value, name):
    if type(value) is int:
        return value
    if isinstance(value, bool):
        raise ValueError(f"{name} is boolean")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"{name} is not an integer")
        return int(value)
    if isinstance(value, str):
        return int(value.strip())
    raise ValueError(f"{name} has type {type(value).__name__}")


def _record_from_fields(row: dict, blank_text_missing: bool = False) -> TweetRecord:
    get = row.get
    tweet_id, author_id, timestamp = get("tweet_id"), get("author_id"), get("timestamp")
    for name, value in (("tweet_id", tweet_id), ("author_id", author_id), ("timestamp", timestamp)):
        if value is None or value == "":
            raise ValueError(f"missing {name}")
    e, soc, cog, w = get("e"), get("soc"), get("cog"), get("w")
    n_present = sum(v is not None and v != "" for v in (e, soc, cog, w))
    annotation = None
    if n_present == 4:
        annotation = Annotation(e=_as_int(e, "e"), soc=_as_int(soc, "soc"),
                                cog=_as_int(cog, "cog"), w=_as_int(w, "w"))
    elif n_present:
        raise ValueError("partial annotation")
    text = get("text")
    # an empty TSV cell means "no text"; JSON can say so explicitly with null
    if blank_text_missing and text == "" and annotation is not None:
        text = None
    return TweetRecord(str(tweet_id), str(author_id), _as_int(timestamp, "timestamp"), text, annotation)


def _iter_jsonl(text_stream):
    for lineno, line in enumerate(text_stream, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict):
                raise ValueError("not an object")
        except ValueError as exc:
            yield lineno, None, exc
            continue
        yield lineno, obj, None


def _iter_tsv(text_stream):
    reader = csv.DictReader(text_stream, delimiter="\t", quoting=csv.QUOTE_NONE)
    if reader.fieldnames is None:
        return
    missing = [c for c in REQUIRED_FIELDS if c not in reader.fieldnames]
    if missing:
        raise DataError(f"TSV header lacks required columns: {', '.join(missing)}")
    for row in reader:
        if None in row:
            yield reader.line_num, None, ValueError("too many fields")
            continue
        yield reader.line_num, row, None


def parse_stream(source: Union[bytes, str, IO], format: str = "jsonl", *,
                 window_width: int = DAY, origin=None,
                 t_start: Optional[int] = None, t_end: Optional[int] = None) -> Corpus:
    """Parse a JSONL or TSV message stream into a :class:`Corpus`.

    Malformed lines are skipped and counted in ``Corpus.skipped``. A source
    yielding no valid line raises :class:`DataError` ("empty corpus").
    Records outside ``[t_start, t_end]`` are skipped like malformed lines.
    """
    if format not in ("jsonl", "tsv"):
        raise DataError(f"unknown corpus format {format!r}")
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DataError(f"corpus is not valid UTF-8: {exc}") from exc
    if isinstance(source, str):
        stream = io.StringIO(source, newline="")
    elif isinstance(source, io.TextIOBase):
        stream = source
    else:
        stream = io.TextIOWrapper(source, encoding="utf-8", newline="")

    rows = _iter_jsonl(stream) if format == "jsonl" else _iter_tsv(stream)
    tweets = []
    skipped = 0
    try:
        for lineno, row, err in rows:
            if err is None:
                try:
                    tw = _record_from_fields(row, blank_text_missing=format == "tsv")
                    if t_start is not None and tw.timestamp < t_start:
                        raise ValueError("timestamp before t_start")
                    if t_end is not None and tw.timestamp > t_end:
                        raise ValueError("timestamp after t_end")
                    tweets.append(tw)
                    continue
                except (ValueError, TypeError) as exc:
                    err = exc
            skipped += 1
            logger.debug("line %d skipped: %s", lineno, err)
    except UnicodeDecodeError as exc:
        raise DataError(f"corpus is not valid UTF-8: {exc}") from exc
    if skipped:
        logger.warning("skipped %d malformed corpus lines", skipped)
    if not tweets:
        raise DataError("empty corpus")
    return Corpus(tuple(tweets), window_width=window_width, origin=origin,
                  t_start=t_start, t_end=t_end, skipped=skipped)


def read_corpus(path, format: Optional[str] = None, **kwargs) -> Corpus:
    """Read a corpus file; the format defaults to the file extension."""
    path = str(path)
    if format is None:
        format = "tsv" if path.endswith((".tsv", ".txt")) else "jsonl"
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read corpus {path}: {exc}") from exc
    return parse_stream(data, format, **kwargs)


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------

def _record_fields(tw: TweetRecord) -> dict:
    row = {"tweet_id": tw.tweet_id, "author_id": tw.author_id, "timestamp": tw.timestamp}
    if tw.text is not None:
        row["text"] = tw.text
    if tw.annotation is not None:
        a = tw.annotation
        row.update(e=a.e, soc=a.soc, cog=a.cog, w=a.w)
    return row


def to_jsonl(tweets: Iterable[TweetRecord]) -> str:
    """Canonical JSONL: fixed key order, no whitespace, raw UTF-8, LF endings."""
    lines = [json.dumps(_record_fields(tw), ensure_ascii=False, separators=(",", ":"))
             for tw in tweets]
    return "".join(line + "\n" for line in lines)


def to_tsv(tweets: Sequence[TweetRecord]) -> str:
    out = ["\t".join(COLUMNS)]
    for tw in tweets:
        row = _record_fields(tw)
        if "\t" in (tw.text or "") or "\n" in (tw.text or ""):
            raise DataError(f"tweet {tw.tweet_id!r} text cannot be written as TSV")
        out.append("\t".join(str(row.get(c, "")) for c in COLUMNS))
    return "\n".join(out) + "\n"


def write_corpus(corpus: Corpus, path, format: Optional[str] = None) -> None:
    path = str(path)
    if format is None:
        format = "tsv" if path.endswith(".tsv") else "jsonl"
    text = to_tsv(corpus.tweets) if format == "tsv" else to_jsonl(corpus.tweets)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
