"""Collective sentiment and content labels for cascades."""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .cascade import Cascade
from .errors import DataError
from .lexicon import CorpusMeans, term_ratio


class SentimentLabel(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"
    BIPOLAR = "bipolar"


class Level(str, enum.Enum):
    HIGH = "high"
    LOW = "low"


@dataclass(frozen=True)
class ContentLabel:
    social: Level
    cognitive: Level


@dataclass(frozen=True)
class CascadeRatios:
    r_p: float
    r_u: float
    r_n: float
    soc_ratio: float
    cog_ratio: float
    N: int


def cascade_ratios(cascade, annotations: Mapping, ratio_mode: str = "pooled") -> CascadeRatios:
    """Shares of positive, neutral and negative tweets plus term ratios.

    ``cascade`` is a :class:`Cascade` or a sequence of tweet ids.
    """
    ids = cascade.tweet_ids if isinstance(cascade, Cascade) else tuple(cascade)
    if not ids:
        raise DataError("cascade has no tweets")
    try:
        anns = [annotations[t] for t in ids]
    except KeyError as exc:
        raise DataError(f"tweet {exc.args[0]!r} is not annotated") from None
    if any(a is None for a in anns):
        raise DataError("cascade contains an unannotated tweet")
    n = len(anns)
    counts = Counter(a.e for a in anns)
    return CascadeRatios(
        r_p=counts[1] / n,
        r_u=counts[0] / n,
        r_n=counts[-1] / n,
        soc_ratio=term_ratio(anns, "soc", ratio_mode),
        cog_ratio=term_ratio(anns, "cog", ratio_mode),
        N=n,
    )


def label_sentiment(r: CascadeRatios, m: CorpusMeans) -> SentimentLabel:
    """Compare cascade shares against corpus means; equality counts as not above."""
    above_p = r.r_p > m.mu_p
    above_n = r.r_n > m.mu_n
    if above_p and above_n:
        return SentimentLabel.BIPOLAR
    if above_p:
        return SentimentLabel.POSITIVE
    if above_n:
        return SentimentLabel.NEGATIVE
    return SentimentLabel.NEUTRAL


def label_content(r: CascadeRatios, m: CorpusMeans) -> ContentLabel:
    return ContentLabel(
        social=Level.HIGH if r.soc_ratio > m.mu_soc else Level.LOW,
        cognitive=Level.HIGH if r.cog_ratio > m.mu_cog else Level.LOW,
    )


@dataclass(frozen=True)
class CascadeLabels:
    sentiment: SentimentLabel
    content: ContentLabel

    def as_row(self):
        return (self.sentiment.value, self.content.social.value, self.content.cognitive.value)


def classify_cascades(cascades: Sequence[Cascade], annotations: Mapping, means: CorpusMeans,
                      ratio_mode: str = "pooled") -> dict:
    """Label every cascade; returns cascade_id -> :class:`CascadeLabels`."""
    out = {}
    for c in cascades:
        r = cascade_ratios(c, annotations, ratio_mode)
        out[c.cascade_id] = CascadeLabels(label_sentiment(r, means), label_content(r, means))
    return out


def label_counts(labels: Iterable[SentimentLabel]) -> dict:
    """Count per sentiment label, with every label present."""
    counts = Counter(SentimentLabel(x) for x in labels)
    return {lab: counts.get(lab, 0) for lab in SentimentLabel}


def format_share(count: int, total: int, digits: int = 2) -> str:
    """Percentage string as reported in summaries, e.g. ``45.19%``."""
    if total <= 0:
        raise ValueError("total must be positive")
    return f"{100.0 * count / total:.{digits}f}%"


def label_summary(labels: Iterable[SentimentLabel]) -> list:
    """Rows ``(label, count, share)`` for the four sentiment classes."""
    counts = label_counts(labels)
    total = sum(counts.values())
    return [(lab.value, n, format_share(n, total) if total else "0.00%") for lab, n in counts.items()]
