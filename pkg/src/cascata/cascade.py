"""Time-constrained cascade detection.

A tweet ``m2`` by user ``u`` is linked to an earlier tweet ``m1`` by user
``v`` when ``u`` follows ``v``, ``m2`` is strictly later than ``m1`` and
``m2`` falls in the same window as ``m1`` (if same-window links are enabled)
or in the next one. Cascades are the weakly connected components of the
resulting tweet graph. Tweet content is never compared.
"""
from __future__ import annotations

import csv
from bisect import bisect_left
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .corpus import Corpus, window_index
from .errors import DataError
from .network import FollowerGraph

REPORT_COLUMNS = ("cascade_id", "seed_tweet", "n_tweets", "n_sp", "n_c")
LABEL_COLUMNS = ("sentiment", "social", "cognitive")


@dataclass(frozen=True)
class Cascade:
    cascade_id: int
    tweet_ids: tuple
    spreaders: frozenset
    n_c: int = 0

    @property
    def seed_tweet(self) -> str:
        return self.tweet_ids[0]

    @property
    def n_sp(self) -> int:
        return len(self.spreaders)

    @property
    def n_tweets(self) -> int:
        return len(self.tweet_ids)


def exposure(spreaders: Iterable[str], graph: FollowerGraph, include_spreaders: bool = True) -> int:
    """Number of distinct users following at least one spreader.

    Spreaders that follow another spreader are counted unless
    ``include_spreaders`` is false. Users absent from the graph have no
    followers.
    """
    if isinstance(spreaders, Cascade):
        spreaders = spreaders.spreaders
    spreaders = [s for s in spreaders if s in graph.index]
    if not spreaders:
        return 0
    idx = [graph.index[s] for s in spreaders]
    if len(idx) == 1:
        listeners = graph.follower_indices(idx[0])
    else:
        listeners = np.unique(np.concatenate([graph.follower_indices(i) for i in idx]))
    if not include_spreaders:
        listeners = np.setdiff1d(listeners, idx, assume_unique=False)
    return int(listeners.size)


def propagation_links(corpus: Corpus, graph: FollowerGraph, same_window: bool = True):
    """Yield ``(i, j)`` pairs of corpus positions that lie in one cascade.

    The pairs are a spanning subset of the propagation links: every full
    link is implied through transitivity, which keeps the output linear in
    the number of tweets per followee and window.
    """
    tweets = corpus.tweets
    groups: Dict[tuple, list] = defaultdict(list)
    stamps: Dict[tuple, list] = defaultdict(list)
    windows = []
    for pos, tw in enumerate(tweets):
        w = window_index(tw.timestamp, corpus)
        windows.append(w)
        groups[(tw.author_id, w)].append(pos)
        stamps[(tw.author_id, w)].append(tw.timestamp)
    # members [0, merged[key]) of a group are already chained together
    merged: Dict[tuple, int] = defaultdict(lambda: 1)

    def chain(key, upto):
        members = groups[key]
        done = merged[key]
        for k in range(done, upto):
            yield members[0], members[k]
        if upto > done:
            merged[key] = upto

    for pos, tw in enumerate(tweets):
        i = graph.index.get(tw.author_id)
        if i is None:
            continue
        w = windows[pos]
        for f in graph.followee_indices(i).tolist():
            author = graph.nodes[f]
            prev = groups.get((author, w - 1))
            if prev:
                yield from chain((author, w - 1), len(prev))
                yield prev[0], pos
            if same_window:
                cur = groups.get((author, w))
                if cur:
                    n_before = bisect_left(stamps[(author, w)], tw.timestamp)
                    if n_before:
                        yield from chain((author, w), n_before)
                        yield cur[0], pos


def detect_cascades(corpus: Corpus, graph: FollowerGraph, same_window: bool = True,
                    include_spreaders: bool = True) -> List[Cascade]:
    """Partition the corpus into cascades.

    Cascade ids are assigned in order of the seed tweet's
    ``(timestamp, tweet_id)``; tweets within a cascade are time ordered.
    Each cascade carries its exposure ``n_c``.
    """
    n = len(corpus)
    links = list(propagation_links(corpus, graph, same_window))
    if links:
        a, b = np.array(links, dtype=np.int64).T
    else:
        a = b = np.empty(0, dtype=np.int64)
    adj = coo_matrix((np.ones(a.size, dtype=np.int8), (a, b)), shape=(n, n))
    _, labels = connected_components(adj, directed=True, connection="weak")
    # relabel components by first appearance in corpus order (= seed order)
    _, first = np.unique(labels, return_index=True)
    rank = np.argsort(np.argsort(first))
    members = defaultdict(list)
    for pos, comp in enumerate(labels.tolist()):
        members[comp].append(pos)
    tweets = corpus.tweets
    out = [None] * len(members)
    for comp, positions in members.items():
        ids = tuple(tweets[p].tweet_id for p in positions)
        spreaders = frozenset(tweets[p].author_id for p in positions)
        cid = int(rank[comp])
        out[cid] = Cascade(cid, ids, spreaders, exposure(spreaders, graph, include_spreaders))
    return out


def membership(cascades: Iterable[Cascade]) -> dict:
    """Map tweet_id -> cascade_id."""
    return {t: c.cascade_id for c in cascades for t in c.tweet_ids}


def seed_sentiment_group(cascades: Sequence[Cascade], annotations: Mapping) -> dict:
    """Group cascades by the sentiment of their seed tweet."""
    groups = {1: [], 0: [], -1: []}
    for c in cascades:
        groups[annotations[c.seed_tweet].e].append(c)
    return groups


# --------------------------------------------------------------------------
# Reports
# --------------------------------------------------------------------------

def write_cascade_report(cascades: Sequence[Cascade], path, labels: Optional[Mapping] = None) -> None:
    """Write the cascade TSV; ``labels`` maps cascade_id -> (sentiment, social, cognitive)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(REPORT_COLUMNS + LABEL_COLUMNS) + "\n")
        for c in cascades:
            lab = labels.get(c.cascade_id, ("", "", "")) if labels else ("", "", "")
            row = (c.cascade_id, c.seed_tweet, c.n_tweets, c.n_sp, c.n_c) + tuple(lab)
            fh.write("\t".join(str(x) for x in row) + "\n")


def read_cascade_report(path) -> List[dict]:
    """Rows of a cascade report; numeric columns are converted to int."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)
            rows = list(reader)
            fields = reader.fieldnames or []
    except OSError as exc:
        raise DataError(f"cannot read cascade report {path}: {exc}") from exc
    missing = [c for c in REPORT_COLUMNS if c not in fields]
    if missing:
        raise DataError(f"cascade report lacks columns: {', '.join(missing)}")
    for row in rows:
        for col in ("cascade_id", "n_tweets", "n_sp", "n_c"):
            row[col] = int(row[col])
    return rows


def write_membership(cascades: Sequence[Cascade], path) -> None:
    """Sidecar TSV (tweet_id, cascade_id) in cascade order."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("tweet_id\tcascade_id\n")
        for c in cascades:
            for t in c.tweet_ids:
                fh.write(f"{t}\t{c.cascade_id}\n")


def read_membership(path) -> dict:
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n").split("\t")
            if header[:2] != ["tweet_id", "cascade_id"] and header[:2] != ["tweet_id", "true_cascade_id"]:
                raise DataError(f"{path}: unexpected header {header}")
            for line in fh:
                if line.strip():
                    t, c = line.rstrip("\n").split("\t")[:2]
                    out[t] = int(c)
    except OSError as exc:
        raise DataError(f"cannot read membership {path}: {exc}") from exc
    return out


def cascades_from_membership(corpus: Corpus, member_of: Mapping[str, int], graph: Optional[FollowerGraph] = None,
                             n_c: Optional[Mapping[int, int]] = None,
                             include_spreaders: bool = True) -> List[Cascade]:
    """Rebuild cascades from a tweet -> cascade id map over a corpus."""
    groups = defaultdict(list)
    for tw in corpus:
        if tw.tweet_id not in member_of:
            raise DataError(f"tweet {tw.tweet_id!r} missing from cascade membership")
        groups[member_of[tw.tweet_id]].append(tw)
    out = []
    for cid in sorted(groups):
        tws = groups[cid]
        spreaders = frozenset(t.author_id for t in tws)
        if n_c is not None:
            exp = n_c[cid]
        elif graph is not None:
            exp = exposure(spreaders, graph, include_spreaders)
        else:
            exp = 0
        out.append(Cascade(cid, tuple(t.tweet_id for t in tws), spreaders, exp))
    return out
