"""Synthetic follower graphs, corpora and heavy-tailed samples.

Every generator is a pure function of its configuration and seed. Corpora
come with a ground-truth cascade partition kept by an independent,
push-based bookkeeping: each tweet is delivered to its author's followers'
feeds, and a new tweet joins every cascade found in its author's feed that
is eligible under the window rule.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field, fields
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from .corpus import DAY, Annotation, Corpus, TweetRecord
from .errors import DataError
from .lexicon import CategoryLexicon, SentimentLexicon
from .network import FollowerGraph

# 2011-04-25 00:00:00 UTC
DEFAULT_ORIGIN = 1303689600

POSITIVE_WORD, NEGATIVE_WORD = "bien", "mal"
SOCIAL_WORD, COGNITIVE_WORD, FILLER_WORD = "amigos", "pensar", "palabra"


def synth_lexicons():
    """Lexicons that recover the annotations of synthetic texts exactly."""
    return (SentimentLexicon({POSITIVE_WORD: 3, NEGATIVE_WORD: -3}),
            CategoryLexicon(social=["amig*"], cognitive=["pens*"]))


@dataclass(frozen=True)
class SynthConfig:
    n_users: int = 100
    edge_model: str = "uniform"
    edge_prob: float = 0.05
    gamma: float = 2.5
    min_out_degree: int = 1
    reciprocity_target: Optional[float] = None
    n_windows: int = 10
    window_width: int = DAY
    origin: int = DEFAULT_ORIGIN
    tweet_rate: float = 0.1
    seed_windows: Optional[int] = None
    emotion_probs: Tuple[float, float, float] = (0.3, 0.5, 0.2)
    reply_prob: float = 0.1
    same_window: bool = True
    soc_rate: float = 0.1
    cog_rate: float = 0.1
    word_mean: float = 12.0
    with_text: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.n_users < 2:
            raise DataError("n_users must be at least 2")
        if self.edge_model not in ("uniform", "powerlaw"):
            raise DataError(f"unknown edge model {self.edge_model!r}")
        probs = {"edge_prob": self.edge_prob, "reply_prob": self.reply_prob,
                 "soc_rate": self.soc_rate, "cog_rate": self.cog_rate}
        if self.reciprocity_target is not None:
            probs["reciprocity_target"] = self.reciprocity_target
        for name, value in probs.items():
            if not 0.0 <= value <= 1.0:
                raise DataError(f"{name} must lie in [0, 1]")
        ep = tuple(float(p) for p in self.emotion_probs)
        if len(ep) != 3 or min(ep) < 0 or abs(sum(ep) - 1.0) > 1e-9:
            raise DataError("emotion_probs must be three probabilities summing to 1")
        object.__setattr__(self, "emotion_probs", ep)
        if self.gamma <= 1:
            raise DataError("gamma must exceed 1")
        if self.tweet_rate < 0 or self.word_mean < 1 or self.n_windows < 1 or self.window_width <= 0:
            raise DataError("invalid rate, word_mean, n_windows or window_width")

    @classmethod
    def from_mapping(cls, mapping) -> "SynthConfig":
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, value in mapping.items():
            key = key.replace("-", "_")
            if key not in known:
                raise DataError(f"unknown synth option {key!r}")
            if key == "emotion_probs" and isinstance(value, str):
                value = tuple(float(v) for v in value.split(","))
            elif key == "emotion_probs":
                value = tuple(value)
            kwargs[key] = value
        return cls(**kwargs)


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------

_TABLE = 10_000
_X_CAP = float(2**62)


def sample_discrete_power_law(alpha: float, x_min: int, n: int, seed=0) -> np.ndarray:
    """Inverse-transform draws from ``x**-alpha / zeta(alpha, x_min)``, ``x >= x_min``.

    Values up to ``x_min + 10**4`` come from a tabulated survival function;
    larger ones by integer bisection on the Hurwitz-zeta survival function.
    Draws are capped at ``2**62``.
    """
    if alpha <= 1:
        raise DataError("alpha must exceed 1")
    if x_min < 1:
        raise DataError("x_min must be a positive integer")
    rng = np.random.default_rng(seed)
    u = 1.0 - rng.random(n)  # (0, 1]
    z0 = special.zeta(alpha, x_min)
    xs = np.arange(x_min, x_min + _TABLE + 1, dtype=float)
    sf = special.zeta(alpha, xs) / z0  # P(X >= x), decreasing
    # X = largest x with P(X >= x) >= u
    k = np.searchsorted(-sf, -u, side="right") - 1
    out = xs[k]
    big = u < sf[-1]
    if np.any(big):
        ub = u[big]
        lo = np.full(ub.size, xs[-1])
        hi = np.minimum(np.maximum(2.0 * x_min * ub ** (-1.0 / (alpha - 1.0)), lo + 1), _X_CAP)
        while True:
            bad = (special.zeta(alpha, hi) / z0 >= ub) & (hi < _X_CAP)
            if not bad.any():
                break
            hi[bad] = np.minimum(hi[bad] * 2, _X_CAP)
        while np.any(hi - lo > 1):
            mid = np.floor((lo + hi) / 2)
            ok = special.zeta(alpha, mid) / z0 >= ub
            lo = np.where(ok, mid, lo)
            hi = np.where(ok, hi, mid)
        out[big] = lo
    return out.astype(np.int64)


def sample_discrete_lognormal(mu: float, sigma: float, n: int, seed=0, x_min: int = 1) -> np.ndarray:
    """Lognormal draws rounded to the nearest integer, conditioned on ``>= x_min``."""
    rng = np.random.default_rng(seed)
    out = np.empty(0, dtype=np.int64)
    while out.size < n:
        draw = np.rint(np.exp(mu + sigma * rng.standard_normal(2 * (n - out.size) + 16))).astype(np.int64)
        out = np.concatenate((out, draw[draw >= x_min]))
    return out[:n]


# ---------------------------------------------------------------------------
# Graphs
# ---------------------------------------------------------------------------

def _user_ids(n):
    width = len(str(n - 1))
    return [f"u{i:0{width}d}" for i in range(n)]


def _uniform_edges(n, p, rng):
    total = n * (n - 1)
    m = int(rng.binomial(total, p))
    if m == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    k = np.sort(rng.choice(total, size=m, replace=False))
    src = k // (n - 1)
    r = k % (n - 1)
    dst = r + (r >= src)
    return src, dst


def _powerlaw_edges(n, gamma, min_deg, rng):
    seed = int(rng.integers(2**63))
    deg = np.minimum(sample_discrete_power_law(gamma, min_deg, n, seed), n - 1)
    src, dst = [], []
    for v in range(n):
        d = int(deg[v])
        if d == 0:
            continue
        pick = rng.choice(n - 1, size=d, replace=False)
        pick = pick + (pick >= v)
        src.append(np.full(d, v))
        dst.append(pick)
    return np.concatenate(src), np.concatenate(dst)


def _reciprocate(src, dst, n, target, rng):
    keys = src * n + dst
    rev = dst * n + src
    recip = np.isin(rev, keys)
    E, R0 = keys.size, int(recip.sum())
    x = int(round((target * E - R0) / (2.0 - target))) if target < 2 else 0
    lonely = np.flatnonzero(~recip)
    if x < 0 or x > lonely.size:
        raise DataError(f"infeasible reciprocity target {target}: base graph has "
                        f"{R0}/{E} reciprocated edges")
    if x == 0:
        return src, dst
    chosen = np.sort(rng.choice(lonely, size=x, replace=False))
    return np.concatenate((src, dst[chosen])), np.concatenate((dst, src[chosen]))


def gen_graph(cfg: SynthConfig) -> FollowerGraph:
    """Random follower graph; an edge (v, u) means u follows v."""
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 1]))
    n = cfg.n_users
    target = cfg.reciprocity_target
    if cfg.edge_model == "uniform":
        p = cfg.edge_prob
        if target is not None and target < 1:
            # base density so that reciprocation restores roughly edge_prob
            p = p / (1.0 + target / (2.0 - target))
        src, dst = _uniform_edges(n, p, rng)
    else:
        src, dst = _powerlaw_edges(n, cfg.gamma, cfg.min_out_degree, rng)
    if target is not None:
        src, dst = _reciprocate(src, dst, n, target, rng)
    ids = _user_ids(n)
    return FollowerGraph(((ids[a], ids[b]) for a, b in zip(src.tolist(), dst.tolist())), nodes=ids)


def assortative_scores(graph: FollowerGraph, strength: float = 0.8, rounds: int = 50, seed=0) -> np.ndarray:
    """Scores that resemble followee scores, aligned with ``graph.nodes``.

    Solves ``x = strength * M x + noise`` by fixed-point iteration, where
    ``M x`` is the mean score of a user's followees (0 without followees) and
    the noise is drawn once. ``strength`` must lie in ``[0, 1)``.
    """
    if not 0.0 <= strength < 1.0:
        raise DataError("strength must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    n = len(graph)
    ptr, idx = graph.followee_csr
    deg = np.diff(ptr)
    has = deg > 0
    starts = ptr[:-1][has]
    noise = rng.standard_normal(n)
    x = noise.copy()
    for _ in range(rounds):
        means = np.zeros(n)
        if idx.size:
            means[has] = np.add.reduceat(x[idx], starts) / deg[has]
        x = strength * means + noise
    return x


# ---------------------------------------------------------------------------
# Corpora
# ---------------------------------------------------------------------------

class _UnionFind:
    def __init__(self):
        self.parent = []

    def add(self):
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, a):
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass
class SynthCorpus:
    corpus: Corpus
    truth: Dict[str, int]
    parents: Dict[str, str] = field(default_factory=dict)

    def partition(self):
        groups = defaultdict(set)
        for t, c in self.truth.items():
            groups[c].add(t)
        return {frozenset(g) for g in groups.values()}


def _annotation(rng, cfg):
    e = int(rng.choice((1, 0, -1), p=cfg.emotion_probs))
    w = 1 + int(rng.poisson(cfg.word_mean - 1))
    soc = int(rng.binomial(w - 1, cfg.soc_rate)) if w > 1 else 0
    cog = int(rng.binomial(w - 1 - soc, cfg.cog_rate)) if w - 1 - soc > 0 else 0
    return Annotation(e=e, soc=soc, cog=cog, w=w)


def _text(rng, ann):
    words = [SOCIAL_WORD] * ann.soc + [COGNITIVE_WORD] * ann.cog
    if ann.e == 1:
        words.append(POSITIVE_WORD)
    elif ann.e == -1:
        words.append(NEGATIVE_WORD)
    words += [FILLER_WORD] * (ann.w - len(words))
    rng.shuffle(words)
    return " ".join(words)


def gen_corpus(cfg: SynthConfig, graph: FollowerGraph,
               seeds: Optional[Sequence[Tuple[str, int]]] = None) -> SynthCorpus:
    """Annotated corpus with seed posts, next-window replies and ground truth.

    Seed posts are Poisson(``tweet_rate``) per user and window for the first
    ``seed_windows`` windows, or exactly the ``(author, window)`` pairs in
    ``seeds``. Every tweet by ``v`` in window ``w`` makes each follower of
    ``v`` reply in window ``w + 1`` with probability ``reply_prob``.
    """
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 2]))
    n_windows = cfg.n_windows
    width = cfg.window_width
    users = graph.nodes
    seed_windows = n_windows if cfg.seed_windows is None else min(cfg.seed_windows, n_windows)

    planned = defaultdict(list)  # window -> [(author_idx, parent tweet id or None)]
    if seeds is not None:
        for author, w in seeds:
            if author not in graph.index:
                raise DataError(f"unknown seed author {author!r}")
            planned[int(w)].append((graph.index[author], None))
    elif cfg.tweet_rate > 0:
        for w in range(seed_windows):
            counts = rng.poisson(cfg.tweet_rate, len(users))
            for i in np.flatnonzero(counts).tolist():
                planned[w].extend([(i, None)] * int(counts[i]))

    uf = _UnionFind()
    records = []
    parents = {}
    tweet_node = {}
    feeds = defaultdict(list)  # user idx -> [(window, timestamp, uf node)]
    counter = 0
    for w in range(n_windows):
        posts = planned.get(w, [])
        if not posts:
            continue
        start = cfg.origin + w * width
        stamps = rng.integers(start, start + width, size=len(posts))
        order = np.lexsort((np.arange(len(posts)), stamps))
        produced = []
        for j in order.tolist():
            author, parent = posts[j]
            ts = int(stamps[j])
            tid = f"t{counter:08d}"
            counter += 1
            node = uf.add()
            tweet_node[tid] = node
            if parent is not None:
                parents[tid] = parent
            # join every eligible cascade already in the author's feed
            for fw, fts, fnode in feeds[author]:
                if fw == w - 1 or (cfg.same_window and fw == w and fts < ts):
                    uf.union(node, fnode)
            for f in graph.follower_indices(author).tolist():
                feeds[f].append((w, ts, node))
            ann = _annotation(rng, cfg)
            text = _text(rng, ann) if cfg.with_text else None
            records.append(TweetRecord(tid, users[author], ts, text, ann))
            produced.append((author, tid))
        # drop feed items that can no longer link
        for u in list(feeds):
            feeds[u] = [item for item in feeds[u] if item[0] >= w]
        if cfg.reply_prob > 0 and w + 1 < n_windows:
            for author, tid in produced:
                fol = graph.follower_indices(author)
                if fol.size:
                    hits = fol[rng.random(fol.size) < cfg.reply_prob]
                    planned[w + 1].extend((int(u), tid) for u in hits.tolist())

    if not records:
        raise DataError("synthetic corpus is empty; raise tweet_rate or n_windows")
    corpus = Corpus(tuple(records), window_width=width, origin=cfg.origin)
    roots = {}
    truth = {}
    for tw in corpus:
        root = uf.find(tweet_node[tw.tweet_id])
        truth[tw.tweet_id] = roots.setdefault(root, len(roots))
    return SynthCorpus(corpus, truth, parents)


def write_truth(sc: SynthCorpus, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("tweet_id\ttrue_cascade_id\n")
        for tw in sc.corpus:
            fh.write(f"{tw.tweet_id}\t{sc.truth[tw.tweet_id]}\n")
