"""Per-user features, engagement regressions and neighbourhood correlations."""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import astuple, dataclass, fields
from typing import Dict, Mapping, Optional

import numpy as np

from .corpus import Corpus
from .errors import DataError
from .lexicon import term_ratio
from .network import FollowerGraph
from .stats.nulls import Neighborhood, permutation_null
from .stats.regression import RegressionResult, ols, pearson

logger = logging.getLogger(__name__)

METRICS = ("pos", "neg", "neu", "soc", "cog")
ACTIVITY_REGRESSORS = ("k_c", "k_in", "k_out", "pos", "neg", "soc", "cog")
INTEGRATION_REGRESSORS = ("n", "k_in", "k_out", "pos", "neg", "soc", "cog")
FEATURE_COLUMNS = ("user", "n", "k_c", "k_in", "k_out", "pos", "neg", "neu", "soc", "cog")


@dataclass(frozen=True)
class UserFeatures:
    n: int
    k_c: int
    k_in: int
    k_out: int
    pos: float
    neg: float
    neu: float
    soc: float
    cog: float


def user_features(corpus: Corpus, graph: FollowerGraph, cores: Mapping[str, int],
                  ratio_mode: str = "pooled") -> Dict[str, UserFeatures]:
    """One feature record per user in the corpus or the graph, sorted by id.

    Users absent from the graph get zero degrees and coreness; users without
    tweets get ``n = 0`` and zero ratios.
    """
    by_user = defaultdict(list)
    for tw in corpus:
        if tw.annotation is None:
            raise DataError(f"tweet {tw.tweet_id!r} is not annotated")
        by_user[tw.author_id].append(tw.annotation)
    out = {}
    for user in sorted(set(by_user) | set(graph.nodes)):
        anns = by_user.get(user, [])
        k_in, k_out = graph.degrees(user) if user in graph else (0, 0)
        n = len(anns)
        if n:
            pos = sum(a.e == 1 for a in anns) / n
            neg = sum(a.e == -1 for a in anns) / n
            neu = sum(a.e == 0 for a in anns) / n
        else:
            pos = neg = neu = 0.0
        out[user] = UserFeatures(
            n=n, k_c=int(cores.get(user, 0)), k_in=k_in, k_out=k_out, pos=pos, neg=neg, neu=neu,
            soc=term_ratio(anns, "soc", ratio_mode), cog=term_ratio(anns, "cog", ratio_mode))
    return out


def _active(features, min_tweets):
    return {u: f for u, f in features.items() if f.n >= min_tweets}


def engagement_regressions(features: Mapping[str, UserFeatures], min_tweets: int = 1,
                           min_users: int = 50):
    """Regress activity ``n`` and coreness ``k_c`` on the other features.

    All variables are z-scored. Users with fewer than ``min_tweets`` tweets
    are excluded. Returns ``(activity, integration)`` results.
    """
    active = _active(features, min_tweets)
    if len(active) < min_users:
        raise DataError(f"need at least {min_users} active users, have {len(active)}")
    table = {name: np.array([getattr(f, name) for f in active.values()], dtype=float)
             for name in ("n",) + ACTIVITY_REGRESSORS}

    def fit(target, regressors):
        X = np.column_stack([table[r] for r in regressors])
        return ols(table[target], X, zscore_vars=True, names=regressors)

    return fit("n", ACTIVITY_REGRESSORS), fit("k_c", INTEGRATION_REGRESSORS)


@dataclass(frozen=True)
class NeighborhoodResult:
    metric: str
    r: float
    null_mean: float
    null_2sd: float
    n_users: int
    n_skipped: int = 0

    @property
    def exceeds_null(self) -> bool:
        return self.r > self.null_mean + self.null_2sd


def build_neighborhood(features: Mapping[str, UserFeatures], graph: FollowerGraph,
                       weighting: str = "user", min_tweets: int = 1):
    """Followee structure restricted to active users.

    Returns ``(active_users, neighborhood)``; scores are indexed by position
    in ``active_users``. ``weighting="tweet"`` weights each followee by its
    tweet count instead of equally.
    """
    if weighting not in ("user", "tweet"):
        raise ValueError(f"unknown weighting {weighting!r}")
    active = [u for u, f in features.items() if f.n >= min_tweets]
    pos = {u: i for i, u in enumerate(active)}
    focal, ptr, nbrs, weights = [], [0], [], []
    for u in active:
        if u not in graph.index:
            continue
        fol = [pos[graph.nodes[j]] for j in graph.followee_indices(graph.index[u]).tolist()
               if graph.nodes[j] in pos]
        if not fol:
            continue
        focal.append(pos[u])
        nbrs.extend(fol)
        weights.extend(features[active[j]].n for j in fol)
        ptr.append(len(nbrs))
    nb = Neighborhood(size=len(active), focal=np.array(focal, dtype=np.int64),
                      ptr=np.array(ptr, dtype=np.int64), neighbors=np.array(nbrs, dtype=np.int64),
                      weights=np.array(weights, dtype=float) if weighting == "tweet" else None)
    return active, nb


def neighborhood_correlation(features: Mapping[str, UserFeatures], graph: FollowerGraph, metric: str,
                             n_shuffles: int = 1000, seed: int = 0, weighting: str = "user",
                             min_users: int = 50, workers: int = 1,
                             neighborhood=None) -> NeighborhoodResult:
    """Pearson r between a user's metric and the mean over its active followees.

    Significance is judged against ``n_shuffles`` permutations of the metric
    across active users on the same topology. A prebuilt
    ``(active_users, neighborhood)`` pair may be passed to skip rebuilding it.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")
    active, nb = neighborhood or build_neighborhood(features, graph, weighting)
    if nb.focal.size == 0:
        raise DataError("no user follows an active user")
    if nb.focal.size < min_users:
        raise DataError(f"need at least {min_users} eligible users, have {nb.focal.size}")
    scores = np.array([getattr(features[u], metric) for u in active], dtype=float)
    r = pearson(scores[nb.focal], nb.means(scores))
    null = permutation_null(scores, nb, n=n_shuffles, seed=seed, workers=workers)
    return NeighborhoodResult(metric, r, null.mean, null.two_sd, int(nb.focal.size), null.n_skipped)


def write_features(features: Mapping[str, UserFeatures], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(FEATURE_COLUMNS) + "\n")
        for user, f in features.items():
            vals = [user] + [repr(v) if isinstance(v, float) else str(v) for v in astuple(f)]
            fh.write("\t".join(vals) + "\n")


def read_features(path) -> Dict[str, UserFeatures]:
    out = {}
    types = {f.name: (int if f.type in ("int", int) else float) for f in fields(UserFeatures)}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if tuple(header) != FEATURE_COLUMNS:
            raise DataError(f"{path}: unexpected feature header")
        for line in fh:
            vals = line.rstrip("\n").split("\t")
            out[vals[0]] = UserFeatures(**{k: types[k](v) for k, v in zip(header[1:], vals[1:])})
    return out
