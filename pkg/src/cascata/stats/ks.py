"""Two-sample Kolmogorov-Smirnov comparison with pooled-permutation p-values."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import DataError
from ._seeding import chunk_rngs

MIN_SAMPLE = 10
CHUNK = 64
MAX_BUCKETS = 2000


@dataclass(frozen=True)
class KSResult:
    D: float
    p: float
    weighted: bool
    n_perm: int


def _prepare(a, b):
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size < MIN_SAMPLE or b.size < MIN_SAMPLE:
        raise DataError(f"both samples need at least {MIN_SAMPLE} points")
    values, inverse = np.unique(np.concatenate((a, b)), return_inverse=True)
    totals = np.bincount(inverse, minlength=values.size)
    counts_a = np.bincount(inverse[:a.size], minlength=values.size)
    return totals, counts_a


def _weights(pooled_cdf):
    w = np.zeros_like(pooled_cdf)
    inner = (pooled_cdf > 0) & (pooled_cdf < 1)
    w[inner] = 1.0 / np.sqrt(pooled_cdf[inner] * (1.0 - pooled_cdf[inner]))
    return w


def _statistic(counts, n1, cum_totals, weights):
    """KS statistic from per-value counts of group 1 (rows) against the rest."""
    return _max_gap(np.cumsum(counts, axis=-1), n1, cum_totals, weights)


def _max_gap(c1, n1, cum_totals, weights):
    n2 = cum_totals[-1] - n1
    diff = np.abs(c1 / n1 - (cum_totals - c1) / n2)
    if weights is not None:
        diff = diff * weights
    return diff.max(axis=-1)


def ks_two_sample(a, b, weighted: bool = False, n_perm: int = 1000, seed: int = 0,
                  workers: int = 1) -> KSResult:
    """Two-sample KS distance and its permutation p-value.

    The weighted statistic divides each CDF gap by ``sqrt(P (1 - P))`` of
    the pooled CDF ``P``, skipping points where ``P`` is 0 or 1. The p-value
    is the share of ``n_perm`` random relabellings of the pooled sample whose
    statistic is at least the observed one. Swapping ``a`` and ``b`` leaves
    the result unchanged.

    A relabelling only matters through how many members of each distinct
    value land in the first group, so those counts are drawn directly from
    the multivariate hypergeometric distribution.
    """
    totals, counts_a = _prepare(a, b)
    cum_totals = np.cumsum(totals)
    n = int(cum_totals[-1])
    n_a = int(counts_a.sum())
    weights = _weights(cum_totals / n) if weighted else None
    observed = float(_statistic(counts_a, n_a, cum_totals, weights))
    if n_perm <= 0:
        return KSResult(observed, float("nan"), weighted, 0)
    # relabel the smaller group so the result is symmetric in (a, b)
    n_small = min(n_a, n - n_a)
    tol = 1e-12 * max(observed, 1.0)

    few_values = totals.size <= MAX_BUCKETS
    ends = cum_totals - 1
    template = np.zeros(n, dtype=np.int32)
    template[:n_small] = 1

    def run(args):
        rng, size = args
        if few_values:
            counts = rng.multivariate_hypergeometric(totals, n_small, size=size, method="marginals")
            c1 = np.cumsum(counts, axis=1)
        else:
            # many distinct values: shuffle labels and read counts at value boundaries
            labels = rng.permuted(np.broadcast_to(template, (size, n)), axis=1)
            c1 = np.cumsum(labels, axis=1, dtype=np.int32)[:, ends]
        stats = _max_gap(c1, n_small, cum_totals, weights)
        return int(np.count_nonzero(stats >= observed - tol))

    jobs = list(chunk_rngs(seed, n_perm, CHUNK))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            hits = sum(pool.map(run, jobs))
    else:
        hits = sum(map(run, jobs))
    return KSResult(observed, hits / n_perm, weighted, n_perm)
