"""Shuffle nulls for neighbourhood correlations on a fixed topology."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DataError
from ._seeding import chunk_rngs

CHUNK = 50


@dataclass(frozen=True)
class Neighborhood:
    """Fixed neighbour structure over a score vector of length ``size``.

    ``focal[i]`` is the score index of the i-th eligible user and its
    neighbours are ``neighbors[ptr[i]:ptr[i+1]]`` (never empty), averaged
    with ``weights`` (all ones for a plain mean).
    """

    size: int
    focal: np.ndarray
    ptr: np.ndarray
    neighbors: np.ndarray
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        if np.any(np.diff(self.ptr) <= 0):
            raise DataError("every focal user needs at least one neighbour")

    def means(self, scores):
        """Neighbour means for one score vector or a stack of them (last axis)."""
        scores = np.asarray(scores, dtype=float)
        vals = scores[..., self.neighbors]
        starts = self.ptr[:-1]
        if self.weights is None:
            return np.add.reduceat(vals, starts, axis=-1) / np.diff(self.ptr)
        wsum = np.add.reduceat(self.weights, starts)
        return np.add.reduceat(vals * self.weights, starts, axis=-1) / wsum


def _rowwise_pearson(x, y):
    dx = x - x.mean(axis=-1, keepdims=True)
    dy = y - y.mean(axis=-1, keepdims=True)
    sxx = np.einsum("ij,ij->i", dx, dx)
    syy = np.einsum("ij,ij->i", dy, dy)
    sxy = np.einsum("ij,ij->i", dx, dy)
    ok = (sxx > 0) & (syy > 0)
    r = np.full(x.shape[0], np.nan)
    r[ok] = sxy[ok] / np.sqrt(sxx[ok] * syy[ok])
    return np.clip(r, -1.0, 1.0), ok


@dataclass(frozen=True)
class NullResult:
    mean: float
    two_sd: float
    n_valid: int
    n_skipped: int
    values: np.ndarray

    def __iter__(self):
        return iter((self.mean, self.two_sd))


def permutation_null(scores, neighborhood: Neighborhood, n: int = 1000, seed: int = 0,
                     workers: int = 1) -> NullResult:
    """Null distribution of the neighbourhood Pearson r under score shuffling.

    Each iteration permutes ``scores`` across all users, recomputes the
    neighbour means on the unchanged topology and records the correlation.
    Iterations with zero variance are skipped and counted.

    Returns the null mean and twice its standard deviation (iterable as
    ``(null_mean, null_2sd)``).
    """
    if n < 100:
        raise DataError("permutation null needs at least 100 iterations")
    scores = np.asarray(scores, dtype=float)
    if scores.size != neighborhood.size:
        raise DataError("score vector does not match the neighbourhood")
    reference = np.sort(scores)

    def run(args):
        rng, size = args
        perm = rng.permuted(np.broadcast_to(scores, (size, scores.size)), axis=1)
        assert np.array_equal(np.sort(perm, axis=1), np.broadcast_to(reference, perm.shape))
        r, ok = _rowwise_pearson(perm[:, neighborhood.focal], neighborhood.means(perm))
        return r[ok]

    jobs = list(chunk_rngs(seed, n, CHUNK))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    values = np.concatenate(parts)
    if values.size < 2:
        raise DataError("too few non-degenerate shuffles")
    return NullResult(mean=float(values.mean()), two_sd=float(2.0 * values.std(ddof=1)),
                      n_valid=int(values.size), n_skipped=int(n - values.size), values=values)
