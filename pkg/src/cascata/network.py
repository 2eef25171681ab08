"""Directed follower graph and k-core decomposition.

An edge ``(v, u)`` means that ``u`` follows ``v``: information flows from
``v`` to its followers. ``k_in(u)`` therefore counts the accounts ``u``
follows and ``k_out(u)`` counts the followers of ``u``.
"""
from __future__ import annotations

import io
import logging
from dataclasses import dataclass
from typing import IO, Iterable, Optional, Union

import numpy as np

from .errors import DataError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LoadReport:
    edges: int
    self_loops: int = 0
    duplicates: int = 0
    malformed: int = 0


class FollowerGraph:
    """Immutable directed graph stored as two CSR adjacency structures.

    Nodes are sorted by id, so node indices do not depend on edge order.
    """

    def __init__(self, edges: Iterable, nodes: Iterable = ()):
        pairs = []
        node_set = set(nodes)
        self_loops = duplicates = 0
        seen = set()
        for v, u in edges:
            v, u = str(v), str(u)
            node_set.add(v)
            node_set.add(u)
            if v == u:
                self_loops += 1
                continue
            if (v, u) in seen:
                duplicates += 1
                continue
            seen.add((v, u))
            pairs.append((v, u))
        self.nodes = tuple(sorted(node_set))
        self.index = {n: i for i, n in enumerate(self.nodes)}
        n = len(self.nodes)
        src = np.fromiter((self.index[v] for v, _ in pairs), dtype=np.int64, count=len(pairs))
        dst = np.fromiter((self.index[u] for _, u in pairs), dtype=np.int64, count=len(pairs))
        order = np.lexsort((dst, src))
        self.src, self.dst = src[order], dst[order]
        self.self_loops = self_loops
        self.duplicates = duplicates
        # followers: out-neighbours grouped by source
        self._out_ptr = np.concatenate(([0], np.cumsum(np.bincount(self.src, minlength=n))))
        self._out_idx = self.dst
        # followees: in-neighbours grouped by target
        in_order = np.lexsort((self.src, self.dst))
        self._in_ptr = np.concatenate(([0], np.cumsum(np.bincount(self.dst, minlength=n))))
        self._in_idx = self.src[in_order]

    # -- sizes -------------------------------------------------------------
    def __len__(self):
        return len(self.nodes)

    def __contains__(self, user):
        return user in self.index

    @property
    def n_edges(self) -> int:
        return int(self.src.size)

    def edges(self):
        return [(self.nodes[a], self.nodes[b]) for a, b in zip(self.src.tolist(), self.dst.tolist())]

    # -- index-level views ---------------------------------------------------
    def _idx(self, user) -> int:
        try:
            return self.index[user]
        except KeyError:
            raise KeyError(f"unknown user {user!r}") from None

    def follower_indices(self, i: int) -> np.ndarray:
        return self._out_idx[self._out_ptr[i]:self._out_ptr[i + 1]]

    def followee_indices(self, i: int) -> np.ndarray:
        return self._in_idx[self._in_ptr[i]:self._in_ptr[i + 1]]

    @property
    def in_degree(self) -> np.ndarray:
        return np.diff(self._in_ptr)

    @property
    def out_degree(self) -> np.ndarray:
        return np.diff(self._out_ptr)

    @property
    def followee_csr(self):
        """(indptr, indices) listing the followees of every node."""
        return self._in_ptr, self._in_idx

    @property
    def follower_csr(self):
        return self._out_ptr, self._out_idx

    # -- user-level queries --------------------------------------------------
    def degrees(self, user) -> tuple:
        """``(k_in, k_out)`` of a user."""
        i = self._idx(user)
        return int(self._in_ptr[i + 1] - self._in_ptr[i]), int(self._out_ptr[i + 1] - self._out_ptr[i])

    def followers(self, user) -> set:
        return {self.nodes[j] for j in self.follower_indices(self._idx(user)).tolist()}

    def followees(self, user) -> set:
        return {self.nodes[j] for j in self.followee_indices(self._idx(user)).tolist()}

    def follows(self, follower, followee) -> bool:
        i, j = self.index.get(followee), self.index.get(follower)
        if i is None or j is None:
            return False
        row = self.follower_indices(i)
        k = np.searchsorted(row, j)
        return bool(k < row.size and row[k] == j)

    def reciprocity(self) -> float:
        """Fraction of edges whose reverse edge is also present."""
        if not self.n_edges:
            return 0.0
        n = len(self.nodes)
        fwd = self.src * n + self.dst
        rev = self.dst * n + self.src
        return float(np.isin(rev, fwd, assume_unique=True).sum() / self.n_edges)

    def undirected_adjacency(self, degree_mode: str = "distinct"):
        """CSR of the undirected projection.

        ``distinct`` merges reciprocal pairs into one undirected edge;
        ``multi`` keeps both directions, so a reciprocal pair counts twice
        toward each endpoint's degree (``k_in + k_out``).
        """
        n = len(self.nodes)
        a = np.concatenate((self.src, self.dst))
        b = np.concatenate((self.dst, self.src))
        if degree_mode == "distinct":
            keys = np.unique(a * n + b)
            a, b = keys // n, keys % n
        elif degree_mode == "multi":
            order = np.lexsort((b, a))
            a, b = a[order], b[order]
        else:
            raise ValueError(f"unknown degree mode {degree_mode!r}")
        ptr = np.concatenate(([0], np.cumsum(np.bincount(a, minlength=n))))
        return ptr, b


def load_edges(source: Union[bytes, str, IO], nodes: Iterable = ()) -> FollowerGraph:
    """Parse an edge list of ``v<TAB>u`` lines (``u`` follows ``v``).

    Blank and ``#`` lines are ignored; lines without exactly two fields are
    skipped and counted. Self-loops and duplicates are dropped and counted;
    the counts are available as ``graph.load_report``.
    """
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DataError(f"edge list is not valid UTF-8: {exc}") from exc
    if not isinstance(source, str):
        source = source.read()
        if isinstance(source, bytes):
            source = source.decode("utf-8")
    pairs = []
    malformed = 0
    for line in io.StringIO(source):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t") if "\t" in line else line.split()
        if len(fields) != 2 or not fields[0] or not fields[1]:
            malformed += 1
            continue
        pairs.append((fields[0].strip(), fields[1].strip()))
    graph = FollowerGraph(pairs, nodes)
    if not len(graph):
        raise DataError("empty graph")
    graph.load_report = LoadReport(graph.n_edges, graph.self_loops, graph.duplicates, malformed)
    if malformed or graph.self_loops or graph.duplicates:
        logger.warning("edge list: %d malformed, %d self-loops, %d duplicates dropped",
                       malformed, graph.self_loops, graph.duplicates)
    return graph


def read_edges(path, nodes: Iterable = ()) -> FollowerGraph:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read edge list {path}: {exc}") from exc
    return load_edges(data, nodes)


def write_edges(graph: FollowerGraph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for v, u in graph.edges():
            fh.write(f"{v}\t{u}\n")


def core_numbers(ptr: np.ndarray, adj: np.ndarray) -> np.ndarray:
    """Core number of every node of an undirected CSR graph.

    Bucket-sort peeling in O(V + E). Repeated neighbours are honoured, so
    multigraph adjacency lists are supported.
    """
    n = ptr.size - 1
    deg = np.diff(ptr).astype(np.int64)
    if n == 0:
        return deg
    max_deg = int(deg.max())
    # bin[d] = start of degree-d block in `vert`
    counts = np.bincount(deg, minlength=max_deg + 1)
    bins = np.concatenate(([0], np.cumsum(counts)[:-1])).tolist()
    order = np.argsort(deg, kind="stable")
    vert = order.tolist()
    pos = [0] * n
    for p, v in enumerate(vert):
        pos[v] = p
    d = deg.tolist()
    ptr_l = ptr.tolist()
    adj_l = adj.tolist()
    for i in range(n):
        v = vert[i]
        dv = d[v]
        for k in range(ptr_l[v], ptr_l[v + 1]):
            u = adj_l[k]
            du = d[u]
            if du > dv:
                # move u to the front of its bucket, then shrink the bucket
                pu = pos[u]
                pw = bins[du]
                w = vert[pw]
                if u != w:
                    vert[pu], vert[pw] = w, u
                    pos[u], pos[w] = pw, pu
                bins[du] += 1
                d[u] = du - 1
    return np.asarray(d, dtype=np.int64)


def k_core_decomposition(graph: FollowerGraph, degree_mode: str = "distinct") -> dict:
    """Map every user to its coreness on the undirected projection.

    Isolated users get 0. See :meth:`FollowerGraph.undirected_adjacency`
    for the meaning of ``degree_mode``.
    """
    ptr, adj = graph.undirected_adjacency(degree_mode)
    cores = core_numbers(ptr, adj)
    return dict(zip(graph.nodes, cores.tolist()))
