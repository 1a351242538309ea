"""Exact betweenness centrality on small unweighted undirected graphs.

Scores are normalized by the number of unordered node pairs not containing the
node, ``(n - 1)(n - 2) / 2``, so every score lies in ``[0, 1]`` whatever the
component size.
"""
from __future__ import annotations

from collections import deque
from typing import Iterable

import numba
import numpy as np

ORACLE_MAX_NODES = 12


def edges_to_csr(n: int, edges: Iterable[tuple[int, int]]) -> tuple[np.ndarray, np.ndarray]:
    """CSR adjacency (indptr, indices) for an undirected edge list over ``0..n-1``."""
    e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    if e.size and (e.min() < 0 or e.max() >= n):
        raise ValueError("edge endpoint outside 0..n-1")
    src = np.concatenate([e[:, 0], e[:, 1]])
    dst = np.concatenate([e[:, 1], e[:, 0]])
    keep = src != dst
    src, dst = src[keep], dst[keep]
    # dedupe (i, j) pairs
    key = np.unique(src * max(n, 1) + dst)
    src, dst = key // max(n, 1), key % max(n, 1)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, dst.astype(np.int64)


@numba.njit(cache=True)
def _brandes(indptr, indices, n):
    cb = np.zeros(n, dtype=np.float64)
    sigma = np.zeros(n, dtype=np.float64)
    dist = np.empty(n, dtype=np.int64)
    delta = np.zeros(n, dtype=np.float64)
    order = np.empty(n, dtype=np.int64)
    for s in range(n):
        sigma[:] = 0.0
        delta[:] = 0.0
        dist[:] = -1
        sigma[s] = 1.0
        dist[s] = 0
        order[0] = s
        head = 0
        tail = 1
        while head < tail:
            v = order[head]
            head += 1
            for p in range(indptr[v], indptr[v + 1]):
                w = indices[p]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    order[tail] = w
                    tail += 1
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
        # dependency accumulation in reverse BFS order; predecessors are
        # recovered from the distance labels instead of being stored
        for q in range(tail - 1, 0, -1):
            w = order[q]
            coeff = (1.0 + delta[w]) / sigma[w]
            for p in range(indptr[w], indptr[w + 1]):
                v = indices[p]
                if dist[v] == dist[w] - 1:
                    delta[v] += sigma[v] * coeff
            cb[w] += delta[w]
    return cb


def betweenness_csr(indptr: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Normalized betweenness for a CSR graph; see :func:`betweenness`."""
    n = len(indptr) - 1
    if n < 3:
        return np.zeros(n)
    raw = _brandes(indptr, indices, n)
    # each unordered pair was counted from both endpoints
    return raw / ((n - 1) * (n - 2))


def betweenness(component) -> np.ndarray:
    """Normalized betweenness of every node of ``component``.

    ``component`` is anything exposing ``nodes`` (sequence of node ids) and
    ``edges`` (pairs of node ids), e.g. :class:`bcnet.graph.ClassComponent`.
    The result is aligned with ``component.nodes``.
    """
    nodes = list(component.nodes)
    pos = {v: i for i, v in enumerate(nodes)}
    indptr, indices = edges_to_csr(len(nodes), ((pos[a], pos[b]) for a, b in component.edges))
    return betweenness_csr(indptr, indices)


def betweenness_oracle(component) -> np.ndarray:
    """Betweenness by explicit enumeration of every geodesic.

    For each unordered pair the shortest-path DAG is built by BFS and every
    path in it is walked; a node's share is the fraction of walked paths that
    contain it. Verification only: cost grows with the number of geodesics.
    """
    nodes = list(component.nodes)
    n = len(nodes)
    if n > ORACLE_MAX_NODES:
        raise ValueError(f"oracle limited to {ORACLE_MAX_NODES} nodes, got {n}")
    pos = {v: i for i, v in enumerate(nodes)}
    adj: list[set[int]] = [set() for _ in range(n)]
    for a, b in component.edges:
        i, j = pos[a], pos[b]
        if i != j:
            adj[i].add(j)
            adj[j].add(i)

    raw = [0.0] * n
    for s in range(n):
        level = [-1] * n
        level[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if level[w] < 0:
                    level[w] = level[v] + 1
                    queue.append(w)
        for t in range(s + 1, n):
            if level[t] < 0:
                continue
            paths: list[list[int]] = []
            stack = [[s]]
            while stack:
                path = stack.pop()
                last = path[-1]
                if last == t:
                    paths.append(path)
                    continue
                for w in sorted(adj[last]):
                    if level[w] == level[last] + 1 and level[w] <= level[t]:
                        stack.append(path + [w])
            total = len(paths)
            through = [0] * n
            for path in paths:
                for v in path[1:-1]:
                    through[v] += 1
            for v in range(n):
                if through[v]:
                    raw[v] += through[v] / total
    if n < 3:
        return np.zeros(n)
    return np.asarray(raw) / ((n - 1) * (n - 2) / 2)
