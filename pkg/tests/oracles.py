"""Slow, literal reference implementations used only by the test suite.

Nothing here imports the code under test; every quantity is recomputed from
raw coordinates with plain Python and exact rational arithmetic.
"""
from __future__ import annotations

import math
from collections import deque
from fractions import Fraction


def knn_same_class(X, y, i, k):
    cand = [j for j in range(len(X)) if j != i and y[j] == y[i]]
    cand.sort(key=lambda j: (math.dist(X[i], X[j]), j))
    return cand[:k]


def quantile(values, q):
    """Linear-interpolation quantile, written out by hand."""
    v = sorted(values)
    pos = q * (len(v) - 1)
    lo = math.floor(pos)
    hi = min(lo + 1, len(v) - 1)
    return v[lo] + (v[hi] - v[lo]) * (pos - lo)


def literal_network(X, y, k, e):
    """Undirected edge set from the hybrid rule, evaluated node by node."""
    eps = {}
    if e > 0:
        for c in set(y):
            kd = [math.dist(X[i], X[j]) for i in range(len(X)) if y[i] == c for j in knn_same_class(X, y, i, k)]
            eps[c] = quantile(kd, e) if kd else 0.0
    edges = set()
    for i in range(len(X)):
        hood = knn_same_class(X, y, i, k)
        if e > 0:
            ball = [j for j in range(len(X)) if j != i and y[j] == y[i] and math.dist(X[i], X[j]) < eps[y[i]]]
            if len(ball) > k:
                hood = ball
        for j in hood:
            edges.add((min(i, j), max(i, j)))
    return edges


def exact_betweenness(n, edges):
    """Pair-normalized betweenness as Fractions, by walking every geodesic."""
    adj = {v: set() for v in range(n)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    raw = [Fraction(0)] * n
    for s in range(n):
        level = {s: 0}
        q = deque([s])
        while q:
            v = q.popleft()
            for w in adj[v]:
                if w not in level:
                    level[w] = level[v] + 1
                    q.append(w)
        for t in range(s + 1, n):
            if t not in level:
                continue
            paths = []

            def walk(path):
                last = path[-1]
                if last == t:
                    paths.append(path)
                    return
                for w in adj[last]:
                    if level.get(w) == level[last] + 1 and level[w] <= level[t]:
                        walk(path + [w])

            walk([s])
            for v in range(n):
                hits = sum(1 for p in paths if v in p[1:-1])
                if hits:
                    raw[v] += Fraction(hits, len(paths))
    if n < 3:
        return [Fraction(0)] * n
    norm = Fraction((n - 1) * (n - 2), 2)
    return [r / norm for r in raw]


def literal_classification(X, y, classes, instance, k, e, b, alpha,
                           absolute=True, unlinked_max=True):
    """Classify one instance following the published pseudocode line by line.

    Deviations, all documented: absolute differences (unless ``absolute`` is
    False), the normalized arrays in the final mix, the average taken over
    min(b, |NB|) entries, and W = 1 for classes without links when
    ``unlinked_max`` is set. Returns (W, T, H, decided) with exact Fractions
    for W and H.
    """
    edges = literal_network(X, y, k, e)
    # global neighborhood of the new node
    order = sorted(range(len(X)), key=lambda j: (math.dist(instance, X[j]), j))
    hood = order[:k]
    if e > 0:
        kd = []
        for i in range(len(X)):
            o = sorted((j for j in range(len(X)) if j != i), key=lambda j: (math.dist(X[i], X[j]), j))
            kd += [math.dist(X[i], X[j]) for j in o[:k]]
        eps = quantile(kd, e)
        ball = [j for j in range(len(X)) if math.dist(instance, X[j]) < eps]
        if len(ball) > k:
            hood = ball

    W, T = [], []
    for c in classes:
        V = [j for j in range(len(X)) if y[j] == c]
        index = len(V)
        local = {v: i for i, v in enumerate(V)}
        E = [(local[a], local[b2]) for a, b2 in edges if a in local and b2 in local]
        links = 0
        for j in V:
            if j in hood:
                links += 1
                E.append((local[j], index))
        B = exact_betweenness(len(V) + 1, E)
        NB = []
        for j in range(len(V)):
            d = B[index] - B[j]
            NB.append(abs(d) if absolute else d)
        NB.sort()
        total = Fraction(0)
        count = 0
        while count < b and count < len(NB):
            total += NB[count]
            count += 1
        total = total / count
        W.append(total)
        T.append(links)
    if unlinked_max and sum(T) > 0:
        W = [Fraction(1) if t == 0 else w for w, t in zip(W, T)]
    Wn = [1 - w for w in W]
    s = sum(Wn)
    Wn = [w / s for w in Wn] if s > 0 else [Fraction(1, len(W))] * len(W)
    Tn = [Fraction(t, sum(T)) for t in T] if sum(T) > 0 else [Fraction(1, len(T))] * len(T)
    a = Fraction(alpha)
    H = [a * w + (1 - a) * t for w, t in zip(Wn, Tn)]
    s = sum(H)
    H = [h / s for h in H]
    best = max(range(len(classes)), key=lambda c: (H[c], T[c], -c))
    return W, T, H, classes[best]
