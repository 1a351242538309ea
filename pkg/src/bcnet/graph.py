"""Per-class similarity networks with probe insertion.

Each training instance is linked to its same-class epsilon-ball when that ball
holds more than ``k`` members, and to its ``k`` nearest same-class neighbors
otherwise. Classes therefore never share an edge. Unlabeled probes look for
neighbors among all nodes and the result is split by neighbor class.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable

import numpy as np

from .data import Dataset, MinMaxScaling

MODEL_FORMAT = "bcnet.model/1"


@dataclass(frozen=True)
class HyperParams:
    """``k`` neighbors, ``e`` distance quantile, ``b`` comparison pool, ``alpha`` mix."""

    k: int = 5
    e: float = 0.0
    b: int = 5
    alpha: float = 1.0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if int(self.b) != self.b or self.b < 1:
            raise ValueError(f"b must be a positive integer, got {self.b}")
        if not 0.0 <= self.e <= 1.0:
            raise ValueError(f"e must lie in [0, 1], got {self.e}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "b", int(self.b))
        object.__setattr__(self, "e", float(self.e))
        object.__setattr__(self, "alpha", float(self.alpha))

    def as_dict(self) -> dict:
        return {"k": self.k, "e": self.e, "b": self.b, "alpha": self.alpha}


@dataclass(frozen=True)
class ClassComponent:
    class_id: Hashable
    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]


@dataclass
class InsertionProbe:
    """Candidate links of one unlabeled point, split by the class of each neighbor."""

    features: np.ndarray
    neighbors: np.ndarray
    links: list[np.ndarray]
    used_radius: bool
    model_version: int
    differences: list[np.ndarray] | None = None

    @property
    def link_counts(self) -> np.ndarray:
        return np.array([len(v) for v in self.links], dtype=np.int64)


def pairwise_distance(a, b) -> float:
    a = np.asarray(getattr(a, "features", a), dtype=np.float64)
    b = np.asarray(getattr(b, "features", b), dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(((a - b) ** 2).sum()))


def distances_to(X: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.sqrt(((X - x) ** 2).sum(axis=1))


def distance_matrix(X: np.ndarray) -> np.ndarray:
    # row by row so every entry matches distances_to bit for bit
    return np.array([distances_to(X, row) for row in X]).reshape(len(X), len(X))


def nearest(dist: np.ndarray, k: int, exclude: int | None = None) -> np.ndarray:
    """Indices of the ``k`` smallest entries; ties go to the lower index."""
    order = np.argsort(dist, kind="stable")
    if exclude is not None:
        order = order[order != exclude]
    return order[:k]


def _quantile(values: np.ndarray, e: float) -> float:
    if e <= 0 or len(values) == 0:
        return 0.0
    return float(np.quantile(values, e))


def neighborhood(dist: np.ndarray, k: int, eps: float, use_radius: bool,
                 exclude: int | None = None) -> tuple[np.ndarray, bool]:
    """Epsilon-ball if it holds more than ``k`` points, else the ``k`` nearest."""
    if use_radius:
        ball = np.flatnonzero(dist < eps)
        if exclude is not None:
            ball = ball[ball != exclude]
        if len(ball) > k:
            return ball, True
    return nearest(dist, k, exclude), False


class TrainedModel:
    """Node features, class memberships and intra-class adjacency.

    Nodes ``0..n_train-1`` are the training instances in dataset order; nodes
    attached later (growth-mode predictions) follow. Features are stored in the
    model's own space, i.e. after ``scaling`` when one was fitted.
    """

    def __init__(self, params: HyperParams, classes, X, node_class, adjacency,
                 epsilon, probe_epsilon: float, scaling: MinMaxScaling | None = None,
                 n_train: int | None = None):
        self.params = params
        self.classes = tuple(classes)
        self.X = np.array(X, dtype=np.float64).reshape(len(node_class), -1)
        self.node_class = np.array(node_class, dtype=np.int64)
        self.adj: list[set[int]] = [set(a) for a in adjacency]
        self.epsilon = np.array(epsilon, dtype=np.float64)
        self.probe_epsilon = float(probe_epsilon)
        self.scaling = scaling
        self.n_train = len(self.node_class) if n_train is None else int(n_train)
        self.version = 0
        self._csr: dict[int, tuple] = {}

    @property
    def n_nodes(self) -> int:
        return len(self.node_class)

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def class_index(self, label) -> int:
        try:
            return self.classes.index(label)
        except ValueError:
            raise KeyError(f"unknown class {label!r}") from None

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.node_class == c)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((i, j) for i, nb in enumerate(self.adj) for j in nb if i < j)

    def component(self, c: int) -> ClassComponent:
        nodes = self.members(c)
        es = tuple((i, j) for i in nodes.tolist() for j in sorted(self.adj[i]) if i < j)
        return ClassComponent(self.classes[c], tuple(nodes.tolist()), es)

    @property
    def components(self) -> list[ClassComponent]:
        return [self.component(c) for c in range(len(self.classes))]

    def component_edges(self, c: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(member node ids, local src, local dst) with both edge directions; cached."""
        hit = self._csr.get(c)
        if hit is not None and hit[0] == self.version:
            return hit[1]
        nodes = self.members(c)
        local = {v: i for i, v in enumerate(nodes.tolist())}
        src, dst = [], []
        for v in nodes.tolist():
            for w in self.adj[v]:
                src.append(local[v])
                dst.append(local[w])
        out = (nodes, np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64))
        self._csr[c] = (self.version, out)
        return out

    def transform(self, x) -> np.ndarray:
        x = np.asarray(getattr(x, "features", x), dtype=np.float64).reshape(-1)
        if x.shape[0] != self.n_features:
            raise ValueError(f"dimension mismatch: model has {self.n_features} features, got {x.shape[0]}")
        if not np.isfinite(x).all():
            raise ValueError("features must be finite")
        if self.scaling is not None:
            x = self.scaling.transform(x)
        return x

    def _touch(self):
        self.version += 1

    def copy(self) -> TrainedModel:
        return TrainedModel(self.params, self.classes, self.X.copy(), self.node_class.copy(),
                            self.adj, self.epsilon.copy(), self.probe_epsilon, self.scaling,
                            self.n_train)


def build_network(train: Dataset, params: HyperParams, scale: bool = False) -> TrainedModel:
    """Build one intra-class network per class of ``train``."""
    if (train.y < 0).any():
        raise ValueError("training data must be fully labeled")
    counts = train.class_counts()
    if len(counts) == 0 or (counts == 0).any():
        empty = [c for c, n in zip(train.classes, counts) if n == 0]
        raise ValueError(f"empty class(es) in training data: {empty}")
    if len(train.classes) < 2:
        raise ValueError("training needs at least two classes")
    scaling = MinMaxScaling.fit(train.X) if scale else None
    X = scaling.transform(train.X) if scaling else train.X.copy()
    k, e = params.k, params.e
    use_radius = e > 0
    adj: list[set[int]] = [set() for _ in range(len(X))]
    eps = np.zeros(len(train.classes))
    for c in range(len(train.classes)):
        idx = np.flatnonzero(train.y == c)
        D = distance_matrix(X[idx])
        knn = [nearest(D[i], k, exclude=i) for i in range(len(idx))]
        kd = np.concatenate([D[i, nb] for i, nb in enumerate(knn)]) if len(idx) else np.empty(0)
        eps[c] = _quantile(kd, e) if use_radius else 0.0
        for i in range(len(idx)):
            nb = knn[i]
            if use_radius:
                nb, _ = neighborhood(D[i], k, eps[c], True, exclude=i)
            for j in nb.tolist():
                a, b = int(idx[i]), int(idx[j])
                adj[a].add(b)
                adj[b].add(a)
    probe_eps = 0.0
    if use_radius and len(X) > 1:
        kd = []
        for i in range(len(X)):
            d = distances_to(X, X[i])
            kd.append(d[nearest(d, k, exclude=i)])
        probe_eps = _quantile(np.concatenate(kd), e)
    return TrainedModel(params, train.classes, X, train.y, adj, eps, probe_eps, scaling)


def insert_probe(model: TrainedModel, x) -> InsertionProbe:
    """Neighbors of ``x`` among all current nodes, partitioned by class."""
    z = model.transform(x)
    dist = distances_to(model.X, z)
    nb, radius = neighborhood(dist, model.params.k, model.probe_epsilon, model.params.e > 0)
    nb = np.sort(nb)
    cls = model.node_class[nb]
    links = [nb[cls == c] for c in range(len(model.classes))]
    return InsertionProbe(z, nb, links, radius, model.version)


def attach(model: TrainedModel, probe: InsertionProbe, label) -> int:
    """Add the probe to class ``label`` keeping only its links into that class."""
    c = model.class_index(label)
    if probe.model_version != model.version:
        raise ValueError("probe was computed against a different model state")
    node = model.n_nodes
    model.X = np.vstack([model.X, probe.features[None, :]])
    model.node_class = np.append(model.node_class, c)
    model.adj.append(set(probe.links[c].tolist()))
    for j in probe.links[c].tolist():
        model.adj[j].add(node)
    model._touch()
    return node


def detach(model: TrainedModel, node: int) -> None:
    """Remove an attached node; ids of nodes attached after it shift down by one."""
    if not model.n_train <= node < model.n_nodes:
        what = "a training node" if 0 <= node < model.n_train else "unknown"
        raise KeyError(f"node {node} is {what}; only attached nodes can be detached")
    for j in model.adj[node]:
        model.adj[j].discard(node)
    del model.adj[node]
    if node != model.n_nodes - 1:
        model.adj = [{j - 1 if j > node else j for j in nb} for nb in model.adj]
    model.X = np.delete(model.X, node, axis=0)
    model.node_class = np.delete(model.node_class, node)
    model._touch()


def structural_hash(model: TrainedModel) -> str:
    h = hashlib.sha256()
    h.update(json.dumps([repr(c) for c in model.classes]).encode())
    h.update(json.dumps(model.params.as_dict(), sort_keys=True).encode())
    h.update(np.int64(model.n_train).tobytes())
    h.update(np.ascontiguousarray(model.X).tobytes())
    h.update(model.node_class.tobytes())
    h.update(np.asarray(model.edges(), dtype=np.int64).tobytes())
    h.update(model.epsilon.tobytes())
    h.update(np.float64(model.probe_epsilon).tobytes())
    return h.hexdigest()


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "params": model.params.as_dict(),
        "classes": list(model.classes),
        "scaling": None if model.scaling is None else {
            "min": list(model.scaling.minimum), "max": list(model.scaling.maximum)},
        "epsilon": model.epsilon.tolist(),
        "probe_epsilon": model.probe_epsilon,
        "n_train": model.n_train,
        "features": model.X.tolist(),
        "components": [
            {"class": comp.class_id, "nodes": list(comp.nodes), "edges": [list(e) for e in comp.edges]}
            for comp in model.components
        ],
    }


def model_from_dict(doc: dict) -> TrainedModel:
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"unsupported model format {doc.get('format')!r}")
    classes = tuple(doc["classes"])
    n = len(doc["features"])
    node_class = np.full(n, -1, dtype=np.int64)
    adj: list[set[int]] = [set() for _ in range(n)]
    for comp in doc["components"]:
        c = classes.index(comp["class"])
        node_class[comp["nodes"]] = c
        for a, b in comp["edges"]:
            adj[a].add(b)
            adj[b].add(a)
    if (node_class < 0).any():
        raise ValueError("model document leaves nodes without a component")
    sc = doc.get("scaling")
    scaling = None if sc is None else MinMaxScaling(tuple(sc["min"]), tuple(sc["max"]))
    eps = doc["epsilon"]
    return TrainedModel(HyperParams(**doc["params"]), classes, np.array(doc["features"], dtype=np.float64),
                        node_class, adj, eps, doc["probe_epsilon"], scaling, doc["n_train"])


def save_model(model: TrainedModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model)))


def load_model(path) -> TrainedModel:
    return model_from_dict(json.loads(Path(path).read_text()))
