"""Betweenness-pattern classification of unlabeled points.

A probe is linked into every class network in turn. In each augmented network
its betweenness is compared with every existing member; the mean of the ``b``
smallest absolute differences is ``W``, the number of links into the class is
``T``. ``H`` mixes ``1 - W`` and ``T``, each normalized to sum to one, with
weight ``alpha`` on the betweenness term.

A probe with no link into a class sits isolated there, so its betweenness is
zero and trivially close to the least central members. Such classes get the
maximal difference ``W = 1`` unless ``literal_unlinked`` is set.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .centrality import betweenness_csr
from .graph import InsertionProbe, TrainedModel, attach, insert_probe

Mode = Literal["stateless", "growth"]
MODES = ("stateless", "growth")


@dataclass
class ClassScores:
    W: list[float]
    T: list[int]
    W_norm: list[float]
    T_norm: list[float]
    H: list[float]
    decided: object
    decided_index: int
    probe: InsertionProbe

    def as_dict(self) -> dict:
        return {"decided": self.decided, "H": self.H, "W": self.W, "T": self.T}


def augmented_betweenness(model: TrainedModel, c: int, links: np.ndarray) -> np.ndarray:
    """Betweenness of class ``c``'s network plus one extra node joined to ``links``.

    The extra node is last in the returned array.
    """
    nodes, src, dst = model.component_edges(c)
    m = len(nodes)
    loc = np.searchsorted(nodes, links)
    src = np.concatenate([src, loc, np.full(len(loc), m)])
    dst = np.concatenate([dst, np.full(len(loc), m), loc])
    order = np.argsort(src, kind="stable")
    indptr = np.zeros(m + 2, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=m + 1), out=indptr[1:])
    return betweenness_csr(indptr, dst[order])


def fuse(W: Sequence[float], T: Sequence[int], alpha: float) -> tuple[list[float], list[float], list[float]]:
    """Normalized ``1 - W``, normalized ``T`` and their ``alpha`` mix.

    A zero normalizer yields the uniform vector. ``alpha`` of exactly 1 or 0
    returns the corresponding normalized input unchanged.
    """
    n = len(W)
    uniform = [1.0 / n] * n
    keep = [1.0 - w for w in W]
    total = sum(keep)
    W_norm = [v / total for v in keep] if total > 0 else uniform
    t_total = sum(T)
    T_norm = [t / t_total for t in T] if t_total > 0 else list(uniform)
    if alpha == 1.0:
        return W_norm, T_norm, list(W_norm)
    if alpha == 0.0:
        return W_norm, T_norm, list(T_norm)
    mix = [alpha * w + (1.0 - alpha) * t for w, t in zip(W_norm, T_norm)]
    total = sum(mix)
    return W_norm, T_norm, [v / total for v in mix]


def decide(H: Sequence[float], T: Sequence[int]) -> int:
    """Index of the largest ``H``; ties go to more links, then the lower index."""
    return min(range(len(H)), key=lambda c: (-H[c], -T[c], c))


def score(model: TrainedModel, x, signed_differences: bool = False,
          literal_unlinked: bool = False) -> ClassScores:
    """Class scores for one point; the model is not modified.

    ``signed_differences`` keeps ``B(probe) - B(j)`` without the absolute value
    before taking the smallest entries. ``literal_unlinked`` keeps the measured
    ``W`` for classes the probe has no link into. Both are compatibility options.
    """
    if model is None or model.n_train == 0:
        raise ValueError("model is not trained")
    probe = insert_probe(model, x)
    b = model.params.b
    W, diffs = [], []
    for c, links in enumerate(probe.links):
        B = augmented_betweenness(model, c, links)
        nb = B[-1] - B[:-1]
        if not signed_differences:
            nb = np.abs(nb)
        nb = np.sort(nb)
        diffs.append(nb)
        pool = nb[: min(b, len(nb))].tolist()
        W.append(sum(pool) / len(pool))
    probe.differences = diffs
    T = probe.link_counts.tolist()
    if not literal_unlinked and any(T):
        W = [1.0 if t == 0 else w for w, t in zip(W, T)]
    W_norm, T_norm, H = fuse(W, T, model.params.alpha)
    best = decide(H, T)
    return ClassScores(W, T, W_norm, T_norm, H, model.classes[best], best, probe)


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def predict(model: TrainedModel, x, mode: Mode = "stateless", **options):
    """Decided class of ``x``; growth mode also attaches ``x`` to that class.

    ``options`` are passed on to :func:`score`.
    """
    _check_mode(mode)
    s = score(model, x, **options)
    if mode == "growth":
        attach(model, s.probe, s.decided)
    return s.decided


def score_batch(model: TrainedModel, xs, mode: Mode = "stateless", **options) -> list[ClassScores]:
    """Score rows in order; in growth mode each decided row joins the model before the next."""
    _check_mode(mode)
    out = []
    for x in xs:
        s = score(model, x, **options)
        if mode == "growth":
            attach(model, s.probe, s.decided)
        out.append(s)
    return out


def predict_batch(model: TrainedModel, xs, mode: Mode = "stateless", **options) -> list:
    return [s.decided for s in score_batch(model, xs, mode, **options)]
