"""Labeled tabular datasets: CSV ingestion, toy generators, splitting, scaling."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Hashable, Sequence

import numpy as np

UNLABELED = -1


@dataclass(frozen=True)
class Instance:
    features: tuple[float, ...]
    label: Hashable | None = None


@dataclass
class Dataset:
    """Feature matrix ``X`` (n, d) with integer class codes ``y`` into ``classes``.

    ``y == -1`` marks an unlabeled row.
    """

    X: np.ndarray
    y: np.ndarray
    classes: tuple = ()
    name: str = ""
    feature_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        if self.X.ndim == 1:
            self.X = self.X.reshape(len(self.X), -1)
        self.y = np.asarray(self.y, dtype=np.int64).reshape(-1)
        self.classes = tuple(self.classes)
        if len(self.y) != len(self.X):
            raise ValueError(f"{len(self.X)} feature rows but {len(self.y)} labels")
        if not np.isfinite(self.X).all():
            raise ValueError("features must be finite")
        if len(self.y) and (self.y.max(initial=-1) >= len(self.classes) or self.y.min() < UNLABELED):
            raise ValueError("label code outside the class list")

    def __len__(self):
        return len(self.X)

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def labels(self) -> list:
        return [None if c == UNLABELED else self.classes[c] for c in self.y]

    def instances(self) -> list[Instance]:
        return [Instance(tuple(row), lab) for row, lab in zip(self.X.tolist(), self.labels)]

    def subset(self, idx, name: str | None = None) -> Dataset:
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(self.X[idx], self.y[idx], self.classes,
                       self.name if name is None else name, self.feature_names)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y[self.y >= 0], minlength=len(self.classes))

    def present_classes(self) -> tuple:
        return tuple(c for c, n in zip(self.classes, self.class_counts()) if n)

    @classmethod
    def from_instances(cls, instances: Sequence[Instance], name: str = "") -> Dataset:
        """Build from instances; class codes follow first appearance of each label."""
        classes: dict = {}
        y = []
        for inst in instances:
            if inst.label is None:
                y.append(UNLABELED)
            else:
                y.append(classes.setdefault(inst.label, len(classes)))
        dims = {len(inst.features) for inst in instances}
        if len(dims) > 1:
            raise ValueError(f"instances have mixed dimensionality {sorted(dims)}")
        X = np.array([inst.features for inst in instances], dtype=np.float64)
        return cls(X.reshape(len(instances), -1), y, tuple(classes), name)


class DataError(ValueError):
    """Malformed dataset input."""


def load_csv(path, label_column: int | str | None = -1, header: bool = True,
             name: str | None = None, allow_unlabeled: bool = False) -> Dataset:
    """Read a comma-separated file into a :class:`Dataset`.

    ``label_column`` is a zero-based index (negative counts from the end), a
    header name, or ``None`` for an unlabeled file. Labels are kept as opaque
    strings; class codes follow first appearance. With ``allow_unlabeled`` an
    empty label cell marks an unlabeled row instead of raising.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if any(cell.strip() for cell in r)]
    names: list[str] = []
    if header:
        if not rows:
            raise DataError(f"{path}: no data rows")
        names = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if not rows:
        raise DataError(f"{path}: no data rows")
    width = len(names) if header else len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise DataError(f"{path}: row {i + 1} has {len(r)} columns, expected {width}")

    if label_column is None:
        lab = None
    elif isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
        if label_column not in names:
            raise DataError(f"{path}: no column named {label_column!r}")
        lab = names.index(label_column)
    else:
        lab = int(label_column)
        if not -width <= lab < width:
            raise DataError(f"{path}: label column {lab} out of range for {width} columns")
        lab %= width

    feat_cols = [c for c in range(width) if c != lab]
    X = np.empty((len(rows), len(feat_cols)))
    classes: dict[str, int] = {}
    y = np.full(len(rows), UNLABELED, dtype=np.int64)
    for i, r in enumerate(rows):
        for j, c in enumerate(feat_cols):
            try:
                X[i, j] = float(r[c])
            except ValueError:
                raise DataError(f"{path}: row {i + 1}, column {c}: cannot parse {r[c]!r}") from None
            if not math.isfinite(X[i, j]):
                raise DataError(f"{path}: row {i + 1}, column {c}: non-finite value")
        if lab is not None:
            label = r[lab].strip()
            if not label:
                if allow_unlabeled:
                    continue
                raise DataError(f"{path}: row {i + 1}: missing label")
            y[i] = classes.setdefault(label, len(classes))
    fnames = tuple(names[c] for c in feat_cols) if names else ()
    return Dataset(X, y, tuple(classes), name if name is not None else path.stem, fnames)


def save_csv(ds: Dataset, path, header: bool = True) -> None:
    """Write features then the label column (empty for unlabeled rows).

    ``path`` may also be an open text stream.
    """
    if hasattr(path, "write"):
        _write_rows(ds, path, header)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _write_rows(ds, fh, header)


def _write_rows(ds: Dataset, fh, header: bool) -> None:
    w = csv.writer(fh, lineterminator="\n")
    if header:
        names = ds.feature_names or tuple(f"x{j}" for j in range(ds.n_features))
        w.writerow(list(names) + ["label"])
    for row, lab in zip(ds.X.tolist(), ds.labels):
        w.writerow([repr(v) for v in row] + ["" if lab is None else lab])


def generate_moons(n: int = 100, noise: float = 0.0, seed: int = 0) -> Dataset:
    """Two interleaving unit half circles; ceil(n/2) points in class 0."""
    if n < 2:
        raise ValueError("need at least 2 points")
    if noise < 0:
        raise ValueError("noise must be non-negative")
    n0 = (n + 1) // 2
    n1 = n - n0
    t0 = np.linspace(0, np.pi, n0)
    t1 = np.linspace(0, np.pi, n1)
    upper = np.column_stack([np.cos(t0), np.sin(t0)])
    lower = np.column_stack([1 - np.cos(t1), 0.5 - np.sin(t1)])
    X = np.vstack([upper, lower])
    y = np.repeat([0, 1], [n0, n1])
    if noise > 0:
        X = X + np.random.default_rng(seed).normal(scale=noise, size=X.shape)
    return Dataset(X, y, (0, 1), f"moons-{noise:g}", ("x0", "x1"))


def generate_circles(n: int = 100, noise: float = 0.0, inner_radius_ratio: float = 0.8,
                     seed: int = 0) -> Dataset:
    """Outer unit circle (class 0, ceil(n/2) points) around an inner circle (class 1)."""
    if n < 2:
        raise ValueError("need at least 2 points")
    if noise < 0:
        raise ValueError("noise must be non-negative")
    if not 0 < inner_radius_ratio < 1:
        raise ValueError("inner_radius_ratio must lie in (0, 1)")
    n0 = (n + 1) // 2
    n1 = n - n0
    t0 = np.linspace(0, 2 * np.pi, n0, endpoint=False)
    t1 = np.linspace(0, 2 * np.pi, n1, endpoint=False)
    X = np.vstack([np.column_stack([np.cos(t0), np.sin(t0)]),
                   inner_radius_ratio * np.column_stack([np.cos(t1), np.sin(t1)])])
    y = np.repeat([0, 1], [n0, n1])
    if noise > 0:
        X = X + np.random.default_rng(seed).normal(scale=noise, size=X.shape)
    return Dataset(X, y, (0, 1), f"circles-{noise:g}", ("x0", "x1"))


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.75
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValueError("train_fraction must lie in (0, 1)")


def _labeled_codes(ds: Dataset) -> np.ndarray:
    if (ds.y == UNLABELED).any():
        raise ValueError("splitting requires every instance to be labeled")
    return ds.y


def _train_counts(counts: np.ndarray, fraction: float) -> np.ndarray:
    """Per-class train sizes: floor of ``fraction * count``, the rest handed out by largest remainder.

    The test total is ceil((1 - fraction) * N); every class keeps at least one
    instance on each side.
    """
    total = int(counts.sum())
    n_train = total - math.ceil(round((1 - fraction) * total, 9))
    quota = counts * fraction
    alloc = np.floor(quota).astype(np.int64)
    order = sorted(range(len(counts)), key=lambda c: (-(quota[c] - alloc[c]), c))
    for c in order[: n_train - int(alloc.sum())]:
        alloc[c] += 1
    return np.clip(alloc, 1, counts - 1)


def stratified_split(ds: Dataset, spec: SplitSpec = SplitSpec()) -> tuple[Dataset, Dataset]:
    """Seeded holdout split preserving class proportions to within one instance."""
    y = _labeled_codes(ds)
    rng = np.random.default_rng(spec.seed)
    if not spec.stratified:
        perm = rng.permutation(len(ds))
        cut = min(max(len(ds) - math.ceil((1 - spec.train_fraction) * len(ds)), 1), len(ds) - 1)
        return ds.subset(np.sort(perm[:cut])), ds.subset(np.sort(perm[cut:]))
    counts = ds.class_counts()
    for name, n in zip(ds.classes, counts):
        if n == 1:
            raise ValueError(f"class {name!r} has a single instance; cannot stratify")
    present = np.flatnonzero(counts)
    alloc = _train_counts(counts[present], spec.train_fraction)
    train, test = [], []
    for c, cut in zip(present, alloc):
        members = rng.permutation(np.flatnonzero(y == c))
        train.append(members[:cut])
        test.append(members[cut:])
    return ds.subset(np.sort(np.concatenate(train))), ds.subset(np.sort(np.concatenate(test)))


def kfold(ds: Dataset, folds: int = 10, seed: int = 0,
          stratified: bool = True) -> list[tuple[Dataset, Dataset]]:
    """Partition ``ds`` into ``folds`` disjoint test sets, each paired with its complement.

    Stratified assignment deals every class round-robin over the folds after a
    seeded shuffle, continuing where the previous class stopped so fold sizes
    differ by at most one.
    """
    if folds < 2:
        raise ValueError("need at least 2 folds")
    if folds > len(ds):
        raise ValueError(f"{folds} folds but only {len(ds)} instances")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(len(ds), dtype=np.int64)
    if stratified:
        y = _labeled_codes(ds)
        offset = 0
        for c, name in enumerate(ds.classes):
            members = np.flatnonzero(y == c)
            if len(members) == 0:
                continue
            if len(members) < folds:
                raise ValueError(f"class {name!r} has {len(members)} instances, fewer than {folds} folds")
            members = rng.permutation(members)
            fold_of[members] = (offset + np.arange(len(members))) % folds
            offset = (offset + len(members)) % folds
    else:
        fold_of[rng.permutation(len(ds))] = np.arange(len(ds)) % folds
    out = []
    for f in range(folds):
        test = np.flatnonzero(fold_of == f)
        train = np.flatnonzero(fold_of != f)
        out.append((ds.subset(train), ds.subset(test)))
    return out


@dataclass(frozen=True)
class MinMaxScaling:
    """Per-feature affine map fitted on training data; constant features map to 0."""

    minimum: tuple[float, ...]
    maximum: tuple[float, ...]

    @classmethod
    def fit(cls, X: np.ndarray) -> MinMaxScaling:
        X = np.asarray(X, dtype=np.float64)
        if len(X) == 0:
            raise ValueError("cannot fit scaling on an empty dataset")
        return cls(tuple(X.min(axis=0).tolist()), tuple(X.max(axis=0).tolist()))

    def transform(self, X: np.ndarray) -> np.ndarray:
        lo = np.asarray(self.minimum)
        span = np.asarray(self.maximum) - lo
        safe = np.where(span > 0, span, 1.0)
        return np.where(span > 0, (np.asarray(X, dtype=np.float64) - lo) / safe, 0.0)


def min_max_scale(train: Dataset, others: Sequence[Dataset] = ()) -> tuple[Dataset, list[Dataset], MinMaxScaling]:
    scaling = MinMaxScaling.fit(train.X)

    def apply(ds):
        return Dataset(scaling.transform(ds.X), ds.y, ds.classes, ds.name, ds.feature_names)

    return apply(train), [apply(o) for o in others], scaling
