"""Accuracy, repeated cross-validation, grid search and manifest-driven suites."""
from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .classifier import MODES, score_batch
from .data import Dataset, SplitSpec, generate_circles, generate_moons, kfold, load_csv, stratified_split
from .graph import HyperParams, build_network

PARAM_KEYS = ("k", "e", "b", "alpha")
GENERATORS = {"moons": generate_moons, "circles": generate_circles}


def accuracy(predictions, truths) -> float:
    predictions, truths = list(predictions), list(truths)
    if len(predictions) != len(truths):
        raise ValueError(f"{len(predictions)} predictions for {len(truths)} truths")
    if not truths:
        raise ValueError("accuracy of an empty prediction set is undefined")
    return 100.0 * sum(p == t for p, t in zip(predictions, truths)) / len(truths)


def confusion_matrix(predictions, truths, classes) -> np.ndarray:
    """Rows are true classes, columns predicted classes, both in ``classes`` order."""
    pos = {c: i for i, c in enumerate(classes)}
    m = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for p, t in zip(predictions, truths):
        m[pos[t], pos[p]] += 1
    return m


def repeat_seeds(master: int, count: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(master).generate_state(count)]


@dataclass
class ExperimentConfig:
    """One experiment: a data source, a parameter grid and an evaluation protocol.

    ``source`` is ``{"csv": path, "label": column}`` or
    ``{"generator": "moons" | "circles", "n": ..., "noise": ..., ...}``; a
    ready :class:`Dataset` may be given instead. ``protocol`` is ``"cv"``
    (``repeats`` x ``folds``-fold, optionally inside a stratified training split
    when ``cv_on_train_split`` is set) or ``"holdout"`` (``seeds`` stratified
    splits at ``train_fraction``; a grid is searched by CV on each training part).
    """

    name: str
    source: dict | Dataset
    grid: dict = field(default_factory=lambda: {"k": [5], "e": [0.0], "b": [5], "alpha": [1.0]})
    protocol: str = "cv"
    folds: int = 10
    repeats: int = 10
    train_fraction: float = 0.75
    seeds: int = 10
    cv_on_train_split: bool = False
    mode: str = "growth"
    scale: bool = False
    seed: int = 0
    options: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    reference: float | None = None

    def __post_init__(self):
        grid = {}
        for key in PARAM_KEYS:
            vals = self.grid.get(key)
            if vals is None:
                raise ValueError(f"{self.name}: grid is missing {key!r}")
            grid[key] = list(vals) if isinstance(vals, (list, tuple)) else [vals]
            if not grid[key]:
                raise ValueError(f"{self.name}: empty grid for {key!r}")
        self.grid = grid
        self.param_grid()  # raises on an out-of-range cell
        if self.protocol not in ("cv", "holdout"):
            raise ValueError(f"{self.name}: unknown protocol {self.protocol!r}")
        if self.folds < 2 or self.repeats < 1 or self.seeds < 1:
            raise ValueError(f"{self.name}: protocol counts must be positive (folds >= 2)")
        if self.mode not in MODES:
            raise ValueError(f"{self.name}: unknown mode {self.mode!r}")

    def param_grid(self) -> list[HyperParams]:
        return [HyperParams(*vals) for vals in itertools.product(*(self.grid[k] for k in PARAM_KEYS))]

    def with_params(self, params: HyperParams) -> ExperimentConfig:
        return replace(self, grid={k: [v] for k, v in params.as_dict().items()})

    def load(self, seed: int | None = None, base: Path | None = None) -> Dataset:
        src = self.source
        if isinstance(src, Dataset):
            return src
        if "csv" in src:
            path = Path(src["csv"])
            if base is not None and not path.is_absolute():
                path = base / path
            return load_csv(path, src.get("label", -1), src.get("header", True), name=src.get("name"))
        kind = src.get("generator")
        if kind not in GENERATORS:
            raise ValueError(f"{self.name}: unknown data source {src!r}")
        kwargs = {k: v for k, v in src.items() if k != "generator"}
        kwargs["seed"] = self.seed if seed is None else seed
        return GENERATORS[kind](**kwargs)


@dataclass
class CellResult:
    params: HyperParams
    mean: float
    std: float
    accuracies: list[float]
    confusion: np.ndarray
    h_sum_error: float = 0.0
    h_min: float = 0.0

    def as_dict(self) -> dict:
        return {"params": None if self.params is None else self.params.as_dict(),
                "mean_accuracy": self.mean, "std_accuracy": self.std,
                "accuracies": self.accuracies, "confusion": self.confusion.tolist(),
                "h_sum_error": self.h_sum_error, "h_min": self.h_min}


@dataclass
class EvalReport:
    name: str
    protocol: str
    classes: list
    cells: list[CellResult]
    best: HyperParams
    accuracy: float
    std: float
    accuracies: list[float]
    confusion: np.ndarray
    wall_clock: float = 0.0
    reference: float | None = None
    violations: list[str] = field(default_factory=list)
    error: str | None = None
    chosen: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.error is None and not self.violations

    def as_dict(self, timing: bool = False) -> dict:
        d = {
            "name": self.name, "protocol": self.protocol, "classes": list(self.classes),
            "best": self.best.as_dict() if self.best else None,
            "accuracy": self.accuracy, "std": self.std, "accuracies": self.accuracies,
            "confusion": None if self.confusion is None else self.confusion.tolist(),
            "cells": [c.as_dict() for c in self.cells], "chosen": self.chosen,
            "reference": self.reference, "violations": self.violations, "error": self.error,
        }
        if timing:
            d["wall_clock"] = self.wall_clock
        return d


def _fit_and_test(train: Dataset, test: Dataset, params: HyperParams, config: ExperimentConfig):
    model = build_network(train, params, scale=config.scale)
    scores = score_batch(model, test.X, config.mode, **config.options)
    preds = [s.decided for s in scores]
    return preds, test.labels, scores


class _HStats:
    """Worst deviation of emitted H vectors from a probability distribution."""

    def __init__(self):
        self.sum_error = 0.0
        self.minimum = math.inf

    def add(self, scores):
        for s in scores:
            self.sum_error = max(self.sum_error, abs(math.fsum(s.H) - 1.0))
            self.minimum = min(self.minimum, min(s.H))


def _cv_cell(data_for_repeat, params: HyperParams, config: ExperimentConfig, classes) -> CellResult:
    accs = []
    conf = np.zeros((len(classes), len(classes)), dtype=np.int64)
    hs = _HStats()
    for r, seed in enumerate(repeat_seeds(config.seed, config.repeats)):
        ds = data_for_repeat(r, seed)
        for train, test in kfold(ds, config.folds, seed, stratified=True):
            preds, truths, scores = _fit_and_test(train, test, params, config)
            accs.append(accuracy(preds, truths))
            conf += confusion_matrix(preds, truths, classes)
            hs.add(scores)
    return CellResult(params, float(np.mean(accs)), float(np.std(accs)), accs, conf, hs.sum_error, hs.minimum)


def _check_bounds(report: EvalReport, bounds: dict) -> list[str]:
    out = []
    values = [("accuracy", report.accuracy)]
    if bounds.get("per_cell"):
        values = [(f"cell {c.params.as_dict()}", c.mean) for c in report.cells]
    for label, v in values:
        if "min" in bounds and v < bounds["min"]:
            out.append(f"{label} {v:.3f} < min {bounds['min']}")
        if "max" in bounds and v > bounds["max"]:
            out.append(f"{label} {v:.3f} > max {bounds['max']}")
        if "target" in bounds and abs(v - bounds["target"]) > bounds.get("tolerance", 0):
            out.append(f"{label} {v:.3f} outside {bounds['target']} +/- {bounds.get('tolerance', 0)}")
    return out


def _finish(report: EvalReport, config: ExperimentConfig, t0: float) -> EvalReport:
    report.wall_clock = time.perf_counter() - t0
    report.reference = config.reference
    report.violations = _check_bounds(report, config.bounds)
    return report


def _best_cell(cells: list[CellResult]) -> CellResult:
    # highest mean; ties to smaller k, then smaller b, then grid order
    return min(enumerate(cells), key=lambda ic: (-ic[1].mean, ic[1].params.k, ic[1].params.b, ic[0]))[1]


def cross_validate(config: ExperimentConfig, base: Path | None = None, dataset: Dataset | None = None) -> EvalReport:
    """Repeated stratified k-fold CV of every grid cell; the best cell is the headline.

    Generated datasets are redrawn with each repeat's seed. With
    ``cv_on_train_split`` the folds are taken inside one stratified training
    split (seeded by ``config.seed``) and the held-out part is never read.
    """
    t0 = time.perf_counter()
    if dataset is None:
        dataset = config.load(base=base)
    classes = list(dataset.classes)
    if len(dataset.present_classes()) < 2:
        raise ValueError(f"{config.name}: training needs at least two classes")
    regenerate = isinstance(config.source, dict) and "generator" in config.source

    def data_for_repeat(r, seed):
        ds = config.load(seed=seed) if regenerate else dataset
        if config.cv_on_train_split:
            ds, _ = stratified_split(ds, SplitSpec(config.train_fraction, config.seed))
        return ds

    cells = [_cv_cell(data_for_repeat, p, config, classes) for p in config.param_grid()]
    best = _best_cell(cells)
    report = EvalReport(config.name, "cv", classes, cells, best.params, best.mean, best.std,
                        best.accuracies, best.confusion)
    return _finish(report, config, t0)


def grid_search(config: ExperimentConfig, train: Dataset) -> tuple[HyperParams, list[CellResult]]:
    """Best grid cell by CV on ``train`` alone."""
    classes = list(train.classes)
    cells = [_cv_cell(lambda r, s: train, p, config, classes) for p in config.param_grid()]
    return _best_cell(cells).params, cells


def holdout(config: ExperimentConfig, base: Path | None = None, dataset: Dataset | None = None) -> EvalReport:
    """Mean test accuracy over ``config.seeds`` stratified holdout splits."""
    t0 = time.perf_counter()
    if dataset is None:
        dataset = config.load(base=base)
    classes = list(dataset.classes)
    grid = config.param_grid()
    accs, chosen = [], []
    conf = np.zeros((len(classes), len(classes)), dtype=np.int64)
    hs = _HStats()
    for seed in repeat_seeds(config.seed, config.seeds):
        train, test = stratified_split(dataset, SplitSpec(config.train_fraction, seed))
        params = grid[0] if len(grid) == 1 else grid_search(config, train)[0]
        preds, truths, scores = _fit_and_test(train, test, params, config)
        accs.append(accuracy(preds, truths))
        conf += confusion_matrix(preds, truths, classes)
        hs.add(scores)
        chosen.append({"seed": seed, **params.as_dict()})
    single = grid[0] if len(grid) == 1 else None
    cell = CellResult(single, float(np.mean(accs)), float(np.std(accs)), accs, conf, hs.sum_error, hs.minimum)
    report = EvalReport(config.name, "holdout", classes, [cell], single, cell.mean, cell.std, accs, conf,
                        chosen=chosen)
    return _finish(report, config, t0)


def evaluate(config: ExperimentConfig, base: Path | None = None, dataset: Dataset | None = None) -> EvalReport:
    run = holdout if config.protocol == "holdout" else cross_validate
    return run(config, base, dataset)


# -- manifests ---------------------------------------------------------------

def _read_manifest(path: Path) -> dict:
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return json.loads(text)
    try:
        import tomllib
    except ModuleNotFoundError:  # python < 3.11
        import tomli as tomllib
    return tomllib.loads(text)


def config_from_dict(entry: dict, defaults: dict | None = None) -> ExperimentConfig:
    d = {**(defaults or {}), **entry}
    if "params" in d:
        d["grid"] = d.pop("params")
    proto = d.pop("protocol", "cv")
    if isinstance(proto, dict):
        d.update({k: v for k, v in proto.items() if k != "kind"})
        proto = proto.get("kind", "cv")
    d["protocol"] = proto
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(d) - known
    if unknown:
        raise ValueError(f"unknown experiment keys: {sorted(unknown)}")
    return ExperimentConfig(**d)


def load_manifest(path) -> tuple[list[ExperimentConfig], Path]:
    path = Path(path)
    doc = _read_manifest(path)
    defaults = doc.get("defaults", {})
    configs = [config_from_dict(e, defaults) for e in doc.get("experiment", doc.get("experiments", []))]
    return configs, path.parent


def run_experiment_suite(manifest, seed: int | None = None, log=None) -> tuple[list[EvalReport], str, bool]:
    """Run every experiment of a manifest file (or a list of configs).

    Returns the reports, the summary table and whether every bound held. A
    failing experiment is recorded with its error and the suite continues.
    """
    if isinstance(manifest, (str, Path)):
        configs, base = load_manifest(manifest)
    else:
        configs, base = list(manifest), None
    reports = []
    for cfg in configs:
        if seed is not None:
            cfg = replace(cfg, seed=seed)
        try:
            rep = evaluate(cfg, base)
        except (OSError, ValueError) as exc:
            rep = EvalReport(cfg.name, cfg.protocol, [], [], None, math.nan, math.nan, [], None,
                             reference=cfg.reference, error=f"{type(exc).__name__}: {exc}")
        if log is not None:
            log(f"{cfg.name}: {'error' if rep.error else f'{rep.accuracy:.3f}'} ({rep.wall_clock:.1f}s)")
        reports.append(rep)
    return reports, summary_table(reports), all(r.ok for r in reports)


def _fmt_params(p: HyperParams | None) -> str:
    return "-" if p is None else f"k={p.k} e={p.e:g} b={p.b} a={p.alpha:g}"


def summary_table(reports: list[EvalReport]) -> str:
    """Aligned text table; grid experiments list every cell, best one starred."""
    rows = [("experiment", "params", "accuracy", "std", "reference", "status")]
    for r in reports:
        status = "ERROR" if r.error else ("ok" if not r.violations else "FAIL")
        ref = "-" if r.reference is None else f"{r.reference:g}"
        if r.error:
            rows.append((r.name, "-", "-", "-", ref, status))
        elif len(r.cells) > 1:
            for c in r.cells:
                star = "*" if c.params == r.best else ""
                cell_status = status
                if r.violations and any(v.startswith("cell ") for v in r.violations):
                    tag = f"cell {c.params.as_dict()} "
                    cell_status = "FAIL" if any(v.startswith(tag) for v in r.violations) else "ok"
                rows.append((r.name, _fmt_params(c.params) + star, f"{c.mean:.3f}", f"{c.std:.3f}", ref, cell_status))
        else:
            rows.append((r.name, _fmt_params(r.best), f"{r.accuracy:.3f}", f"{r.std:.3f}", ref, status))
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def reports_json(reports: list[EvalReport], timing: bool = False) -> str:
    return json.dumps([r.as_dict(timing) for r in reports], indent=2, sort_keys=True)
