"""Command-line driver: generate, train, predict, evaluate, sweep, reproduce.

Exit status is 0 on success, 1 on a runtime or data failure (including
violated acceptance bounds in ``reproduce``) and 2 on a usage error. Flags are
validated before any data is read.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .classifier import MODES, score_batch
from .data import DataError, generate_circles, generate_moons, load_csv, save_csv
from .evaluation import ExperimentConfig, evaluate, reports_json, run_experiment_suite, summary_table
from .graph import HyperParams, build_network, load_model, save_model


class UsageError(Exception):
    pass


def _label_column(value: str | None):
    if value is None or value.lower() == "none":
        return None
    try:
        return int(value)
    except ValueError:
        return value


def _number_list(kind):
    def parse(text: str):
        try:
            return [kind(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected comma-separated {kind.__name__} values, got {text!r}")
    return parse


def _add_params(p: argparse.ArgumentParser, grid: bool = False) -> None:
    conv = (_number_list(int), _number_list(float)) if grid else (int, float)
    p.add_argument("--k", type=conv[0], default=[5] if grid else 5, help="neighbor count")
    p.add_argument("--e", type=conv[1], default=[0.0] if grid else 0.0, help="distance quantile, 0 disables the radius")
    p.add_argument("--b", type=conv[0], default=[5] if grid else 5, help="comparison pool size")
    p.add_argument("--alpha", type=conv[1], default=[1.0] if grid else 1.0, help="weight of the betweenness term")


def _add_csv(p: argparse.ArgumentParser, label_default: str | None = "-1") -> None:
    p.add_argument("--label-column", default=label_default,
                   help="label column name or zero-based index ('none' for unlabeled rows)")
    p.add_argument("--no-header", action="store_true", help="the first row is data")


def _add_protocol(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--csv", type=Path, help="labeled dataset")
    src.add_argument("--generator", choices=("moons", "circles"))
    p.add_argument("--n", type=int, default=100, help="generated instance count")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--ratio", type=float, default=0.8, help="inner circle radius ratio")
    _add_csv(p)
    p.add_argument("--protocol", choices=("cv", "holdout"), default="cv")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seeds", type=int, default=10, help="holdout splits")
    p.add_argument("--train-fraction", type=float, default=0.75)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--mode", choices=MODES, default="growth")
    p.add_argument("--scale", action="store_true", help="min-max scale features on the training part")
    p.add_argument("--json", action="store_true", help="print the JSON report instead of the table")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bcnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic dataset as CSV")
    g.add_argument("kind", choices=("moons", "circles"))
    g.add_argument("--n", type=int, default=100)
    g.add_argument("--noise", type=float, default=0.0)
    g.add_argument("--ratio", type=float, default=0.8, help="inner circle radius ratio")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", type=Path, help="output file (default: stdout)")

    t = sub.add_parser("train", help="build a model from a labeled CSV")
    t.add_argument("csv", type=Path)
    _add_csv(t)
    _add_params(t)
    t.add_argument("--scale", action="store_true")
    t.add_argument("--out", type=Path, required=True, help="model file (JSON)")

    p = sub.add_parser("predict", help="classify CSV rows with a saved model, one JSON object per line")
    p.add_argument("model", type=Path)
    p.add_argument("csv", type=Path)
    _add_csv(p, label_default=None)
    p.add_argument("--mode", choices=MODES, default="stateless")
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    p.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON lines")

    e = sub.add_parser("evaluate", help="cross-validate or holdout-test one parameter setting")
    _add_protocol(e)
    _add_params(e)

    s = sub.add_parser("sweep", help="evaluate every cell of a comma-separated parameter grid")
    _add_protocol(s)
    _add_params(s, grid=True)

    r = sub.add_parser("reproduce", help="run a manifest of experiments and check its bounds")
    r.add_argument("manifest", type=Path)
    r.add_argument("--seed", type=int, help="override every experiment's master seed")
    r.add_argument("--out", type=Path, help="also write the JSON report here")
    r.add_argument("--json", action="store_true", help="print the JSON report instead of the table")
    r.add_argument("--timing", action="store_true", help="include wall-clock seconds in the JSON")
    r.add_argument("--quiet", action="store_true", help="no progress lines on stderr")
    return parser


def _params(args) -> HyperParams:
    try:
        return HyperParams(args.k, args.e, args.b, args.alpha)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _write(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def cmd_generate(args) -> int:
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    if args.noise < 0:
        raise UsageError("--noise must be non-negative")
    if args.kind == "circles" and not 0 < args.ratio < 1:
        raise UsageError("--ratio must lie strictly between 0 and 1")
    if args.kind == "moons":
        ds = generate_moons(args.n, args.noise, args.seed)
    else:
        ds = generate_circles(args.n, args.noise, args.ratio, args.seed)
    if args.out is None:
        save_csv(ds, sys.stdout)
    else:
        save_csv(ds, args.out)
    return 0


def cmd_train(args) -> int:
    params = _params(args)
    ds = load_csv(args.csv, _label_column(args.label_column), not args.no_header)
    model = build_network(ds, params, scale=args.scale)
    save_model(model, args.out)
    print(f"trained on {len(ds)} rows, {len(model.classes)} classes, {len(model.edges())} edges -> {args.out}",
          file=sys.stderr)
    return 0


def _rows(path: Path, label_column, header: bool):
    try:
        return load_csv(path, label_column, header, allow_unlabeled=True).X
    except DataError as exc:
        if str(exc).endswith("no data rows"):
            return []
        raise


def cmd_predict(args) -> int:
    model = load_model(args.model)
    rows = _rows(args.csv, _label_column(args.label_column), not args.no_header)
    lines = []
    for i, s in enumerate(score_batch(model, rows, args.mode)):
        lines.append(json.dumps({"index": i, "decided": s.decided, "H": s.H, "W": s.W, "T": s.T}) + "\n")
    _write("".join(lines), args.out)
    return 0


def _config(args, grid: dict) -> ExperimentConfig:
    if args.csv is not None:
        source = {"csv": str(args.csv), "label": _label_column(args.label_column), "header": not args.no_header}
    else:
        source = {"generator": args.generator, "n": args.n, "noise": args.noise}
        if args.generator == "circles":
            source["inner_radius_ratio"] = args.ratio
    name = args.csv.stem if args.csv is not None else args.generator
    try:
        return ExperimentConfig(name, source, grid, protocol=args.protocol, folds=args.folds,
                                repeats=args.repeats, train_fraction=args.train_fraction, seeds=args.seeds,
                                mode=args.mode, scale=args.scale, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _report(rep, as_json: bool) -> int:
    print(reports_json([rep]) if as_json else summary_table([rep]))
    return 0


def cmd_evaluate(args) -> int:
    params = _params(args)
    config = _config(args, {k: [v] for k, v in params.as_dict().items()})
    return _report(evaluate(config), args.json)


def cmd_sweep(args) -> int:
    config = _config(args, {"k": args.k, "e": args.e, "b": args.b, "alpha": args.alpha})
    return _report(evaluate(config), args.json)


def cmd_reproduce(args) -> int:
    log = None if args.quiet else (lambda msg: print(msg, file=sys.stderr, flush=True))
    reports, table, ok = run_experiment_suite(args.manifest, seed=args.seed, log=log)
    text = reports_json(reports, timing=args.timing)
    if args.out is not None:
        args.out.write_text(text + "\n")
    print(text if args.json else table)
    return 0 if ok else 1


COMMANDS = {"generate": cmd_generate, "train": cmd_train, "predict": cmd_predict,
            "evaluate": cmd_evaluate, "sweep": cmd_sweep, "reproduce": cmd_reproduce}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except (OSError, ValueError, KeyError) as exc:
        print(f"bcnet {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
