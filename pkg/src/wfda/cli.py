"""Command-line interface: ``wfda fit | transform | evaluate | export``.

Exit codes: 0 success, 2 configuration or validation error, 3 numerical or
degeneracy error. Options may also come from a JSON file given with
``--config``; explicit flags take precedence over it.
"""
import argparse
import csv
import json
import os
import sys
import warnings

import numpy as np

from .autoweight import AwConfig
from .dataset import SplitSpec, ingest_csv, ingest_image_dir, read_csv_matrix, split
from .errors import InvalidInputError, NumericalError, WfdaError
from .evaluate import evaluate_model, export_fisherfaces, export_weights, run_experiment_matrix
from .kfda import KernelSpec
from .linalg import DEFAULT_RIDGE
from .methods import fit_method, parse_method, parse_methods
from .model import load_model, save_model, transform
from .weighting import WeightMatrix


class ConfigError(InvalidInputError):
    pass


def _add_dataset_args(p):
    g = p.add_argument_group("dataset")
    g.add_argument("--csv", help="CSV file, one sample per row")
    g.add_argument("--label-col", help="label column name (with --header) or index")
    g.add_argument("--header", action="store_true", help="CSV has a header row")
    g.add_argument("--image-dir", help="directory of <class>/<image>.pgm")
    g.add_argument("--width", type=int, help="image width after resampling")
    g.add_argument("--height", type=int, help="image height after resampling")
    g.add_argument("--max-classes", type=int, help="use only the first N class folders")


def _add_model_args(p):
    g = p.add_argument_group("model")
    g.add_argument("--kernel", default="rbf", choices=["rbf", "linear", "polynomial"])
    g.add_argument("--gamma", type=float, help="RBF gamma (default 1/(d * mean variance))")
    g.add_argument("--degree", type=int, default=2)
    g.add_argument("--coef0", type=float, default=1.0)
    g.add_argument("--p", type=int, help="subspace dimension (default c-1 within rank bounds)")
    g.add_argument("--ridge", type=float, default=DEFAULT_RIDGE)
    g.add_argument("--knn-k", type=int, default=1)
    g.add_argument("--pow-m", type=int, default=3)
    g.add_argument("--aw-k", type=int, help="AW sparsity budget (default c-1)")
    g.add_argument("--max-iters", type=int, default=50)
    g.add_argument("--tol", type=float, default=1e-6)
    g.add_argument("--armijo", type=float, default=1e-4)
    g.add_argument("--backtrack", type=float, default=0.5)
    g.add_argument("--initial-step", type=float, default=1.0)
    g.add_argument("--max-backtracks", type=int, default=30)
    g.add_argument("--train-fraction", type=float, default=0.66)
    g.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = argparse.ArgumentParser(prog="wfda", description="Weighted Fisher discriminant analysis.")
    parser.add_argument("--config", help="JSON file with option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit one method on the training split")
    _add_dataset_args(fit)
    _add_model_args(fit)
    fit.add_argument("--method", help="method tag, e.g. fda, knn:3, w-kfda:apac, aw-kfda")
    fit.add_argument("--space", default="input", choices=["input", "feature"])
    fit.add_argument("--out", default=".", help="output directory")

    tr = sub.add_parser("transform", help="embed samples with a saved model")
    tr.add_argument("--model", help="model file written by fit")
    tr.add_argument("--input", help="CSV, one sample per row")
    tr.add_argument("--label-col", help="column to drop from the input")
    tr.add_argument("--header", action="store_true")
    tr.add_argument("--out", help="output CSV (default: standard output)")

    ev = sub.add_parser("evaluate", help="run the 1-NN experiment matrix")
    _add_dataset_args(ev)
    _add_model_args(ev)
    ev.add_argument("--methods", help="comma-separated method tags")
    ev.add_argument("--space", default="input", choices=["input", "feature", "both"])
    ev.add_argument("--out", help="report file")
    ev.add_argument("--format", default="csv", choices=["csv", "json"])

    ex = sub.add_parser("export", help="export Fisherfaces or weights of a saved model")
    ex.add_argument("what", choices=["fisherfaces", "weights"])
    ex.add_argument("--model", help="model file written by fit")
    ex.add_argument("--count", type=int, default=4)
    ex.add_argument("--width", type=int)
    ex.add_argument("--height", type=int)
    ex.add_argument("--out", help="directory (fisherfaces) or CSV path (weights)")
    return parser, sub


# checked after the config file is merged, so the file may supply them
REQUIRED = {"fit": ("method",), "transform": ("model", "input"), "evaluate": ("methods",),
            "export": ("model", "out")}


def parse_args(argv):
    parser, sub = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config) as fh:
                config = json.load(fh)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(config, dict):
            raise ConfigError("config file must hold a JSON object")
        config = {k.replace("-", "_"): v for k, v in config.items()}
        sub.choices[args.command].set_defaults(**config)
        args = parser.parse_args(argv)
    missing = [f"--{name.replace('_', '-')}" for name in REQUIRED[args.command]
               if getattr(args, name) is None]
    if missing:
        raise ConfigError(f"{args.command}: missing required option(s) {', '.join(missing)}")
    return args


def load_dataset(args):
    if bool(args.csv) == bool(args.image_dir):
        raise ConfigError("give exactly one of --csv or --image-dir")
    if args.csv:
        if args.label_col is None:
            raise ConfigError("--csv needs --label-col")
        return ingest_csv(args.csv, args.label_col, header=args.header), os.path.basename(args.csv)
    if not args.width or not args.height:
        raise ConfigError("--image-dir needs --width and --height")
    data = ingest_image_dir(args.image_dir, args.width, args.height, args.max_classes)
    return data, os.path.basename(os.path.normpath(args.image_dir))


def kernel_from_args(args):
    if args.kernel == "rbf":
        return KernelSpec("rbf", args.gamma)
    if args.kernel == "polynomial":
        return KernelSpec("polynomial", degree=args.degree, coef0=args.coef0)
    return KernelSpec("linear")


def aw_config_from_args(args):
    return AwConfig(k=args.aw_k, max_outer_iters=args.max_iters, tol=args.tol,
                    armijo=args.armijo, backtrack=args.backtrack,
                    initial_step=args.initial_step, max_backtracks=args.max_backtracks)


def cmd_fit(args):
    data, _ = load_dataset(args)
    specs = parse_method(args.method, args.space, knn_k=args.knn_k, aw_k=args.aw_k,
                         pow_m=args.pow_m)
    spec = specs[0]
    train, test = split(data, SplitSpec(args.train_fraction, args.seed))
    model, report = fit_method(train, spec, kernel_from_args(args), args.p,
                               aw_config_from_args(args), args.ridge, standardize=True)
    train_acc, test_acc = evaluate_model(model, train, test)
    os.makedirs(args.out, exist_ok=True)
    model_path = os.path.join(args.out, "model.json")
    save_model(model, model_path)
    doc = {"method": spec.tag, "kind": model.kind, "p": model.p,
           "eigenvalues": [float(v) for v in model.eigenvalues],
           "train_accuracy": train_acc,
           "test_accuracy": None if np.isnan(test_acc) else test_acc,
           "seed": args.seed, "train_fraction": args.train_fraction}
    if report is not None:
        doc["fit"] = report.to_dict()
    with open(os.path.join(args.out, "report.json"), "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    print(f"{spec.tag}: p={model.p} train={train_acc:.4f} "
          f"test={'n/a' if np.isnan(test_acc) else f'{test_acc:.4f}'} -> {model_path}")
    return 0


def cmd_transform(args):
    model = load_model(args.model)
    if os.path.exists(args.input) and os.path.getsize(args.input) == 0:
        raise ConfigError(f"{args.input}: empty input")
    X, _ = read_csv_matrix(args.input, args.label_col, header=args.header)
    if X.shape[0] != model.n_features:
        raise ConfigError(f"model expects {model.n_features} features, input has {X.shape[0]}")
    Z = transform(model, X)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        for row in Z:
            writer.writerow([repr(float(v)) for v in row])
    finally:
        if args.out:
            out.close()
    return 0


def cmd_evaluate(args):
    data, dataset_id = load_dataset(args)
    specs = parse_methods(args.methods, args.space, knn_k=args.knn_k, aw_k=args.aw_k,
                          pow_m=args.pow_m)
    report = run_experiment_matrix(data, specs, SplitSpec(args.train_fraction, args.seed),
                                   kernel_from_args(args), args.p, aw_config_from_args(args),
                                   args.ridge, dataset_id)
    text = report.to_json() if args.format == "json" else report.to_csv()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    sys.stdout.write(report.format_table())
    return 0


def cmd_export(args):
    model = load_model(args.model)
    if args.what == "fisherfaces":
        if not args.width or not args.height:
            raise ConfigError("export fisherfaces needs --width and --height")
        paths = export_fisherfaces(model, args.width, args.height, args.count, args.out)
        print(f"wrote {len(paths)} Fisherface(s) to {args.out}")
        return 0
    if model.weights is None:
        raise ConfigError("model carries no weight matrix")
    export_weights(WeightMatrix(model.weights, model.method), args.out)
    print(f"wrote {model.weights.shape[0]}x{model.weights.shape[1]} weights to {args.out}")
    return 0


COMMANDS = {"fit": cmd_fit, "transform": cmd_transform, "evaluate": cmd_evaluate,
            "export": cmd_export}


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"wfda: warning: {message}", file=sys.stderr)


def main(argv=None):
    with warnings.catch_warnings():
        warnings.showwarning = _show_warning
        try:
            args = parse_args(argv)
            return COMMANDS[args.command](args)
        except SystemExit as exc:  # argparse: usage errors exit 2, --help exits 0
            return exc.code if isinstance(exc.code, int) else 2
        except NumericalError as exc:
            print(f"wfda: numerical error: {exc}", file=sys.stderr)
            return 3
        except (WfdaError, OSError) as exc:
            print(f"wfda: error: {exc}", file=sys.stderr)
            return 2


if __name__ == "__main__":
    sys.exit(main())
