"""Command-line pipeline: ingest, decompose, train, predict, evaluate, recommend.

Every subcommand reads defaults from a ``key = value`` config file given by
``--config`` or ``$WRNN_CONFIG``; command-line flags override it.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import dwt, evaluation, ingest, lifting, network
from .config import CONFIG_ENV, load_config


def _series(path):
    return ingest.load_csv(path)


def cmd_ingest(args, cfg):
    if bool(args.src_dir) == bool(args.csv):
        raise ValueError("give exactly one of --src-dir or --csv")
    series = ingest.load_pagecounts_dir(args.src_dir) if args.src_dir else ingest.load_csv(args.csv)
    out = args.out or cfg.output
    if not out:
        raise ValueError("no output path (use --out)")
    ingest.write_csv(series, out)
    print(f"wrote {len(series)} hourly values to {out}")


def cmd_decompose(args, cfg):
    series = _series(args.series or cfg.input)
    levels = args.levels or cfg.levels
    out = args.out or cfg.output
    if args.method == "filterbank":
        bank = dwt.get_bank(args.wavelet, args.extension)
        coeffs = dwt.decompose_undecimated(series, levels, bank, causal=args.causal)
        residual = None
        if args.verify:
            pyr = dwt.decompose_decimated(series, levels, bank)
            residual = float(np.max(np.abs(dwt.reconstruct(pyr, bank) - series.values)))
    else:
        stage = lifting.STAGES[args.stage]
        details, approx = lifting.lift_multilevel(series, stage, levels)
        coeffs = dwt.WaveletCoeffs(levels, lifting.hold_expand(details, approx, len(series)))
        residual = None
        if args.verify:
            back = lifting.inverse_multilevel(details, approx, stage)
            residual = float(np.max(np.abs(back - series.values)))
    if out:
        coeffs.to_csv(out)
        print(f"wrote {coeffs.source_length} x {levels + 1} coefficients to {out}")
    if residual is not None:
        print(f"max reconstruction residual: {residual:.3e}")


def cmd_train(args, cfg):
    series = _series(args.series or cfg.input)
    model_path = args.model or cfg.model
    if not model_path:
        raise ValueError("no model path (use --model)")
    train_part = series
    if cfg.holdout_hours:
        train_part, _ = evaluation.split_series(series, cfg.holdout_hours)
    model, report = network.train(train_part, cfg.train_config(), cfg.topology())
    network.save_model(model, model_path)
    curve = args.curve or cfg.curve
    if curve:
        report.to_csv(curve)
    print(f"trained {report.final_epoch} epochs on {len(train_part)} hours, "
          f"final mse {report.mse[-1]:.6g}; model saved to {model_path}")


def cmd_predict(args, cfg):
    model = network.load_model(args.model or cfg.model)
    series = _series(args.series or cfg.input)
    pred = network.predict_series(model, series, closed_loop=args.closed_loop)
    out = args.out or cfg.output
    stamps = series.timestamps()
    lines = ["hour,timestamp,predicted"]
    for i, v in zip(pred.indices, pred.values):
        lines.append(f"{i},{stamps[i].strftime('%Y-%m-%dT%H:%M:%SZ')},{float(v)!r}")
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"wrote {len(pred)} forecasts to {out}")
    else:
        sys.stdout.write(text)


def cmd_evaluate(args, cfg):
    model = network.load_model(args.model or cfg.model)
    series = _series(args.series or cfg.input)
    holdout = args.holdout if args.holdout is not None else cfg.holdout_hours
    report = evaluation.evaluate(model, series, holdout)
    out = args.out or cfg.output
    summary = report.summary()
    if out:
        evaluation.emit_plot_data(report, out)
        with open(out + ".summary", "w", encoding="utf-8", newline="\n") as fh:
            for k, v in summary.items():
                fh.write(f"{k} = {v}\n")
    for k, v in summary.items():
        print(f"{k} = {v}")


def cmd_recommend(args, cfg):
    report = evaluation.read_plot_data(args.report)
    plan = evaluation.recommend_capacity(report, args.headroom)
    out = args.out or cfg.output
    if not out:
        raise ValueError("no output path (use --out)")
    plan.to_csv(out)
    print(f"wrote capacity plan for {plan.hours.size} hours to {out}")


def build_parser():
    parser = argparse.ArgumentParser(prog="wrnn", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help=f"key = value config file (default: ${CONFIG_ENV})")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build an hourly series CSV")
    p.add_argument("--src-dir", help="directory of uncompressed pagecounts-YYYYMMDD-HH0000 files")
    p.add_argument("--csv", help="existing timestamp,count CSV to validate")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("decompose", help="write the per-hour wavelet coefficient matrix")
    p.add_argument("series", nargs="?")
    p.add_argument("--method", choices=("filterbank", "lifting"), default="filterbank")
    p.add_argument("--levels", type=int)
    p.add_argument("--wavelet", choices=sorted(dwt.WAVELETS), default="bior3.7")
    p.add_argument("--extension", choices=dwt.POLICIES, default="symmetric")
    p.add_argument("--stage", choices=sorted(lifting.STAGES), default="linear")
    p.add_argument("--causal", action="store_true", help="causally aligned coefficients")
    p.add_argument("--verify", action="store_true", help="print the round-trip residual")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("train", help="train a model on all but the hold-out hours")
    p.add_argument("series", nargs="?")
    p.add_argument("--model")
    p.add_argument("--curve", help="training-curve CSV")
    for name, typ in (("levels", int), ("horizon", int), ("epochs", int), ("seed", int),
                      ("learning-rate", float), ("momentum", float), ("lr-increase", float),
                      ("lr-decrease", float), ("max-error-growth", float),
                      ("train-fraction", float), ("holdout-hours", int)):
        p.add_argument(f"--{name}", type=typ)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="r-step-ahead forecasts over a series")
    p.add_argument("series", nargs="?")
    p.add_argument("--model")
    p.add_argument("--closed-loop", action="store_true",
                   help="feed back the model's own forecasts instead of observations")
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score forecasts on the hold-out suffix")
    p.add_argument("series", nargs="?")
    p.add_argument("--model")
    p.add_argument("--holdout", type=int)
    p.add_argument("--out", help="plot CSV (a .summary file is written next to it)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("recommend", help="capacity plan from an evaluation/plot CSV")
    p.add_argument("report")
    p.add_argument("--headroom", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_recommend)
    return parser


_OVERRIDES = ("levels", "horizon", "epochs", "seed", "learning_rate", "momentum",
              "lr_increase", "lr_decrease", "max_error_growth", "train_fraction",
              "holdout_hours")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        cfg = load_config(args.config)
        cfg = cfg.updated(**{k: getattr(args, k, None) for k in _OVERRIDES})
        args.func(args, cfg)
    except (ValueError, OSError, network.TrainingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
