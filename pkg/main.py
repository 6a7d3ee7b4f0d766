#!/usr/bin/env python3
"""
Main entry point for the localization toolkit.

Subcommands: simulate, calibrate, evaluate, dataset, train, predict, sweep.
Exit codes: 0 success, 1 runtime error, 2 usage error.
"""
import argparse
import csv
import dataclasses
import logging
import sys

import numpy as np

import config
from config import load_config_file, setup_logging
from core import Position, load_scenario, save_scenario
from errors import InputError, LocalizationError
from evaluation import evaluate_methods, render_markdown, write_report
from filters import OutlierMode, parse_methods
from locnet import (
    Mlp,
    MlpConfig,
    dataset_from_trace,
    read_calibration_csv,
    read_dataset_csv,
    render_sweep_csv,
    render_sweep_markdown,
    stratified_kfold_eval,
    sweep,
    train,
    write_dataset_csv,
)
from pathloss import calibrate
from simulator import NoiseModel, builtin_scenarios, simulate
from traces import TraceStore, read_trace_csv, read_truth_csv, write_trace_csv, write_truth_csv
from utils import parse_int_list

logger = logging.getLogger(__name__)

PREDICTION_HEADER = ["true_x_m", "true_y_m", "pred_x_m", "pred_y_m", "error_m", "label"]


class UsageError(Exception):
    """Bad flag combination found after parsing; reported like an argparse error."""


def _int_list(text):
    try:
        return parse_int_list(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _as_int_tuple(value):
    # Config files may give grids as JSON lists instead of "1,2,3"
    if isinstance(value, (list, tuple)):
        return tuple(int(v) for v in value)
    return value


# Shared flag groups

def _add_scenario_flags(parser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--builtin", choices=sorted(builtin_scenarios()),
                       help="Use a builtin scenario")
    group.add_argument("--scenario", help="Scenario JSON file")


def _add_trace_flags(parser, truth_required=False):
    parser.add_argument("--trace", help="Trace CSV file")
    parser.add_argument("--truth", help="Ground-truth CSV file"
                        + ("" if truth_required else " (overrides the scenario's intervals)"))


def _add_network_flags(parser):
    parser.add_argument("--layers", type=int, default=config.DEFAULT_HIDDEN_LAYERS,
                        help="Hidden layers")
    parser.add_argument("--neurons", type=int, default=config.DEFAULT_NEURONS,
                        help="Neurons per hidden layer")
    parser.add_argument("--epochs", type=int, default=config.DEFAULT_EPOCHS)
    parser.add_argument("--learning-rate", type=float, default=config.DEFAULT_LEARNING_RATE)
    parser.add_argument("--batch-size", type=int, default=config.DEFAULT_BATCH_SIZE)
    parser.add_argument("--seed", type=int, default=config.DEFAULT_SEED)


def build_parser():
    """Top-level parser plus one subparser per command."""
    parser = argparse.ArgumentParser(prog="localization",
                                     description="RSSI indoor localization toolkit")
    parser.add_argument("--config", help="JSON file with flag defaults (keys mirror flag names)")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    p = subparsers.add_parser("simulate", help="Generate a synthetic trace and its ground truth")
    _add_scenario_flags(p)
    p.add_argument("--sigma", type=float, default=config.DEFAULT_SIGMA_DB, help="Shadowing sigma in dB")
    p.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    p.add_argument("--sample-period", type=int, default=config.DEFAULT_SAMPLE_PERIOD_MS)
    p.add_argument("--jitter", type=int, default=config.DEFAULT_JITTER_MS)
    p.add_argument("--no-walls", action="store_true", help="Ignore wall attenuation")
    p.add_argument("--out", help="Trace CSV to write")
    p.add_argument("--truth-out", help="Ground-truth CSV to write")
    p.set_defaults(handler=cmd_simulate)

    p = subparsers.add_parser("calibrate", help="Grid-search the path loss constants A and n")
    _add_scenario_flags(p)
    _add_trace_flags(p)
    p.add_argument("--calibration", help="Calibration CSV (timestamp_ms,beacon_id,rssi_dbm,true_x_m,true_y_m)")
    p.add_argument("--tick", type=int, default=config.DEFAULT_DATASET_TICK_MS,
                   help="Alignment tick in ms when calibrating from a trace")
    p.add_argument("--workers", type=int, default=config.DEFAULT_WORKERS)
    p.add_argument("--out", help="Scenario JSON to write with the calibrated constants")
    p.set_defaults(handler=cmd_calibrate)

    p = subparsers.add_parser("evaluate", help="Compare localization methods on a trace")
    _add_scenario_flags(p)
    _add_trace_flags(p)
    p.add_argument("--methods", default=config.DEFAULT_METHODS,
                   help="Comma-separated method specs: raw, kalman, lookback[:K[:mode]], hybrid[:K[:mode]]")
    p.add_argument("--method", help="Single method spec (overrides --methods)")
    p.add_argument("--k", type=int, default=config.DEFAULT_LOOKBACK_K,
                   help="Window size for lookback/hybrid specs given without K")
    p.add_argument("--outlier", choices=[m.value for m in OutlierMode],
                   default=config.DEFAULT_OUTLIER_MODE)
    p.add_argument("--q", type=float, default=config.DEFAULT_KALMAN_Q, help="Kalman process noise")
    p.add_argument("--r", type=float, default=config.DEFAULT_KALMAN_R, help="Kalman measurement noise")
    p.add_argument("--eval-period", type=int, default=config.DEFAULT_EVAL_PERIOD_MS)
    p.add_argument("--max-staleness", type=int, default=config.DEFAULT_MAX_STALENESS_MS)
    p.add_argument("--workers", type=int, default=config.DEFAULT_WORKERS)
    p.add_argument("--title", default="")
    p.add_argument("--out", help="Report file (.md for markdown, otherwise CSV); stdout if omitted")
    p.set_defaults(handler=cmd_evaluate)

    p = subparsers.add_parser("dataset", help="Build a network dataset from a trace")
    _add_scenario_flags(p)
    _add_trace_flags(p)
    p.add_argument("--tick", type=int, default=config.DEFAULT_DATASET_TICK_MS)
    p.add_argument("--max-staleness", type=int, default=config.DEFAULT_MAX_STALENESS_MS)
    p.add_argument("--out", help="Dataset CSV to write")
    p.set_defaults(handler=cmd_dataset)

    p = subparsers.add_parser("train", help="Train a network on a dataset")
    p.add_argument("--dataset", help="Dataset CSV")
    _add_network_flags(p)
    p.add_argument("--folds", type=int, default=0,
                   help="Also report stratified k-fold error with this many folds")
    p.add_argument("--workers", type=int, default=config.DEFAULT_WORKERS)
    p.add_argument("--out", help="Model JSON to write")
    p.set_defaults(handler=cmd_train)

    p = subparsers.add_parser("predict", help="Predict positions with a saved model")
    p.add_argument("--model", help="Model JSON")
    p.add_argument("--dataset", help="Dataset CSV")
    p.add_argument("--out", help="Prediction CSV to write")
    p.set_defaults(handler=cmd_predict)

    p = subparsers.add_parser("sweep", help="Cross-validate a grid of hidden layers x epochs")
    p.add_argument("--dataset", help="Dataset CSV")
    _add_network_flags(p)
    p.add_argument("--epochs-grid", type=_int_list, default=_int_list(config.DEFAULT_SWEEP_EPOCHS))
    p.add_argument("--layers-grid", type=_int_list, default=_int_list(config.DEFAULT_SWEEP_LAYERS))
    p.add_argument("--folds", type=int, default=config.DEFAULT_FOLDS)
    p.add_argument("--workers", type=int, default=config.DEFAULT_WORKERS)
    p.add_argument("--title", default="")
    p.add_argument("--out", help="Grid file (.md for markdown, otherwise CSV); stdout if omitted")
    p.set_defaults(handler=cmd_sweep)

    return parser, subparsers.choices


def _require(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) in (None, "")]
    if missing:
        raise UsageError(f"missing required option(s): {', '.join(missing)}")


def _resolve_scenario(args):
    if args.builtin:
        scenario = builtin_scenarios()[args.builtin]
    elif args.scenario:
        scenario = load_scenario(args.scenario)
    else:
        raise UsageError("one of --builtin or --scenario is required")
    if getattr(args, "truth", None):
        scenario = scenario.with_ground_truth(read_truth_csv(args.truth))
    return scenario


def _mlp_config(args):
    try:
        return MlpConfig(
            hidden_layers=args.layers,
            neurons_per_layer=args.neurons,
            epochs=args.epochs,
            learning_rate=args.learning_rate,
            batch_size=args.batch_size,
            seed=args.seed,
        )
    except InputError as e:
        raise UsageError(str(e))


def _write_text(text, path):
    if path:
        with open(path, "w", newline="") as f:
            f.write(text)
        logger.info(f"Wrote {path}")
    else:
        sys.stdout.write(text)


def _log_trace_summary(store, scenario):
    """Per-beacon RSSI summary of a trace, logged before any method runs."""
    for beacon_id in scenario.beacon_ids:
        stats = store.get_rssi_stats(beacon_id)
        if not stats["count"]:
            logger.warning(f"Beacon {beacon_id}: no samples in trace")
            continue
        logger.info(f"Beacon {beacon_id}: {stats['count']} samples, mean {stats['mean']:.1f} dBm, "
                    f"std {stats['std']:.1f}, p05/p50/p95 {stats['p05']:.1f}/{stats['p50']:.1f}/"
                    f"{stats['p95']:.1f}")


# Commands

def cmd_simulate(args):
    _require(args, "out", "truth_out")
    scenario = _resolve_scenario(args)
    if args.no_walls:
        scenario = scenario.without_walls()
    try:
        noise = NoiseModel(args.sigma, args.seed, args.sample_period, args.jitter)
    except InputError as e:
        raise UsageError(str(e))

    samples = simulate(scenario, noise)
    _log_trace_summary(TraceStore(samples), scenario)
    count = write_trace_csv(samples, args.out)
    write_truth_csv(scenario.ground_truth, args.truth_out)
    print(f"{count} samples written to {args.out}")
    return 0


def cmd_calibrate(args):
    scenario = _resolve_scenario(args)
    positions = [b.position for b in scenario.beacons]
    if args.calibration:
        labeled = read_calibration_csv(args.calibration, scenario.beacon_ids)
    elif args.trace:
        dataset = dataset_from_trace(read_trace_csv(args.trace), scenario, args.tick)
        labeled = [(tuple(rssi), Position(float(t[0]), float(t[1])))
                   for rssi, t in zip(dataset.inputs, dataset.targets)]
    else:
        raise UsageError("one of --calibration or --trace is required")

    model = calibrate(labeled, positions, workers=args.workers)
    print(f"A = {model.a_ref:g} dBm, n = {model.path_loss_exp:g}")
    if args.out:
        beacons = tuple(dataclasses.replace(b, a_ref=model.a_ref, path_loss_exp=model.path_loss_exp)
                        for b in scenario.beacons)
        save_scenario(dataclasses.replace(scenario, beacons=beacons), args.out)
    return 0


def _expand_spec(spec, k):
    # "lookback" and "hybrid" without a window take --k
    parts = spec.strip().split(":")
    if parts[0].strip().lower() in ("lookback", "hybrid") and len(parts) == 1:
        return f"{parts[0]}:{k}"
    return spec


def cmd_evaluate(args):
    _require(args, "trace")
    text = args.method if args.method else args.methods
    specs = ",".join(_expand_spec(s, args.k) for s in str(text).split(",") if s.strip())
    try:
        methods = parse_methods(specs, OutlierMode.parse(args.outlier), args.q, args.r)
    except InputError as e:
        raise UsageError(str(e))

    scenario = _resolve_scenario(args)
    trace = TraceStore(read_trace_csv(args.trace))
    _log_trace_summary(trace, scenario)
    reports = evaluate_methods(trace, scenario, methods, args.eval_period,
                               args.max_staleness, workers=args.workers)
    if args.out:
        write_report(reports, args.out, args.title)
    else:
        sys.stdout.write(render_markdown(reports, args.title))
    return 0


def cmd_dataset(args):
    _require(args, "trace", "out")
    scenario = _resolve_scenario(args)
    dataset = dataset_from_trace(read_trace_csv(args.trace), scenario, args.tick, args.max_staleness)
    write_dataset_csv(dataset, args.out)
    print(f"{len(dataset)} samples written to {args.out}")
    return 0


def cmd_train(args):
    _require(args, "dataset", "out")
    mlp_config = _mlp_config(args)
    dataset = read_dataset_csv(args.dataset)
    if args.folds:
        mean_cm, std_cm = stratified_kfold_eval(dataset, mlp_config, args.folds, args.workers)
        print(f"{args.folds}-fold error: {mean_cm:.2f} ± {std_cm:.2f} cm")
    model = train(dataset, mlp_config)
    model.save(args.out)
    return 0


def cmd_predict(args):
    _require(args, "model", "dataset", "out")
    model = Mlp.load(args.model)
    dataset = read_dataset_csv(args.dataset)
    predictions = model.predict(dataset.inputs)
    errors = np.hypot(*(predictions - dataset.targets).T)

    with open(args.out, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(PREDICTION_HEADER)
        for target, pred, error, label in zip(dataset.targets, predictions, errors, dataset.labels):
            writer.writerow([repr(float(target[0])), repr(float(target[1])),
                             repr(float(pred[0])), repr(float(pred[1])), repr(float(error)), label])
    logger.info(f"Mean prediction error {float(np.mean(errors)) * 100:.2f} cm over {len(dataset)} samples")
    return 0


def cmd_sweep(args):
    _require(args, "dataset")
    epochs = _as_int_tuple(args.epochs_grid)
    layers = _as_int_tuple(args.layers_grid)
    base_config = _mlp_config(args)
    for l in layers:
        try:
            dataclasses.replace(base_config, hidden_layers=l)
        except InputError as e:
            raise UsageError(f"invalid --layers-grid: {e}")

    dataset = read_dataset_csv(args.dataset)
    result = sweep(dataset, base_config, epochs, layers, args.folds, args.workers)
    if args.out and not str(args.out).endswith(".md"):
        _write_text(render_sweep_csv(result), args.out)
    else:
        _write_text(render_sweep_markdown(result, args.title), args.out)
    return 0


def main(argv=None):
    """Parse arguments, apply config-file defaults and run the chosen command."""
    setup_logging()
    parser, subparsers = build_parser()
    try:
        args = parser.parse_args(argv)
        subparser = subparsers[args.command]
        if args.config:
            allowed = {a.dest for a in subparser._actions} - {"help", "handler"}
            settings = load_config_file(args.config, allowed)
            # Flags > config file > environment > defaults
            subparser.set_defaults(**settings)
            args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    except LocalizationError as e:
        logger.error(str(e))
        return 1

    try:
        return args.handler(args)
    except UsageError as e:
        subparser.print_usage(sys.stderr)
        sys.stderr.write(f"{subparser.prog}: error: {e}\n")
        return 2
    except (LocalizationError, OSError) as e:
        logger.error(str(e))
        return 1


if __name__ == "__main__":
    sys.exit(main())
