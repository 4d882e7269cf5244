import argparse
import logging
import sys

from .data import save_dataset
from .errors import ConfigError, TreeRegError
from .harness import (
    build_dataset,
    metrics_frame,
    run_baseline_trees,
    run_distill,
    run_eval,
    run_sweep,
    run_train,
)
from .options import PRESETS, RunConfig

logger = logging.getLogger("CLI")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_PARTIAL_SWEEP = 3

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"

# flag -> (group, field)
FLAG_OPTIONS = {
    "dataset": ("data", "dataset"),
    "csv": ("data", "csv_path"),
    "schema": ("data", "schema_path"),
    "data_seed": ("data", "data_seed"),
    "family": ("model", "family"),
    "regularizer": ("regularizer", "kind"),
    "lam": ("regularizer", "lam"),
    "h": ("regularizer", "h"),
    "prune_fraction": ("regularizer", "prune_fraction"),
    "epochs": ("optimizer", "epochs"),
    "batch_size": ("optimizer", "batch_size"),
    "learning_rate": ("optimizer", "learning_rate"),
    "seed": ("experiment", "seed"),
    "output_dir": ("experiment", "output_dir"),
    "run_name": ("experiment", "run_name"),
    "regions": ("regions", "kind"),
    "k": ("regions", "k"),
    "region_map": ("regions", "region_map"),
    "kinds": ("sweep", "kinds"),
    "lambdas": ("sweep", "lambdas"),
    "seeds": ("sweep", "seeds"),
    "workers": ("sweep", "workers"),
}


def _config_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("run options")
    group.add_argument("--preset", choices=sorted(PRESETS), help="start from an experiment preset")
    group.add_argument("--config", help="JSON config file applied on top of the preset")
    group.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="GROUP.FIELD=VALUE", help="override one option"
    )
    group.add_argument("--dataset")
    group.add_argument("--csv", help="CSV file for --dataset csv")
    group.add_argument("--schema", help="JSON CSV schema")
    group.add_argument("--data-seed", type=int)
    group.add_argument("--family", help="mlp, gru, hmm or gru-hmm")
    group.add_argument("--regularizer", help="none, l1, l2, tree-global, tree-regional-l1 or tree-regional-l0")
    group.add_argument("--lam", type=float, help="regularization strength")
    group.add_argument("--h", type=int, help="minimum leaf size of APL trees")
    group.add_argument("--prune-fraction", type=float)
    group.add_argument("--epochs", type=int)
    group.add_argument("--batch-size", type=int)
    group.add_argument("--learning-rate", type=float)
    group.add_argument("--seed", type=int)
    group.add_argument("--output-dir")
    group.add_argument("--run-name")
    group.add_argument("--regions", help="none, dataset, kmeans or file")
    group.add_argument("--k", type=int, help="number of k-means regions")
    group.add_argument("--region-map", help="JSON region map (implies --regions file)")
    group.add_argument("--kinds", nargs="+", help="regularizers to sweep")
    group.add_argument("--lambdas", nargs="+", type=float, help="lambda grid to sweep")
    group.add_argument("--seeds", nargs="+", type=int, help="seeds to sweep")
    group.add_argument("--workers", type=int, help="parallel sweep members")


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then preset, then --config file, then dedicated flags, then --set overrides."""
    config = RunConfig.preset(args.preset) if args.preset else None
    if args.config:
        config = RunConfig.load(args.config, base=config)
    config = config or RunConfig()
    if args.region_map and not args.regions:
        args.regions = "file"
    for flag, (group, name) in FLAG_OPTIONS.items():
        value = getattr(args, flag, None)
        if value is not None:
            config.update({group: {name: value}})
    for assignment in args.overrides:
        config.set(assignment)
    return config.validate()


def _print_metrics(metrics) -> None:
    print(metrics_frame(metrics).to_string(index=False))


def cmd_gen_data(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    data_path, splits_path = save_dataset(build_dataset(config), args.out)
    print(f"{data_path}\n{splits_path}")
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    record = run_train(resolve_config(args))
    _print_metrics(record.metrics)
    if record.tracking_correlation is not None:
        print(f"surrogate correlation: {record.tracking_correlation:.3f}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    result = run_sweep(resolve_config(args))
    print(f"{len(result.records)} finished, {result.skipped} skipped, {len(result.failures)} failed")
    for failure in result.failures:
        print(f"  {failure.regularizer} lambda={failure.lam:g} seed={failure.seed}: {failure.error}")
    return EXIT_PARTIAL_SWEEP if result.failures else EXIT_OK


def cmd_distill(args: argparse.Namespace) -> int:
    distilled = run_distill(args.checkpoint, resolve_config(args), args.out)
    for tree in distilled:
        print(f"{tree.region}\toutput {tree.output}\tfidelity {tree.fidelity:.4f}\tAPL {tree.apl:.2f}\t{tree.dot_path}")
    return EXIT_OK


def cmd_baseline_trees(args: argparse.Namespace) -> int:
    records = run_baseline_trees(resolve_config(args), args.h_grid)
    for record in records:
        print(f"{record.regularizer} h={record.lam:g}")
        _print_metrics(record.metrics)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    _print_metrics(run_eval(args.checkpoint, resolve_config(args), args.out))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treereg", description="Tree-regularized training of deep models")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="log warnings and errors only")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen-data", help="generate a dataset and cache it as CSV")
    gen.add_argument("--out", required=True, help="cache directory")
    gen.set_defaults(handler=cmd_gen_data)

    train = commands.add_parser("train", help="train one model")
    train.set_defaults(handler=cmd_train)

    sweep = commands.add_parser("sweep", help="train across regularizers, lambdas and seeds")
    sweep.set_defaults(handler=cmd_sweep)

    distill = commands.add_parser("distill", help="distill a checkpoint into decision trees")
    distill.add_argument("--checkpoint", required=True)
    distill.add_argument("--out", required=True)
    distill.set_defaults(handler=cmd_distill)

    baseline = commands.add_parser("baseline-trees", help="decision trees trained on the labels")
    baseline.add_argument("--h-grid", nargs="+", type=int, help="minimum leaf sizes")
    baseline.set_defaults(handler=cmd_baseline_trees)

    evaluate = commands.add_parser("eval", help="evaluate a checkpoint on every split")
    evaluate.add_argument("--checkpoint", required=True)
    evaluate.add_argument("--out", help="directory for eval.csv")
    evaluate.set_defaults(handler=cmd_eval)

    for command in (gen, train, sweep, distill, baseline, evaluate):
        _config_arguments(command)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT)
    try:
        return args.handler(args)
    except ConfigError as error:
        logger.error(f"Configuration error: {error}")
        return EXIT_CONFIG
    except TreeRegError as error:
        logger.error(f"{type(error).__name__}: {error}")
        return EXIT_RUNTIME
    except Exception:
        logger.exception("Unexpected failure")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
