#!/usr/bin/env python3
"""
MrSQM command line

Commands:
- fit: train a model on a .ts or .csv file and save it
- predict: apply a saved model and write per-series predictions
- benchmark: fit and score a list of UCR-style datasets
- transform: dump the symbolic sequences of one representation
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd
from pydantic import ValidationError

from mrsqm.core.config import settings
from mrsqm.core.errors import MrsqmError
from mrsqm.core.logging import configure_logging
from mrsqm.models.enums import LabelColumn, SelectionStrategy, TransformType
from mrsqm.schemas.run_config import RunConfig
from mrsqm.schemas.symbolic import ReprConfig
from mrsqm.services.benchmark import read_dataset_list, run_benchmark
from mrsqm.services.dataset_loader import load_dataset
from mrsqm.services.model_store import load_model, save_model
from mrsqm.services.pipeline import MrsqmClassifier, accuracy, predict
from mrsqm.services.symbolic_transform import fit_transform_dataset, format_sequences

logger = logging.getLogger(__name__)


class UsageError(Exception):
    """Flag combination rejected after parsing."""


def _add_input_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--header", action="store_true", help="CSV input has a header line to skip")
    parser.add_argument(
        "--label-column",
        choices=[c.value for c in LabelColumn],
        default=LabelColumn.FIRST.value,
        help="Label column of CSV input",
    )


def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--transform",
        choices=[t.value for t in TransformType],
        default=settings.TRANSFORM,
        help="Symbolic transform(s) to sample",
    )
    parser.add_argument("--k", type=float, default=settings.K, help="Representation density")
    parser.add_argument("--sax-k", type=float, default=None, help="SAX density (defaults to --k)")
    parser.add_argument("--sfa-k", type=float, default=None, help="SFA density (defaults to --k)")
    parser.add_argument(
        "--selection",
        choices=[s.value for s in SelectionStrategy],
        default=settings.STRATEGY,
        help="Feature selection strategy",
    )
    parser.add_argument("--features", type=int, default=settings.FEATURES_PER_REP, help="Features per representation")
    parser.add_argument("--seed", type=int, default=settings.SEED, help="Master random seed")
    parser.add_argument(
        "--no-numerosity-reduction",
        dest="numerosity_reduction",
        action="store_false",
        default=settings.NUMEROSITY_REDUCTION,
        help="Keep consecutive identical words",
    )
    parser.add_argument("--drop-dc", action="store_true", default=settings.DROP_DC, help="Skip the DC coefficient in SFA")
    parser.add_argument("--min-support", type=int, default=settings.MIN_SUPPORT, help="Minimum document frequency of a supervised feature")
    parser.add_argument("--pool-multiplier", type=int, default=settings.POOL_MULTIPLIER, help="Candidate pool size of RS and SR, in budgets")
    parser.add_argument("--reg-strength", type=float, default=settings.REG_STRENGTH, help="Inverse L2 penalty of the classifier")
    parser.add_argument("--tol", type=float, default=settings.TOL, help="Gradient tolerance of the classifier")
    parser.add_argument("--max-iter", type=int, default=settings.MAX_ITER, help="Classifier iteration limit")


def build_parser() -> argparse.ArgumentParser:
    formatter = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(description="MrSQM time series classification", formatter_class=formatter)
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="Logging level")

    subparsers = parser.add_subparsers(dest="command", help="Command to run")
    subparsers.required = True

    fit_parser = subparsers.add_parser("fit", help="Train a model", formatter_class=formatter)
    fit_parser.add_argument("--train", required=True, help="Training .ts or .csv file")
    fit_parser.add_argument("--out", required=True, help="Model file to write")
    fit_parser.add_argument("--diagnostics", default=None, help="Write selected features with class counts to this TSV")
    fit_parser.add_argument("--jobs", type=int, default=settings.N_JOBS, help="Representations fitted in parallel")
    _add_config_arguments(fit_parser)
    _add_input_arguments(fit_parser)

    predict_parser = subparsers.add_parser("predict", help="Apply a saved model", formatter_class=formatter)
    predict_parser.add_argument("--model", required=True, help="Model file written by fit")
    predict_parser.add_argument("--test", required=True, help="Test .ts or .csv file")
    predict_parser.add_argument("--out", required=True, help="Predictions CSV to write")
    predict_parser.add_argument("--jobs", type=int, default=settings.N_JOBS, help="Representations transformed in parallel")
    _add_input_arguments(predict_parser)

    bench_parser = subparsers.add_parser("benchmark", help="Fit and score UCR-style datasets", formatter_class=formatter)
    bench_parser.add_argument("--dir", required=True, help="Folder with <name>_TRAIN.ts and <name>_TEST.ts")
    bench_parser.add_argument("--datasets", required=True, help="Text file with one dataset name per line")
    bench_parser.add_argument("--out", required=True, help="Results CSV to write")
    bench_parser.add_argument("--jobs", type=int, default=1, help="Datasets run in parallel")
    _add_config_arguments(bench_parser)

    transform_parser = subparsers.add_parser(
        "transform", help="Dump symbolic sequences of one representation", formatter_class=formatter
    )
    transform_parser.add_argument("--train", required=True, help="Input .ts or .csv file")
    transform_parser.add_argument("--out", required=True, help="Text file to write")
    transform_parser.add_argument(
        "--transform",
        choices=[TransformType.SAX.value, TransformType.SFA.value],
        default=settings.TRANSFORM,
        help="Symbolic transform",
    )
    transform_parser.add_argument("--window", type=int, required=True, help="Window size l")
    transform_parser.add_argument("--word", type=int, required=True, help="Word length w")
    transform_parser.add_argument("--alphabet", type=int, required=True, help="Alphabet size")
    transform_parser.add_argument(
        "--no-numerosity-reduction",
        dest="numerosity_reduction",
        action="store_false",
        default=settings.NUMEROSITY_REDUCTION,
        help="Keep consecutive identical words",
    )
    transform_parser.add_argument("--drop-dc", action="store_true", default=settings.DROP_DC, help="Skip the DC coefficient in SFA")
    _add_input_arguments(transform_parser)

    return parser


def run_config_from_args(args: argparse.Namespace, n_jobs: int = 1) -> RunConfig:
    """Settings defaults overridden by the parsed flags."""
    transform = TransformType(args.transform)
    sax_k = args.sax_k if args.sax_k is not None else args.k
    sfa_k = args.sfa_k if args.sfa_k is not None else args.k
    try:
        return RunConfig(
            transform=transform,
            sax_k=sax_k if transform != TransformType.SFA else 0,
            sfa_k=sfa_k if transform != TransformType.SAX else 0,
            strategy=args.selection,
            features_per_rep=args.features,
            seed=args.seed,
            numerosity_reduction=args.numerosity_reduction,
            drop_dc=args.drop_dc,
            pool_multiplier=args.pool_multiplier,
            min_support=args.min_support,
            reg_strength=args.reg_strength,
            tol=args.tol,
            max_iter=args.max_iter,
            n_jobs=n_jobs,
            train_path=getattr(args, "train", None),
            out_path=getattr(args, "out", None),
        )
    except ValidationError as e:
        raise UsageError("; ".join(error["msg"] for error in e.errors()))


def cmd_fit(args: argparse.Namespace) -> int:
    config = run_config_from_args(args, n_jobs=args.jobs)
    print(config.echo())

    dataset = load_dataset(args.train, label_column=args.label_column, header=args.header)
    classifier = MrsqmClassifier(config)
    model = classifier.fit(dataset, diagnostics=args.diagnostics is not None)
    save_model(model, args.out)
    if args.diagnostics is not None:
        Path(args.diagnostics).write_text(classifier.diagnostics_, encoding="utf-8")

    timings = classifier.timings_
    print(f"representations={len(model.representations)}")
    print(f"features={model.n_features}")
    print(f"training_accuracy={classifier.training_accuracy_:.4f}")
    print(
        f"seconds: transform={timings.transform:.3f} mining={timings.mining:.3f} "
        f"training={timings.training:.3f} total={timings.total:.3f}"
    )
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    dataset = load_dataset(args.test, label_column=args.label_column, header=args.header)
    labels, probabilities = predict(model, dataset, n_jobs=args.jobs)

    frame = pd.DataFrame(
        probabilities, columns=[f"prob_class_{c}" for c in range(len(model.classes))]
    )
    frame.insert(0, "predicted_label", labels)
    frame.insert(0, "index", range(dataset.N))
    frame.to_csv(args.out, index=False)
    logger.info(f"Wrote {dataset.N} predictions to {args.out}")

    if dataset.is_labeled:
        print(f"accuracy={accuracy(labels, dataset):.4f}")
    return 0


def cmd_benchmark(args: argparse.Namespace) -> int:
    config = run_config_from_args(args)
    print(config.echo())
    names = read_dataset_list(args.datasets)
    results = run_benchmark(args.dir, names, config, args.out, n_jobs=args.jobs)
    print(results.to_string(index=False))
    return 0


def cmd_transform(args: argparse.Namespace) -> int:
    try:
        repr_config = ReprConfig(
            transform=args.transform,
            l=args.window,
            w=args.word,
            alpha=args.alphabet,
            numerosity_reduction=args.numerosity_reduction,
            drop_dc=args.drop_dc,
        )
    except ValidationError as e:
        raise UsageError("; ".join(error["msg"] for error in e.errors()))

    dataset = load_dataset(args.train, label_column=args.label_column, header=args.header)
    _, sequences = fit_transform_dataset(dataset, repr_config)
    Path(args.out).write_text(format_sequences(sequences), encoding="utf-8")
    print(f"Wrote {len(sequences)} sequences of {repr_config.describe()} to {args.out}")
    return 0


COMMANDS = {
    "fit": cmd_fit,
    "predict": cmd_predict,
    "benchmark": cmd_benchmark,
    "transform": cmd_transform,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments and run a command; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)

    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        parser.error(str(e))
    except (MrsqmError, OSError) as e:
        message = " ".join(str(e).split())
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
