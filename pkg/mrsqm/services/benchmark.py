import logging
import time
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import pandas as pd
from joblib import Parallel, delayed

from mrsqm.core.errors import ArgumentError, MrsqmError
from mrsqm.schemas.run_config import RunConfig
from mrsqm.services.dataset_loader import load_ts
from mrsqm.services.pipeline import MrsqmClassifier, accuracy

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

COLUMNS = ["name", "N_train", "N_test", "L", "C", "accuracy", "fit_seconds", "predict_seconds", "error"]


def read_dataset_list(path: PathLike) -> List[str]:
    """Dataset names, one per line; blank lines and ``#`` comments are skipped."""
    with open(path, "r", encoding="utf-8") as f:
        names = [line.split("#", 1)[0].strip() for line in f]
    return [name for name in names if name]


def run_dataset(directory: PathLike, name: str, config: RunConfig) -> Dict[str, Any]:
    """
    Fit on ``<name>_TRAIN.ts`` and score on ``<name>_TEST.ts``.

    Any data or pipeline error is reported in the row's error column.
    """
    row: Dict[str, Any] = {column: None for column in COLUMNS}
    row["name"] = name
    directory = Path(directory)
    try:
        train = load_ts(directory / f"{name}_TRAIN.ts")
        test = load_ts(directory / f"{name}_TEST.ts")
        row.update(N_train=train.N, N_test=test.N, L=train.L, C=train.C)

        classifier = MrsqmClassifier(config)
        start = time.perf_counter()
        classifier.fit(train)
        row["fit_seconds"] = time.perf_counter() - start

        start = time.perf_counter()
        predicted, _ = classifier.predict(test)
        row["predict_seconds"] = time.perf_counter() - start
        row["accuracy"] = accuracy(predicted, test)
        logger.info(f"{name}: accuracy {row['accuracy']:.4f}")
    except (MrsqmError, OSError) as e:
        logger.warning(f"{name}: failed: {e}")
        row["error"] = str(e).replace("\n", " ")
    return row


def run_benchmark(
    directory: PathLike,
    names: Sequence[str],
    config: RunConfig,
    out_path: PathLike,
    n_jobs: int = 1,
) -> pd.DataFrame:
    """
    Benchmark every named dataset and write one CSV row per dataset.

    Args:
        directory: Folder holding ``<name>_TRAIN.ts`` and ``<name>_TEST.ts`` files
        names: Dataset names, processed in order
        config: Pipeline configuration shared by all datasets
        out_path: Results CSV
        n_jobs: Datasets run in parallel

    Returns:
        The results table
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise ArgumentError(f"Dataset directory {directory} is not readable")

    rows = Parallel(n_jobs=n_jobs)(delayed(run_dataset)(directory, name, config) for name in names)
    results = pd.DataFrame(rows, columns=COLUMNS)
    results.to_csv(out_path, index=False)
    failed = int(results["error"].notna().sum())
    logger.info(f"Benchmarked {len(results)} datasets ({failed} failed), results in {out_path}")
    return results
