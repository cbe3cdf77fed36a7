"""
End-to-end classifier: sample representations, transform, select features,
featurize and train, then apply the fitted model to new series.
"""
import logging
import time
from typing import List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from mrsqm.core.errors import ArgumentError, NotFittedError
from mrsqm.core.rng import random_substream
from mrsqm.models.enums import TransformType
from mrsqm.schemas.dataset import TimeSeriesDataset
from mrsqm.schemas.mining import ClassCounts, FeatureSet
from mrsqm.schemas.model import MrsqmModel, Representation, StageTimings
from mrsqm.schemas.run_config import RunConfig
from mrsqm.schemas.symbolic import ReprConfig, SymbolicSequence
from mrsqm.services.classifier import SoftmaxRegression, featurize
from mrsqm.services.feature_miner import class_counts, format_diagnostics, select
from mrsqm.services.symbolic_transform import (
    fit_transform_dataset,
    sample_configs,
    transform_dataset,
)

logger = logging.getLogger(__name__)

# substream keys: (seed, SAMPLING, transform) and (seed, MINING, representation ordinal)
SAMPLING = 0
MINING = 1


def sample_representations(L: int, config: RunConfig) -> List[ReprConfig]:
    """Unfitted configs for every transform in use, SAX first."""
    configs = []
    for transform, k in config.transforms().items():
        rng = random_substream(config.seed, SAMPLING, list(TransformType).index(transform))
        configs.extend(
            sample_configs(
                L,
                k,
                transform,
                rng=rng,
                numerosity_reduction=config.numerosity_reduction,
                drop_dc=config.drop_dc,
            )
        )
    return configs


def _fit_representation(
    dataset: TimeSeriesDataset,
    repr_config: ReprConfig,
    ordinal: int,
    config: RunConfig,
    collect_counts: bool,
) -> Tuple[ReprConfig, FeatureSet, List[SymbolicSequence], Optional[List[ClassCounts]], float, float]:
    start = time.perf_counter()
    fitted, sequences = fit_transform_dataset(dataset, repr_config)
    transformed = time.perf_counter()

    features = select(
        config.strategy,
        sequences,
        dataset.y,
        config.features_per_rep,
        rng=random_substream(config.seed, MINING, ordinal),
        pool_multiplier=config.pool_multiplier,
        min_support=config.min_support,
    )
    mined = time.perf_counter()

    counts = class_counts(sequences, dataset.y, features.subwords) if collect_counts else None
    logger.debug(f"Representation {ordinal} {fitted.describe()}: {len(features)} features")
    return fitted, features, sequences, counts, transformed - start, mined - transformed


class MrsqmClassifier:
    """
    Multiple-representation symbolic classifier.

    Every representation is fitted independently under its own RNG substream,
    so the fitted model depends only on (seed, data, config) and not on n_jobs.
    """

    def __init__(self, config: Optional[RunConfig] = None):
        self.config = config or RunConfig()
        self.model_: Optional[MrsqmModel] = None
        self.timings_ = StageTimings()
        self.training_accuracy_: Optional[float] = None
        self.diagnostics_: Optional[str] = None

    def fit(self, dataset: TimeSeriesDataset, diagnostics: bool = False) -> MrsqmModel:
        """
        Fit the full pipeline on a labeled dataset.

        Args:
            dataset: Training data with at least 2 classes
            diagnostics: Also build the selected-feature dump in diagnostics_

        Returns:
            The fitted model (also kept in model_)
        """
        config = self.config
        if not dataset.is_labeled:
            raise ArgumentError("Cannot train on an unlabeled dataset")
        if len(set(dataset.labels)) < 2:
            raise ArgumentError(f"Training needs at least 2 classes, found {len(set(dataset.labels))}")
        empty = [label for label in dataset.class_names if label not in set(dataset.labels)]
        if empty:
            raise ArgumentError(f"Declared classes without training series: {empty}")

        repr_configs = sample_representations(dataset.L, config)
        logger.info(
            f"Fitting {len(repr_configs)} representations on N={dataset.N}, L={dataset.L}, "
            f"C={dataset.C}: {config.echo()}"
        )

        results = Parallel(n_jobs=config.n_jobs)(
            delayed(_fit_representation)(dataset, repr_config, ordinal, config, diagnostics)
            for ordinal, repr_config in enumerate(repr_configs)
        )
        representations = [Representation(config=r[0], features=r[1]) for r in results]
        timings = StageTimings(
            transform=sum(r[4] for r in results),
            mining=sum(r[5] for r in results),
        )

        X = featurize([r[2] for r in results], [rep.features for rep in representations])
        logger.info(f"Selected {X.cols} features over {len(representations)} representations")

        start = time.perf_counter()
        estimator = SoftmaxRegression(
            reg_strength=config.reg_strength, tol=config.tol, max_iter=config.max_iter
        ).fit(X, dataset.y, n_classes=dataset.C)
        timings.training = time.perf_counter() - start

        self.model_ = MrsqmModel(
            seed=config.seed,
            transform=config.transform,
            k={transform.value: k for transform, k in config.transforms().items()},
            strategy=config.strategy,
            features_per_rep=config.features_per_rep,
            classes=dataset.class_names,
            representations=representations,
            classifier=estimator.to_weights(),
        )
        self.timings_ = timings
        self.training_accuracy_ = float(np.mean(estimator.predict(X) == dataset.y))
        if diagnostics:
            self.diagnostics_ = format_diagnostics(
                [(i, r[1], r[3]) for i, r in enumerate(results)], dataset.class_names
            )
        logger.info(
            f"Training accuracy {self.training_accuracy_:.4f}; transform {timings.transform:.2f}s, "
            f"mining {timings.mining:.2f}s, training {timings.training:.2f}s"
        )
        return self.model_

    def predict(self, dataset: TimeSeriesDataset) -> Tuple[List[str], np.ndarray]:
        if self.model_ is None:
            raise NotFittedError("MrsqmClassifier is not fitted")
        return predict(self.model_, dataset, n_jobs=self.config.n_jobs)


def featurize_dataset(model: MrsqmModel, dataset: TimeSeriesDataset, n_jobs: int = 1):
    """Transform a dataset under every stored representation and featurize it."""
    window = model.max_window
    if dataset.L < window:
        raise ArgumentError(f"Series of length {dataset.L} are shorter than the largest window {window}")
    sequences = Parallel(n_jobs=n_jobs)(
        delayed(transform_dataset)(dataset, rep.config) for rep in model.representations
    )
    return featurize(sequences, [rep.features for rep in model.representations])


def predict(model: MrsqmModel, dataset: TimeSeriesDataset, n_jobs: int = 1) -> Tuple[List[str], np.ndarray]:
    """
    Predicted labels and per-class probabilities.

    Returns:
        (labels, N x C probabilities in model.classes order)
    """
    X = featurize_dataset(model, dataset, n_jobs=n_jobs)
    estimator = SoftmaxRegression.from_weights(model.classifier)
    probabilities = estimator.predict_proba(X)
    codes = estimator.predict(X)
    return [model.classes[c] for c in codes], probabilities


def accuracy(predicted: List[str], dataset: TimeSeriesDataset) -> float:
    if not dataset.is_labeled:
        raise ArgumentError("Accuracy needs a labeled dataset")
    return float(np.mean([p == t for p, t in zip(predicted, dataset.labels)]))
