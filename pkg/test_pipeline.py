import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from mrsqm.core.errors import ArgumentError, NotFittedError
from mrsqm.models.enums import SelectionStrategy, TransformType
from mrsqm.schemas.dataset import TimeSeriesDataset
from mrsqm.schemas.run_config import RunConfig
from mrsqm.services.model_store import to_document
from mrsqm.services.pipeline import MrsqmClassifier, accuracy, predict, sample_representations


def document_without_timestamp(model):
    return to_document(model).model_dump(mode="json", exclude={"created_at"})


def test_fit_separable_toy(fitted_classifier, toy_dataset):
    model = fitted_classifier.model_

    assert len(model.representations) == math.ceil(math.log2(toy_dataset.L))
    assert model.classes == ["sine", "square"]
    assert model.n_features == sum(len(rep.features) for rep in model.representations)
    assert np.asarray(model.classifier.coef).shape == (2, model.n_features)
    assert fitted_classifier.training_accuracy_ == 1.0
    assert all(rep.config.is_fitted for rep in model.representations)


def test_predict_training_set(fitted_classifier, toy_dataset):
    labels, probabilities = fitted_classifier.predict(toy_dataset)

    assert labels == toy_dataset.labels
    assert probabilities.shape == (toy_dataset.N, 2)
    assert_allclose(probabilities.sum(axis=1), 1.0, atol=1e-9)


def test_predict_held_out(fitted_classifier, toy_test_dataset):
    labels, _ = fitted_classifier.predict(toy_test_dataset)
    assert accuracy(labels, toy_test_dataset) >= 0.9


def test_identical_series_get_identical_predictions(fitted_classifier, toy_dataset):
    twins = TimeSeriesDataset(X=np.vstack([toy_dataset.X[3], toy_dataset.X[3]]))
    labels, probabilities = predict(fitted_classifier.model_, twins)
    assert labels[0] == labels[1]
    assert_array_equal(probabilities[0], probabilities[1])


def test_predict_unlabeled(fitted_classifier, toy_dataset):
    labels, _ = predict(fitted_classifier.model_, TimeSeriesDataset(X=toy_dataset.X))
    assert labels == toy_dataset.labels


def test_predict_rejects_short_series(fitted_classifier):
    window = fitted_classifier.model_.max_window
    short = TimeSeriesDataset(X=np.zeros((2, window - 1)))
    with pytest.raises(ArgumentError, match=f"window {window}"):
        predict(fitted_classifier.model_, short)


def test_predict_before_fit():
    with pytest.raises(NotFittedError):
        MrsqmClassifier().predict(TimeSeriesDataset(X=np.zeros((1, 10))))


def test_fit_rejects_unlabeled(toy_dataset, small_config):
    with pytest.raises(ArgumentError):
        MrsqmClassifier(small_config).fit(TimeSeriesDataset(X=toy_dataset.X))


def test_fit_rejects_single_class(small_config):
    dataset = TimeSeriesDataset(X=np.zeros((3, 16)), labels=["a"] * 3, class_index={"a": 0})
    with pytest.raises(ArgumentError, match="2 classes"):
        MrsqmClassifier(small_config).fit(dataset)


def test_fit_is_deterministic(small_config, toy_dataset):
    first = MrsqmClassifier(small_config).fit(toy_dataset)
    second = MrsqmClassifier(small_config).fit(toy_dataset)
    assert document_without_timestamp(first) == document_without_timestamp(second)


def test_fit_does_not_depend_on_jobs(small_config, toy_dataset):
    serial = MrsqmClassifier(small_config).fit(toy_dataset)
    parallel = MrsqmClassifier(small_config.model_copy(update={"n_jobs": 2})).fit(toy_dataset)
    assert document_without_timestamp(serial) == document_without_timestamp(parallel)


def test_seed_changes_do_not_crash(small_config, toy_dataset):
    model = MrsqmClassifier(small_config.model_copy(update={"seed": 7})).fit(toy_dataset)
    assert model.seed == 7


@pytest.mark.parametrize("strategy", list(SelectionStrategy))
def test_every_strategy_fits(toy_dataset, strategy):
    config = RunConfig.for_transform("sfa", k=1, features_per_rep=20, strategy=strategy)
    classifier = MrsqmClassifier(config)
    model = classifier.fit(toy_dataset)

    assert model.strategy == strategy
    assert all(0 < len(rep.features) <= 20 for rep in model.representations)
    assert classifier.training_accuracy_ >= 0.9


def test_both_transforms(toy_dataset):
    config = RunConfig.for_transform(TransformType.BOTH, k=1, features_per_rep=20)
    model = MrsqmClassifier(config).fit(toy_dataset)

    transforms = [rep.config.transform for rep in model.representations]
    assert len(transforms) == 2 * math.ceil(math.log2(toy_dataset.L))
    assert transforms == sorted(transforms, key=lambda t: t != TransformType.SAX)
    assert model.k == {"sax": 1.0, "sfa": 1.0}


def test_sample_representations_counts():
    config = RunConfig(transform="both", sax_k=2, sfa_k=1)
    configs = sample_representations(286, config)
    assert sum(c.transform == TransformType.SAX for c in configs) == math.ceil(2 * math.log2(286))
    assert sum(c.transform == TransformType.SFA for c in configs) == math.ceil(math.log2(286))


def test_coffee_sized_default_count():
    assert len(sample_representations(286, RunConfig())) == 41


def test_diagnostics_and_timings(small_config, toy_dataset):
    classifier = MrsqmClassifier(small_config)
    model = classifier.fit(toy_dataset, diagnostics=True)

    lines = classifier.diagnostics_.splitlines()
    assert lines[0] == "representation\tsubword\tsine\tsquare\tscore"
    assert len(lines) == 1 + model.n_features
    timings = classifier.timings_
    assert min(timings.transform, timings.mining, timings.training) >= 0
    assert timings.total == pytest.approx(timings.transform + timings.mining + timings.training)


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(transform="both", sax_k=0, sfa_k=1)
    with pytest.raises(ValueError):
        RunConfig(transform="sfa", sfa_k=0.5)
    with pytest.raises(ValueError):
        RunConfig(features_per_rep=0)
    with pytest.raises(ValueError):
        RunConfig(reg_strength=0)


def test_run_config_defaults():
    config = RunConfig()
    assert config.transform == TransformType.SFA
    assert config.sfa_k == 5
    assert config.strategy == SelectionStrategy.RS
    assert config.features_per_rep == 500
    assert "transform=sfa sfa_k=5 strategy=rs features=500 seed=42" in config.echo()


def test_fit_rejects_declared_class_without_series(small_config, toy_dataset):
    dataset = TimeSeriesDataset(
        X=toy_dataset.X,
        labels=toy_dataset.labels,
        class_index={"sine": 0, "square": 1, "triangle": 2},
    )
    with pytest.raises(ArgumentError, match="triangle"):
        MrsqmClassifier(small_config).fit(dataset)


def test_run_config_echo_names_paths():
    config = RunConfig(train_path="Coffee_TRAIN.ts", out_path="coffee.json")
    assert config.echo().endswith(" train=Coffee_TRAIN.ts out=coffee.json")
    assert "train=" not in RunConfig().echo()
