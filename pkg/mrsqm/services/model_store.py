"""
Model persistence as a versioned JSON document.

Floats are written with Python's shortest round-trip representation, so bin
edges and weights are reconstructed bit for bit and a reloaded model predicts
exactly like the saved one.
"""
import json
import logging
from pathlib import Path
from typing import Union

import numpy as np
from pydantic import ValidationError

from mrsqm.core.config import settings
from mrsqm.core.errors import ArgumentError, ModelFileError, UnsupportedModelVersionError
from mrsqm.schemas.mining import FeatureSet
from mrsqm.schemas.model import (
    ClassifierWeights,
    ModelDocument,
    MrsqmModel,
    Representation,
    RepresentationDocument,
)
from mrsqm.schemas.symbolic import ReprConfig

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def to_document(model: MrsqmModel) -> ModelDocument:
    if not model.representations:
        raise ArgumentError("Refusing to save a model without representations")
    coef = np.asarray(model.classifier.coef, dtype=np.float64)
    if coef.shape != (len(model.classes), model.n_features):
        raise ArgumentError(
            f"Weight matrix shape {coef.shape} does not match "
            f"{len(model.classes)} classes x {model.n_features} features"
        )
    return ModelDocument(
        version=settings.MODEL_FORMAT_VERSION,
        seed=model.seed,
        transform=model.transform,
        k=model.k,
        strategy=model.strategy,
        features_per_rep=model.features_per_rep,
        classes=model.classes,
        representations=[
            RepresentationDocument(
                transform=rep.config.transform,
                l=rep.config.window_size,
                w=rep.config.word_length,
                alpha=rep.config.alphabet_size,
                numerosity_reduction=rep.config.numerosity_reduction,
                drop_dc=rep.config.drop_dc,
                bins=rep.config.bins,
                features=rep.features.subwords,
            )
            for rep in model.representations
        ],
        weights=coef.tolist(),
        intercepts=np.asarray(model.classifier.intercept, dtype=np.float64).tolist(),
        created_at=model.created_at,
    )


def from_document(document: ModelDocument) -> MrsqmModel:
    representations = [
        Representation(
            config=ReprConfig(
                transform=rep.transform,
                l=rep.l,
                w=rep.w,
                alpha=rep.alpha,
                numerosity_reduction=rep.numerosity_reduction,
                drop_dc=rep.drop_dc,
                bins=rep.bins,
            ),
            features=FeatureSet(subwords=rep.features, strategy=document.strategy),
        )
        for rep in document.representations
    ]
    if not representations:
        raise ModelFileError("Model file has no representations")

    coef = np.array(document.weights, dtype=np.float64)
    intercept = np.array(document.intercepts, dtype=np.float64)
    n_features = sum(len(rep.features) for rep in representations)
    C = len(document.classes)
    if coef.shape != (C, n_features):
        raise ModelFileError(f"Weights of shape {coef.shape}, expected ({C}, {n_features})")
    if intercept.shape != (C,):
        raise ModelFileError(f"{intercept.size} intercepts for {C} classes")

    return MrsqmModel(
        seed=document.seed,
        transform=document.transform,
        k=document.k,
        strategy=document.strategy,
        features_per_rep=document.features_per_rep,
        classes=document.classes,
        representations=representations,
        classifier=ClassifierWeights(coef=coef, intercept=intercept),
        created_at=document.created_at,
    )


def dumps_model(model: MrsqmModel) -> str:
    return json.dumps(to_document(model).model_dump(mode="json"), indent=2) + "\n"


def loads_model(text: str) -> MrsqmModel:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFileError(f"Model file is not valid JSON: {e}")
    if not isinstance(raw, dict):
        raise ModelFileError("Model file must contain a JSON object")
    version = raw.get("version")
    if version != settings.MODEL_FORMAT_VERSION:
        raise UnsupportedModelVersionError(
            f"Unsupported model version {version!r}, expected {settings.MODEL_FORMAT_VERSION}"
        )
    try:
        return from_document(ModelDocument.model_validate(raw))
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise ModelFileError(f"Invalid model file at {location}: {first['msg']}")
    except ValueError as e:
        # ragged weight rows
        raise ModelFileError(f"Invalid model file: {e}")


def save_model(model: MrsqmModel, path: PathLike) -> str:
    """
    Write the model document to path.

    Returns:
        The path written
    """
    text = dumps_model(model)
    path = Path(path)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    logger.info(f"Saved model with {len(model.representations)} representations to {path}")
    return str(path)


def load_model(path: PathLike) -> MrsqmModel:
    """Read a model written by save_model; nothing is returned on any error."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    model = loads_model(text)
    logger.info(f"Loaded model with {len(model.representations)} representations from {path}")
    return model
