from datetime import datetime
from typing import Dict, List, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import sparse

from mrsqm.models.enums import SelectionStrategy, TransformType
from mrsqm.schemas.mining import FeatureSet
from mrsqm.schemas.symbolic import ReprConfig


class Representation(NamedTuple):
    config: ReprConfig
    features: FeatureSet


class FeatureMatrix(BaseModel):
    """Sparse binary presence matrix over the concatenated feature space."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    data: sparse.csr_matrix
    # column offset of each representation's block
    offsets: List[int]

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]


class ClassifierWeights(BaseModel):
    """Trained multinomial logistic-regression parameters."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    coef: np.ndarray        # C x D
    intercept: np.ndarray   # C
    converged: bool = True
    n_iter: int = 0
    objective_history: List[float] = []


class StageTimings(BaseModel):
    transform: float = 0.0
    mining: float = 0.0
    training: float = 0.0

    @property
    def total(self) -> float:
        return self.transform + self.mining + self.training


class MrsqmModel(BaseModel):
    """Fitted pipeline: representations, selected features and classifier weights."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    seed: int
    transform: TransformType
    k: Dict[str, float]
    strategy: SelectionStrategy
    features_per_rep: int
    classes: List[str]
    representations: List[Representation]
    classifier: ClassifierWeights
    created_at: datetime = Field(default_factory=datetime.utcnow)

    @property
    def n_features(self) -> int:
        return sum(len(rep.features) for rep in self.representations)

    @property
    def class_index(self) -> Dict[str, int]:
        return {label: i for i, label in enumerate(self.classes)}

    @property
    def max_window(self) -> int:
        return max(rep.config.window_size for rep in self.representations)


class RepresentationDocument(BaseModel):
    """One representation as stored in a model file."""

    transform: TransformType
    l: int  # noqa: E741
    w: int
    alpha: int
    numerosity_reduction: bool
    drop_dc: bool
    bins: Optional[List[List[float]]] = None
    features: List[str]


class ModelDocument(BaseModel):
    """Versioned, self-describing model file."""

    version: int
    seed: int
    transform: TransformType
    k: Dict[str, float]
    strategy: SelectionStrategy
    features_per_rep: int
    classes: List[str]
    representations: List[RepresentationDocument]
    weights: List[List[float]]
    intercepts: List[float]
    created_at: datetime
