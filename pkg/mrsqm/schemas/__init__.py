from .dataset import TimeSeriesDataset
from .symbolic import ReprConfig, SymbolicSequence
from .mining import ClassCounts, FeatureSet, MiningStats
from .run_config import RunConfig
from .model import (
    ClassifierWeights,
    FeatureMatrix,
    ModelDocument,
    MrsqmModel,
    Representation,
    RepresentationDocument,
    StageTimings,
)
