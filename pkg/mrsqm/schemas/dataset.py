from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class TimeSeriesDataset(BaseModel):
    """
    Labeled (or unlabeled) collection of equal-length univariate series.

    X holds the series row-wise as a read-only float64 array. labels is None for
    unlabeled test data; class_index then is empty.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    X: np.ndarray
    labels: Optional[List[str]] = None
    class_index: Dict[str, int] = {}
    name: Optional[str] = None

    @field_validator("X", mode="before")
    def as_frozen_array(cls, v) -> np.ndarray:
        X = np.array(v, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError(f"Expected a non-empty N x L array, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise ValueError("Series contain NaN or infinite values")
        X.setflags(write=False)
        return X

    @model_validator(mode="after")
    def check_labels(self) -> "TimeSeriesDataset":
        if self.labels is not None:
            if len(self.labels) != self.N:
                raise ValueError(f"{len(self.labels)} labels for {self.N} series")
            missing = {label for label in self.labels if label not in self.class_index}
            if missing:
                raise ValueError(f"Labels without class index: {sorted(missing)}")
            if sorted(self.class_index.values()) != list(range(len(self.class_index))):
                raise ValueError("Class index must map onto 0..C-1")
        return self

    @property
    def series(self) -> List[np.ndarray]:
        return list(self.X)

    @property
    def N(self) -> int:
        return self.X.shape[0]

    @property
    def L(self) -> int:
        return self.X.shape[1]

    @property
    def C(self) -> int:
        return len(self.class_index)

    @property
    def is_labeled(self) -> bool:
        return self.labels is not None

    @property
    def class_names(self) -> List[str]:
        return sorted(self.class_index, key=self.class_index.get)

    @property
    def y(self) -> np.ndarray:
        """Integer class codes in class_index order."""
        if self.labels is None:
            raise ValueError("Dataset is unlabeled")
        return np.array([self.class_index[label] for label in self.labels], dtype=np.int64)

    def __eq__(self, other: object) -> bool:
        # content equality; the name is provenance only
        if not isinstance(other, TimeSeriesDataset):
            return NotImplemented
        return (
            np.array_equal(self.X, other.X)
            and self.labels == other.labels
            and self.class_index == other.class_index
        )

    __hash__ = None
