from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from mrsqm.models.enums import SelectionStrategy


class ClassCounts(BaseModel):
    """Per-class document frequency of a subword alongside the class sizes."""

    per_class: List[int]
    class_sizes: List[int]

    @model_validator(mode="after")
    def check_shape(self) -> "ClassCounts":
        if len(self.per_class) != len(self.class_sizes):
            raise ValueError("per_class and class_sizes differ in length")
        if any(o < 0 for o in self.per_class):
            raise ValueError("Observed counts must be non-negative")
        return self

    @property
    def total(self) -> int:
        return sum(self.per_class)


class FeatureSet(BaseModel):
    """Subwords selected for one representation."""

    subwords: List[str]
    strategy: SelectionStrategy
    scores: Optional[List[float]] = None

    @model_validator(mode="after")
    def check_distinct(self) -> "FeatureSet":
        if len(set(self.subwords)) != len(self.subwords):
            raise ValueError("Selected subwords must be distinct")
        if self.scores is not None and len(self.scores) != len(self.subwords):
            raise ValueError("One score per subword is required")
        return self

    def __len__(self) -> int:
        return len(self.subwords)


class MiningStats(BaseModel):
    """Trie search counters."""

    visited: int = 0
    expanded: int = 0
    pruned: int = 0
    admitted: int = 0
    threshold: float = Field(0.0, ge=0)
