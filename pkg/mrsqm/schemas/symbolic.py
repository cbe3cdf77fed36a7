from functools import cached_property
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from mrsqm.models.enums import TransformType


class ReprConfig(BaseModel):
    """
    Parameters of one symbolic representation plus its fitted discretization.

    SAX needs no fitted state (the Gaussian breakpoints are fixed); SFA carries
    word_length rows of alphabet_size - 1 bin edges once fitted.
    """
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    transform: TransformType
    window_size: int = Field(..., alias="l", ge=1)
    word_length: int = Field(..., alias="w", ge=1)
    alphabet_size: int = Field(..., alias="alpha", ge=2, le=26)
    numerosity_reduction: bool = True
    drop_dc: bool = False
    bins: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def check_invariants(self) -> "ReprConfig":
        if self.transform not in (TransformType.SAX, TransformType.SFA):
            raise ValueError(f"A representation is either sax or sfa, not {self.transform.value}")
        if self.word_length > self.window_size:
            raise ValueError(
                f"Word length {self.word_length} exceeds window size {self.window_size}"
            )
        if self.bins is not None:
            if self.transform != TransformType.SFA:
                raise ValueError("Only SFA representations carry bin edges")
            edges = np.asarray(self.bins, dtype=np.float64)
            if edges.shape != (self.word_length, self.alphabet_size - 1):
                raise ValueError(
                    f"Bin edges shape {edges.shape} does not match "
                    f"({self.word_length}, {self.alphabet_size - 1})"
                )
            if np.any(np.diff(edges, axis=1) < 0):
                raise ValueError("Bin edges must be non-decreasing per coefficient")
        return self

    @property
    def is_fitted(self) -> bool:
        return self.transform == TransformType.SAX or self.bins is not None

    @property
    def bin_edges(self) -> Optional[np.ndarray]:
        if self.bins is None:
            return None
        return np.asarray(self.bins, dtype=np.float64)

    def describe(self) -> str:
        return (
            f"{self.transform.value}(l={self.window_size}, w={self.word_length}, "
            f"alpha={self.alphabet_size})"
        )


class SymbolicSequence(BaseModel):
    """Ordered symbolic words produced by one representation for one series."""

    words: List[str]

    @cached_property
    def text(self) -> str:
        # words never contain spaces, so substring tests on the joined text
        # cannot match across word boundaries
        return " ".join(self.words)

    def __len__(self) -> int:
        return len(self.words)
