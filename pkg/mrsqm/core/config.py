from typing import List

from pydantic import field_validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    PROJECT_NAME: str = "MrSQM"

    # Symbolic representations
    TRANSFORM: str = "sfa"
    K: float = 5
    MIN_WINDOW: int = 8
    WORD_LENGTHS: List[int] = [6, 8, 10, 12, 14, 16]
    ALPHABET_SIZES: List[int] = [3, 4, 5, 6]
    NUMEROSITY_REDUCTION: bool = True
    DROP_DC: bool = False

    # Feature selection
    STRATEGY: str = "rs"
    FEATURES_PER_REP: int = 500
    POOL_MULTIPLIER: int = 4
    RANDOM_ATTEMPT_FACTOR: int = 50
    MIN_SUPPORT: int = 2

    # Classifier
    REG_STRENGTH: float = 1.0
    TOL: float = 1e-4
    MAX_ITER: int = 1000

    # Runtime
    SEED: int = 42
    N_JOBS: int = 1
    LOG_LEVEL: str = "INFO"
    MODEL_FORMAT_VERSION: int = 1

    @field_validator("WORD_LENGTHS", "ALPHABET_SIZES", mode="before")
    def split_int_list(cls, v):
        if isinstance(v, str) and not v.startswith("["):
            return [int(i.strip()) for i in v.split(",") if i.strip()]
        return v

    @field_validator("ALPHABET_SIZES")
    def check_alphabet_sizes(cls, v: List[int]) -> List[int]:
        for size in v:
            if not 2 <= size <= 26:
                raise ValueError(f"Alphabet size {size} outside 2..26")
        return v

    class Config:
        env_prefix = "MRSQM_"
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = True


settings = Settings()
