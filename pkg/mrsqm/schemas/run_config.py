from typing import Dict, Optional

from pydantic import BaseModel, Field, model_validator

from mrsqm.core.config import settings
from mrsqm.models.enums import SelectionStrategy, TransformType


class RunConfig(BaseModel):
    """
    Reproducible configuration of one fit: transforms, densities, selection and
    classifier hyperparameters. Defaults come from Settings.
    """
    transform: TransformType = TransformType(settings.TRANSFORM)
    sax_k: float = Field(0, ge=0)
    sfa_k: float = Field(settings.K, ge=0)
    strategy: SelectionStrategy = SelectionStrategy(settings.STRATEGY)
    features_per_rep: int = Field(settings.FEATURES_PER_REP, ge=1)
    seed: int = settings.SEED
    numerosity_reduction: bool = settings.NUMEROSITY_REDUCTION
    drop_dc: bool = settings.DROP_DC
    pool_multiplier: int = Field(settings.POOL_MULTIPLIER, ge=1)
    min_support: int = Field(settings.MIN_SUPPORT, ge=1)
    reg_strength: float = Field(settings.REG_STRENGTH, gt=0)
    tol: float = Field(settings.TOL, gt=0)
    max_iter: int = Field(settings.MAX_ITER, ge=1)
    n_jobs: int = settings.N_JOBS

    train_path: Optional[str] = None
    out_path: Optional[str] = None

    @classmethod
    def for_transform(cls, transform: TransformType, k: float = settings.K, **kwargs) -> "RunConfig":
        """Build a config for a single transform with density k."""
        transform = TransformType(transform)
        if transform == TransformType.SAX:
            return cls(transform=transform, sax_k=k, sfa_k=0, **kwargs)
        if transform == TransformType.SFA:
            return cls(transform=transform, sax_k=0, sfa_k=k, **kwargs)
        return cls(transform=transform, sax_k=k, sfa_k=k, **kwargs)

    @model_validator(mode="after")
    def check_densities(self) -> "RunConfig":
        if self.transform == TransformType.BOTH:
            if self.sax_k < 1 or self.sfa_k < 1:
                raise ValueError("transform=both requires sax_k >= 1 and sfa_k >= 1")
        elif self.transforms()[self.transform] < 1:
            raise ValueError(f"{self.transform.value}_k must be >= 1")
        return self

    def transforms(self) -> Dict[TransformType, float]:
        """Density per transform in use, SAX first."""
        if self.transform == TransformType.BOTH:
            return {TransformType.SAX: self.sax_k, TransformType.SFA: self.sfa_k}
        if self.transform == TransformType.SAX:
            return {TransformType.SAX: self.sax_k}
        return {TransformType.SFA: self.sfa_k}

    def echo(self) -> str:
        """Single reproducibility line."""
        densities = ",".join(f"{t.value}_k={k:g}" for t, k in self.transforms().items())
        line = (
            f"transform={self.transform.value} {densities} strategy={self.strategy.value} "
            f"features={self.features_per_rep} seed={self.seed} "
            f"numerosity_reduction={self.numerosity_reduction} drop_dc={self.drop_dc} "
            f"reg_strength={self.reg_strength:g} tol={self.tol:g} max_iter={self.max_iter}"
        )
        if self.train_path:
            line += f" train={self.train_path}"
        if self.out_path:
            line += f" out={self.out_path}"
        return line
