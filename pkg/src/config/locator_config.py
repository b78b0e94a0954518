from typing import List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from config.config import LOCATE_METHODS

# Index build settings
BUILD_SETTINGS = {
    "chunk_pairs": 2_000_000,  # max (item, cell) pairs evaluated per vectorized batch
    "fallback_warn": True      # log every cell resolved by the fallback pass
}

# Neighbour-walk settings
WALK_SETTINGS = {
    "tie_epsilon": 1e-12,   # relative to segment length
    "tie_retries": 8
}

# Experiment defaults (desk scale)
BENCH_SETTINGS = {
    "particles": 10_000,
    "steps": 10,
    "deltas": [0.1, 1.0, 5.0],
    "seed": 20240501,
    "max_resample": 10_000,
    "check_fraction": 0.01,
    "methods": ["patch", "walk", "auxgrid"]
}


class BuildConfig(BaseModel):
    """Options accepted by the index builders."""
    w_star: Optional[float] = Field(default=None, gt=0)
    w_star_margin: Optional[float] = Field(default=None, gt=0)
    tolerance: Optional[float] = Field(default=None, gt=0)
    padding: Optional[float] = Field(default=None, ge=0)
    seed: int = 0

    @model_validator(mode="after")
    def _one_w_star_source(self):
        if self.w_star is not None and self.w_star_margin is not None:
            raise ValueError("w_star and w_star_margin are mutually exclusive")
        return self


class WalkConfig(BaseModel):
    """One random-walk locate experiment."""
    particles: int = Field(default=BENCH_SETTINGS["particles"], ge=1)
    steps: int = Field(default=BENCH_SETTINGS["steps"], ge=1)
    delta: float = Field(default=1.0, gt=0)
    seed: int = Field(default=BENCH_SETTINGS["seed"], ge=0, lt=2 ** 64)
    method: str = "patch"
    dim: int = 2
    mesh_path: Optional[str] = None
    n: int = Field(default=20, ge=1)
    domain: Optional[List[float]] = None
    mixed: bool = False
    l_shape: bool = False
    check_fraction: float = Field(default=BENCH_SETTINGS["check_fraction"], ge=0, le=1)
    max_resample: int = Field(default=BENCH_SETTINGS["max_resample"], ge=1)
    workers: int = Field(default=1, ge=1)
    build: BuildConfig = Field(default_factory=BuildConfig)

    @field_validator("method")
    @classmethod
    def _known_method(cls, value: str) -> str:
        if value not in LOCATE_METHODS:
            raise ValueError(f"unknown method {value!r}, expected one of {LOCATE_METHODS}")
        return value

    @field_validator("dim")
    @classmethod
    def _known_dim(cls, value: int) -> int:
        if value not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        return value

    @field_validator("domain")
    @classmethod
    def _domain_pair(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is not None and (len(value) != 2 or value[0] >= value[1]):
            raise ValueError("domain must be [lo, hi] with lo < hi")
        return value

    @model_validator(mode="after")
    def _generator_options(self):
        if self.mesh_path is None and (self.mixed or self.l_shape) and self.dim != 2:
            raise ValueError("mixed and l_shape meshes are 2D only")
        if self.mixed and self.l_shape:
            raise ValueError("mixed and l_shape are mutually exclusive")
        return self
