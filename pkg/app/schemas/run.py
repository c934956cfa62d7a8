import itertools
import math
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from app.schemas.params import ScatterParams
from app.schemas.state import InitialState


class Command(str, Enum):
    DIST = "dist"
    JOINT = "joint"
    COEFFS = "coeffs"
    CONTINUUM = "continuum"
    SWEEP = "sweep"
    VALIDATE = "validate"
    FCS = "fcs"
    KERNEL = "kernel"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class SweepRange(BaseModel):
    """Linear range written start:stop:count on the command line."""

    start: float
    stop: float
    count: int = Field(..., ge=1)

    @model_validator(mode="after")
    def validate_bounds(self):
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("range bounds must be finite")
        if self.start > self.stop:
            raise ValueError(f"range start {self.start} exceeds stop {self.stop}")
        return self

    def values(self) -> List[float]:
        if self.count == 1:
            return [self.start]
        return [float(v) for v in np.linspace(self.start, self.stop, self.count)]


class SweepGrid(BaseModel):
    gamma_values: List[float]
    delta_values: List[float]
    nbar_values: List[float]

    @field_validator("gamma_values", "delta_values", "nbar_values")
    @classmethod
    def validate_values(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("sweep axis is empty")
        if not all(math.isfinite(x) for x in v):
            raise ValueError("sweep values must be finite")
        return v

    @field_validator("gamma_values", "nbar_values")
    @classmethod
    def validate_nonnegative(cls, v: List[float]) -> List[float]:
        if any(x < 0 for x in v):
            raise ValueError("must be >= 0")
        return v

    def points(self) -> List[Tuple[float, float, float]]:
        """(gamma, delta, nbar) grid points sorted by coordinate."""
        return sorted(set(itertools.product(self.gamma_values, self.delta_values, self.nbar_values)))


class RunConfig(BaseModel):
    """Parsed command line shared by every sub-command handler."""

    command: Command
    params: Optional[ScatterParams] = None
    grid: Optional[SweepGrid] = None
    state: Optional[InitialState] = None
    n_max: Optional[int] = Field(None, ge=0)  # None means Auto
    output_format: OutputFormat = OutputFormat.CSV
    output_path: Optional[str] = None
    jobs: int = 1

    @field_validator("jobs")
    @classmethod
    def validate_jobs(cls, v: int) -> int:
        # negative counts follow joblib: -1 is every core
        if v == 0:
            raise ValueError("must be nonzero")
        return v
