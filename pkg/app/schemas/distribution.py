from enum import Enum
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.schemas.params import ScatterParams


class Channel(str, Enum):
    FORWARD = "r"
    BACKWARD = "l"
    JOINT_MARGINAL = "joint_marginal"


class CountDistribution(BaseModel):
    """Photon-number distribution of one counted channel.

    ``probs`` carries the normalization-completing zero bucket, ``raw_probs``
    the plain products p(n)|s_n|^2 including n = 0. Both conventions are kept
    so either can be exported.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    channel: Channel
    probs: np.ndarray
    raw_probs: Optional[np.ndarray] = None
    s_abs2: Optional[np.ndarray] = None
    reference_probs: Optional[np.ndarray] = None
    zero_bucket_mass: float
    norm_defect: float
    params: Optional[ScatterParams] = None
    nbar: Optional[float] = None
    meta: Dict[str, float] = {}

    @property
    def n_max(self) -> int:
        return len(self.probs) - 1

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.probs))

    def clamped(self) -> np.ndarray:
        """probs with round-off negatives set to zero, for export."""
        return np.clip(self.probs, 0.0, None)

    def rows(self) -> List[list]:
        raw = self.raw_probs if self.raw_probs is not None else self.probs
        s_abs2 = self.s_abs2 if self.s_abs2 is not None else np.full(len(self.probs), np.nan)
        clamped = self.clamped()
        return [
            [n, float(raw[n]), float(clamped[n]), float(s_abs2[n])]
            for n in range(len(self.probs))
        ]


class JointDistribution(BaseModel):
    """Joint forward/backward counts q[n][m] for n + m <= n_max.

    Row 0 and column 0 hold the single-channel cells, q[0][0] the joint zero
    cell. Cells may go negative; ``negative_mass`` sums them.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    params: ScatterParams
    nbar: float
    q: np.ndarray
    negative_mass: float
    min_cell: float

    @property
    def n_max(self) -> int:
        return self.q.shape[0] - 1

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.q))

    def forward_marginal(self) -> np.ndarray:
        return self.q.sum(axis=1)

    def backward_marginal(self) -> np.ndarray:
        return self.q.sum(axis=0)

    def rows(self) -> List[list]:
        return [
            [n, m, float(self.q[n, m])]
            for n in range(self.n_max + 1)
            for m in range(self.n_max + 1 - n)
        ]


class MomentReport(BaseModel):
    mean: float
    variance: float
    fano: Optional[float] = None
    mandel_q: Optional[float] = None
    fano_defined: bool = True
    cumulants: List[float]
