from enum import Enum
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.schemas.params import ScatterParams


class CoeffRoute(str, Enum):
    BESSEL_SUM = "bessel_sum"
    JET_ORACLE = "jet_oracle"
    FACTORIZED = "factorized"
    DECOUPLED = "decoupled"


class CoeffTable(BaseModel):
    """Dense table of s_nm for n + m <= n_max; cells outside the triangle are zero."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    params: ScatterParams
    n_max: int
    route: CoeffRoute
    entries: np.ndarray
    error_bounds: np.ndarray
    ill_conditioned: List[Tuple[int, int]] = []

    def get(self, n: int, m: int) -> complex:
        if n < 0 or m < 0 or n + m > self.n_max:
            raise IndexError(f"s_{n}{m} is outside the table (n_max={self.n_max})")
        return complex(self.entries[n, m])

    def forward(self) -> np.ndarray:
        """s_n^r = s_{n0}"""
        return self.entries[:, 0].copy()

    def backward(self) -> np.ndarray:
        """s_n^l = s_{0n}"""
        return self.entries[0, :].copy()

    def bound_violations(self, slack: float) -> List[Tuple[int, int]]:
        rows, cols = np.nonzero(np.abs(self.entries) > 1.0 + slack)
        return [(int(n), int(m)) for n, m in zip(rows, cols)]

    def rows(self) -> List[list]:
        out = []
        for n in range(self.n_max + 1):
            for m in range(self.n_max + 1 - n):
                value = self.entries[n, m]
                out.append([n, m, value.real, value.imag, abs(value), float(self.error_bounds[n, m])])
        return out
