import math

from pydantic import BaseModel, ConfigDict, Field, field_validator


class ScatterParams(BaseModel):
    """Dimensionless coupling gamma = pi g^2 L and detuning delta = (k0 - Delta) L."""

    model_config = ConfigDict(frozen=True)

    gamma: float = Field(..., ge=0)
    delta: float = 0.0

    @field_validator("gamma", "delta")
    @classmethod
    def validate_finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v

    @property
    def rho(self) -> complex:
        # rho = (delta + i gamma) / 2, derived so it can never drift from gamma/delta
        return complex(self.delta / 2, self.gamma / 2)

    @property
    def is_decoupled(self) -> bool:
        return self.gamma == 0

    def scaled(self, factor: float) -> "ScatterParams":
        """Same delta/gamma ratio at a pulse length multiplied by ``factor``."""
        return ScatterParams(gamma=self.gamma * factor, delta=self.delta * factor)

    def describe(self) -> dict:
        rho = self.rho
        return {"gamma": self.gamma, "delta": self.delta, "rho_re": rho.real, "rho_im": rho.imag}


class ContinuumAmplitudes(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    t: complex
    r: complex
    T: float
    R: float
