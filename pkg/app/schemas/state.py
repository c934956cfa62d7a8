import math
from typing import List, Literal, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator
from typing_extensions import Annotated

from app.exceptions import StateNormalizationError

NORMALIZATION_TOLERANCE = 1e-10


class CoherentState(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["coherent"] = "coherent"
    nbar: float = Field(..., ge=0)


class FockState(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["fock"] = "fock"
    n: int = Field(..., ge=0)


class SqueezedState(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["squeezed"] = "squeezed"
    magnitude: float = Field(..., ge=0)
    theta: float = 0.0


class CustomState(BaseModel):
    """Arbitrary state sum_n psi_n |n>, amplitudes stored as (re, im) pairs."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["custom"] = "custom"
    amps: List[Tuple[float, float]]

    @field_validator("amps")
    @classmethod
    def validate_normalized(cls, v: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        if not v:
            raise ValueError("a custom state needs at least one amplitude")
        if not all(math.isfinite(re) and math.isfinite(im) for re, im in v):
            raise ValueError("amplitudes must be finite")
        norm = math.fsum(re * re + im * im for re, im in v)
        if abs(norm - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValueError(f"amplitudes are not normalized: sum |psi_n|^2 = {norm!r}")
        return v

    @classmethod
    def from_pairs(cls, pairs) -> "CustomState":
        """Build from [re, im] pairs, raising StateNormalizationError on a bad norm."""
        amps = [(float(re), float(im)) for re, im in pairs]
        if not all(math.isfinite(re) and math.isfinite(im) for re, im in amps):
            raise StateNormalizationError("custom state has non-finite amplitudes")
        norm = math.fsum(re * re + im * im for re, im in amps)
        if not amps or abs(norm - 1.0) > NORMALIZATION_TOLERANCE:
            raise StateNormalizationError(
                f"custom state is not normalized: sum |psi_n|^2 = {norm!r}"
            )
        return cls(amps=amps)

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "CustomState":
        return cls.from_pairs([(complex(a).real, complex(a).imag) for a in amplitudes])

    @property
    def support(self) -> int:
        return len(self.amps) - 1


InitialState = Annotated[
    Union[CoherentState, FockState, SqueezedState, CustomState],
    Field(discriminator="kind"),
]
