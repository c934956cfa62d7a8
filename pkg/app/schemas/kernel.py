from enum import Enum

from pydantic import BaseModel, ConfigDict


class KernelRoute(str, Enum):
    TRIG_CLOSED_FORM = "trig"
    ROOT_REPRESENTATION = "roots"
    SERIES_EXPANSION = "series"


class KernelValue(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    value: complex
    route: KernelRoute
