import argparse
import json
import math
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from app.config import get_settings
from app.exceptions import InvalidParameterError, StateNormalizationError
from app.schemas.params import ScatterParams
from app.schemas.run import Command, OutputFormat, RunConfig, SweepGrid, SweepRange
from app.schemas.state import CoherentState, CustomState, FockState, InitialState, SqueezedState

FLAG_NAMES = {
    "gamma": "--gamma",
    "delta": "--delta",
    "nbar": "--nbar",
    "n": "--state",
    "magnitude": "--state",
    "theta": "--state",
    "jobs": "--jobs",
}


def _describe(error: ValidationError, flag: str = None) -> str:
    parts = []
    for item in error.errors():
        field = str(item["loc"][0]) if item["loc"] else ""
        name = flag or FLAG_NAMES.get(field, f"--{field}")
        parts.append(f"{name}: {item['msg']}")
    return "; ".join(parts)


def add_output_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.CSV.value)
    parser.add_argument("--out", default=None, help="output path, stdout when omitted")


def add_params_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--gamma", type=float, required=True, help="dimensionless coupling")
    parser.add_argument("--delta", type=float, default=0.0, help="dimensionless detuning")


def params_from_args(args: argparse.Namespace) -> ScatterParams:
    try:
        return ScatterParams(gamma=args.gamma, delta=args.delta)
    except ValidationError as e:
        raise InvalidParameterError(_describe(e))


def parse_nbar(value: float) -> float:
    if not (math.isfinite(value) and value >= 0):
        raise InvalidParameterError(f"--nbar: must be finite and >= 0, got {value}")
    return value


def parse_n_max(text: Optional[str]) -> Optional[int]:
    """'auto' (or nothing) selects Auto truncation."""
    if text is None or str(text).lower() == "auto":
        return None
    try:
        value = int(text)
    except ValueError:
        raise InvalidParameterError(f"--nmax: expected an integer or 'auto', got {text!r}")
    if value < 0:
        raise InvalidParameterError(f"--nmax: must be >= 0, got {value}")
    return value


def parse_range(text: str, flag: str) -> List[float]:
    """A single value or start:stop:count."""
    parts = text.split(":")
    if len(parts) not in (1, 3):
        raise InvalidParameterError(f"{flag}: expected VALUE or START:STOP:COUNT, got {text!r}")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        return SweepRange(start=float(parts[0]), stop=float(parts[1]), count=int(parts[2])).values()
    except ValidationError as e:
        raise InvalidParameterError(_describe(e, flag))
    except ValueError:
        raise InvalidParameterError(f"{flag}: cannot parse {text!r}")


def load_custom_state(path: str) -> CustomState:
    """JSON array of [re, im] pairs indexed by photon number."""
    try:
        pairs = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise InvalidParameterError(f"--state: cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise InvalidParameterError(f"--state: {path} is not valid JSON: {e}")
    if not isinstance(pairs, list) or not all(
        isinstance(p, list) and len(p) == 2 and all(isinstance(x, (int, float)) for x in p) for p in pairs
    ):
        raise InvalidParameterError(f"--state: {path} must hold a JSON array of [re, im] pairs")
    return CustomState.from_pairs(pairs)


def parse_state(text: str) -> InitialState:
    """coherent:NBAR | fock:N | squeezed:MAG,THETA | custom:FILE"""
    kind, sep, rest = text.partition(":")
    if not sep or not rest:
        raise InvalidParameterError(f"--state: expected KIND:VALUE, got {text!r}")
    kind = kind.lower()
    try:
        if kind == "coherent":
            return CoherentState(nbar=float(rest))
        if kind == "fock":
            return FockState(n=int(rest))
        if kind == "squeezed":
            magnitude, _, theta = rest.partition(",")
            return SqueezedState(magnitude=float(magnitude), theta=float(theta or 0.0))
        if kind == "custom":
            return load_custom_state(rest)
    except ValidationError as e:
        raise InvalidParameterError(_describe(e, "--state"))
    except (InvalidParameterError, StateNormalizationError):
        raise
    except ValueError as e:
        raise InvalidParameterError(f"--state: cannot parse {text!r}: {e}")
    raise InvalidParameterError(f"--state: unknown kind {kind!r}; use coherent, fock, squeezed or custom")


def grid_from_args(args: argparse.Namespace) -> SweepGrid:
    try:
        return SweepGrid(
            gamma_values=parse_range(args.gamma, "--gamma"),
            delta_values=parse_range(args.delta, "--delta"),
            nbar_values=parse_range(args.nbar, "--nbar"),
        )
    except ValidationError as e:
        raise InvalidParameterError("; ".join(
            f"--{str(item['loc'][0]).removesuffix('_values')}: {item['msg']}" for item in e.errors()
        ))


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Validate the flags every sub-command shares into a RunConfig."""
    command = Command(args.command)
    fields = {}
    if command == Command.SWEEP:
        fields["grid"] = grid_from_args(args)
        fields["jobs"] = get_settings().DEFAULT_JOBS if args.jobs is None else args.jobs
    elif getattr(args, "gamma", None) is not None:
        fields["params"] = params_from_args(args)
    if getattr(args, "state", None) is not None:
        fields["state"] = parse_state(args.state)
    if hasattr(args, "nmax"):
        fields["n_max"] = parse_n_max(args.nmax)
    try:
        return RunConfig(
            command=command,
            output_format=OutputFormat(args.format),
            output_path=args.out,
            **fields,
        )
    except ValidationError as e:
        raise InvalidParameterError(_describe(e))
