import math

import numpy as np
import pytest
from pydantic import TypeAdapter, ValidationError

from app.exceptions import StateNormalizationError
from app.schemas.params import ScatterParams
from app.schemas.report import ResultTable
from app.schemas.run import SweepGrid, SweepRange
from app.schemas.state import CustomState, FockState, InitialState, SqueezedState
from app.services.export_service import ExportService, format_number
from app.utils.cli_args import parse_n_max, parse_range, parse_state


def test_rho_is_derived():
    params = ScatterParams(gamma=2.0, delta=3.0)
    assert params.rho == complex(1.5, 1.0)
    assert params.scaled(10).rho == complex(15.0, 10.0)
    with pytest.raises(ValidationError):
        params.gamma = 5.0


@pytest.mark.parametrize("kwargs", [{"gamma": -1.0}, {"gamma": math.inf}, {"gamma": 1.0, "delta": math.nan}])
def test_invalid_params(kwargs):
    with pytest.raises(ValidationError):
        ScatterParams(**kwargs)


def test_state_union_discriminates():
    adapter = TypeAdapter(InitialState)
    assert isinstance(adapter.validate_python({"kind": "fock", "n": 3}), FockState)
    assert isinstance(adapter.validate_python({"kind": "squeezed", "magnitude": 0.2}), SqueezedState)
    with pytest.raises(ValidationError):
        adapter.validate_python({"kind": "custom", "amps": [[1.0, 0.0], [0.5, 0.0]]})


def test_parse_state_forms():
    assert parse_state("fock:4") == FockState(n=4)
    squeezed = parse_state("squeezed:0.3,1.2")
    assert (squeezed.magnitude, squeezed.theta) == (0.3, 1.2)
    assert parse_state("coherent:2.5").nbar == 2.5


def test_parse_helpers():
    assert parse_n_max("auto") is None
    assert parse_n_max("12") == 12
    assert parse_range("0.5", "--gamma") == [0.5]
    assert parse_range("0:1:5", "--gamma") == [0.0, 0.25, 0.5, 0.75, 1.0]


def test_sweep_grid_points_sorted():
    grid = SweepGrid(gamma_values=[2.0, 1.0], delta_values=[0.0], nbar_values=[3.0, 1.0])
    assert grid.points() == [(1.0, 0.0, 1.0), (1.0, 0.0, 3.0), (2.0, 0.0, 1.0), (2.0, 0.0, 3.0)]
    with pytest.raises(ValidationError):
        SweepGrid(gamma_values=[], delta_values=[0.0], nbar_values=[1.0])
    with pytest.raises(ValidationError):
        SweepRange(start=0.0, stop=1.0, count=0)


def test_custom_state_support():
    state = CustomState.from_amplitudes(np.array([0.0, 0.6, 0.8j]))
    assert state.support == 2


@pytest.mark.parametrize("pairs", [[[0.6, 0.0], [math.nan, 0.0]], [[math.nan, 0.0]], [[1.0, math.inf]]])
def test_custom_state_rejects_non_finite(pairs):
    with pytest.raises(StateNormalizationError):
        CustomState.from_pairs(pairs)
    with pytest.raises(ValidationError):
        CustomState(amps=[tuple(p) for p in pairs])


def test_number_formatting():
    assert format_number(3) == "3"
    assert format_number(True) == "1"
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(float("nan")) == "nan"
    assert float(format_number(1 / 3)) == 1 / 3


def test_json_maps_nan_to_null():
    table = ResultTable(command="dist", params={"gamma": 1.0}, columns=["n", "x"], rows=[[0, float("nan")]])
    text = ExportService.to_json(table)
    assert '"x": null' in text
    csv_text = ExportService.to_csv(table)
    assert csv_text.splitlines()[-1] == "0,nan"
