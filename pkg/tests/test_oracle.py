import cmath

import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st

from app.exceptions import BranchError, InvalidParameterError
from app.schemas.kernel import KernelRoute
from app.schemas.params import ScatterParams
from app.services.oracle_service import TRIG, OracleService
from app.services.scattering_service import ScatteringService


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


@hypothesis_settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 20.0), st.floats(-20.0, 20.0))
def test_kernel_is_one_at_origin(gamma, delta):
    params = ScatterParams(gamma=gamma, delta=delta)
    assert abs(OracleService.kernel_d_tilde(params, 0.0) - 1) < 1e-9


@pytest.mark.parametrize("gamma, delta", [(0.1, 0.0), (1.0, 1.0), (5.0, 0.0), (1.0, 5.0)])
@pytest.mark.parametrize("w", [0.3, -0.3, 0.1 + 0.2j])
def test_kernel_routes_agree(gamma, delta, w):
    params = ScatterParams(gamma=gamma, delta=delta)
    values = [OracleService.kernel_value(params, w, route).value for route in KernelRoute]
    for value in values[1:]:
        assert _rel(value, values[0]) < 1e-10


def test_root_form_at_double_root():
    params = ScatterParams(gamma=1.0, delta=1.0)
    w0 = -params.rho ** 2 / (2 * params.gamma)
    expected = cmath.exp(1j * params.rho) * (1 - 1j * params.rho)
    assert _rel(OracleService.kernel_root_form(params, w0), expected) < 1e-12
    assert _rel(OracleService.kernel_d_tilde(params, w0), expected) < 1e-12


def test_oracle_matches_bessel_sum(detuned):
    for n, m in [(0, 0), (3, 2), (5, 0), (0, 6)]:
        oracle = OracleService.s_nm_oracle(detuned, n, m)
        assert abs(oracle - ScatteringService.s_nm(detuned, n, m)) < 1e-10


def test_padding_does_not_change_low_orders(detuned):
    plain = OracleService.s_nm_oracle(detuned, 2, 1)
    padded = OracleService.s_nm_oracle(detuned, 2, 1, padding=5)
    assert abs(plain - padded) < 1e-12


def test_trig_jet_form_agrees_at_moderate_coupling():
    params = ScatterParams(gamma=2.0, delta=1.0)
    entire = OracleService.s_nm_oracle(params, 2, 1)
    trig = OracleService.s_nm_oracle(params, 2, 1, form=TRIG)
    assert abs(entire - trig) < 1e-8


def test_branch_and_argument_errors(detuned):
    with pytest.raises(BranchError):
        OracleService.kernel_jet(ScatterParams(gamma=0.0, delta=0.0), 3)
    with pytest.raises(InvalidParameterError):
        OracleService.s_nm_oracle(detuned, 1, 1, padding=-1)
    with pytest.raises(InvalidParameterError):
        OracleService.kernel_jet(detuned, 3, form="bogus")


def test_kernel_value_carries_route(resonant):
    result = OracleService.kernel_value(resonant, 0.0, KernelRoute.SERIES_EXPANSION)
    assert result.route == KernelRoute.SERIES_EXPANSION
    assert abs(result.value - 1) < 1e-12
