import math

import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st

from app.exceptions import InvalidParameterError, StateNormalizationError
from app.schemas.distribution import Channel
from app.schemas.state import CoherentState, CustomState, FockState, SqueezedState
from app.services.continuum_service import ContinuumService
from app.services.counting_service import CountingService


@hypothesis_settings(max_examples=40, deadline=None)
@given(st.integers(0, 20), st.floats(0.0, 1.0))
def test_fock_state_is_all_or_nothing(N, T):
    probs = ContinuumService.continuum_distribution(FockState(n=N), T).probs
    expected = np.zeros_like(probs)
    expected[N] += T ** N
    expected[0] += 1.0 - T ** N
    assert np.allclose(probs, expected, rtol=0, atol=1e-14)


def test_coherent_law_is_bimodal():
    nbar, T = 4.0, 0.3
    probs = ContinuumService.continuum_distribution(CoherentState(nbar=nbar), T).probs
    poisson = CountingService.poisson_weights(nbar * T, len(probs) - 1)
    assert np.allclose(probs[1:], math.exp(-nbar * (1 - T)) * poisson[1:], rtol=1e-12, atol=0)
    assert math.fsum(probs) == pytest.approx(1.0, abs=1e-14)


def test_coherent_closed_form_matches_general_formula():
    state = CoherentState(nbar=3.0)
    amplitudes = np.sqrt(CountingService.poisson_weights(3.0, CountingService.auto_n_max(3.0)))
    amplitudes /= np.linalg.norm(amplitudes)
    custom = CustomState.from_amplitudes(amplitudes)
    for lambda_r, lambda_l in [(0.0, 0.0), (0.5, 0.0), (0.0, 1.2), (0.9, -0.4)]:
        closed = ContinuumService.continuum_F(state, 0.4, lambda_r, lambda_l)
        general = ContinuumService.continuum_F(custom, 0.4, lambda_r, lambda_l)
        assert abs(closed - general) < 1e-10


def test_fock_generating_function():
    F = ContinuumService.continuum_F(FockState(n=3), 0.5, 0.7)
    assert abs(F - (1 + (np.exp(2.1j) - 1) * 0.125)) < 1e-14
    assert abs(ContinuumService.continuum_F(FockState(n=3), 0.5, 0.0, 0.0) - 1) < 1e-14


def test_custom_route_matches_fock():
    custom = ContinuumService.continuum_distribution(CustomState.from_pairs([[0, 0], [0, 0], [0, 0], [1, 0]]), 0.3)
    fock = ContinuumService.continuum_distribution(FockState(n=3), 0.3)
    assert np.allclose(custom.probs, fock.probs, rtol=0, atol=1e-12)


@pytest.mark.parametrize("state", [
    CoherentState(nbar=3.0),
    FockState(n=4),
    SqueezedState(magnitude=0.5, theta=0.3),
    CustomState.from_amplitudes(np.array([0.6, 0.0, 0.8j])),
])
def test_backward_channel_is_forward_at_reflection(state):
    forward = ContinuumService.continuum_distribution(state, 0.3, Channel.FORWARD).probs
    backward = ContinuumService.continuum_distribution(state, 0.7, Channel.BACKWARD).probs
    assert np.allclose(forward, backward, rtol=0, atol=1e-12)


def test_squeezed_amplitudes_normalized():
    psi = ContinuumService.squeezed_amplitudes(1.0, 0.4)
    assert math.fsum(np.abs(psi) ** 2) == pytest.approx(1.0, abs=1e-14)
    assert np.all(psi[1::2] == 0)


def test_squeezed_closed_form_with_linear_transmission_is_exact():
    dist = ContinuumService.squeezed_distribution(1.0, 0.0, 0.5, power=1)
    assert dist.meta["max_discrepancy"] < 1e-10
    assert dist.meta["d"] <= 1.0


def test_squeezed_default_power_reports_discrepancy():
    dist = ContinuumService.squeezed_distribution(1.0, 0.0, 0.5)
    assert dist.meta["power"] == 2
    assert dist.meta["max_discrepancy"] > 1e-6
    assert dist.reference_probs is not None


def test_invalid_inputs():
    with pytest.raises(InvalidParameterError):
        ContinuumService.continuum_distribution(CoherentState(nbar=1.0), 1.5)
    with pytest.raises(InvalidParameterError):
        ContinuumService.continuum_distribution(FockState(n=5), 0.5, n_max=3)
    with pytest.raises(InvalidParameterError):
        ContinuumService.continuum_distribution(CoherentState(nbar=1.0), 0.5, Channel.JOINT_MARGINAL)
    with pytest.raises(InvalidParameterError):
        ContinuumService.squeezed_amplitudes(30.0, 0.0)


def test_unnormalized_custom_state():
    with pytest.raises(StateNormalizationError):
        CustomState.from_pairs([[1.0, 0.0], [1.0, 0.0]])
