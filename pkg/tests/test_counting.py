import math

import numpy as np
import pytest
from scipy.stats import poisson

from app.exceptions import ConditioningError, InvalidParameterError
from app.schemas.distribution import Channel
from app.schemas.params import ScatterParams
from app.services.counting_service import CountingService
from app.services.scattering_service import ScatteringService


def test_poisson_weights():
    assert CountingService.poisson_weight(0.0, 0) == 1.0
    assert CountingService.poisson_weight(0.0, 3) == 0.0
    assert CountingService.poisson_weight(2.0, 3) == pytest.approx(poisson.pmf(3, 2.0), rel=1e-13)
    weights = CountingService.poisson_weights(4.0, 60)
    assert math.fsum(weights) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("nbar", [0.0, 0.5, 4.0, 50.0, 400.0])
def test_auto_n_max_tail(nbar):
    n_max = CountingService.auto_n_max(nbar)
    assert n_max >= nbar
    assert poisson.sf(n_max, nbar) <= 1e-12


@pytest.mark.parametrize("nbar", [float("nan"), -1.0, float("inf")])
def test_invalid_nbar(nbar, resonant):
    with pytest.raises(InvalidParameterError):
        CountingService.channel_distribution(resonant, nbar, Channel.FORWARD)


@pytest.mark.parametrize("channel", [Channel.FORWARD, Channel.BACKWARD])
@pytest.mark.parametrize("gamma, delta, nbar", [(0.5, 0.0, 1.0), (2.0, 1.0, 4.0), (5.0, 0.0, 9.0)])
def test_channel_distribution_is_normalized(channel, gamma, delta, nbar):
    dist = CountingService.channel_distribution(ScatterParams(gamma=gamma, delta=delta), nbar, channel)
    assert math.fsum(dist.probs) == pytest.approx(1.0, abs=1e-12)
    assert dist.norm_defect < 1e-10
    assert np.all(dist.probs >= -1e-12)
    assert np.allclose(dist.probs[1:], dist.raw_probs[1:])
    # photons leaking out of the counted mode only feed the zero bucket
    assert dist.zero_bucket_mass >= dist.raw_probs[0] - 1e-12


def test_decoupled_limits(decoupled):
    nbar = 3.0
    forward = CountingService.channel_distribution(decoupled, nbar, Channel.FORWARD)
    backward = CountingService.channel_distribution(decoupled, nbar, Channel.BACKWARD)
    assert np.allclose(forward.probs[1:], CountingService.poisson_weights(nbar, forward.n_max)[1:], atol=1e-14)
    assert backward.probs[0] == pytest.approx(1.0, abs=1e-14)
    assert np.all(backward.probs[1:] == 0)


def test_zero_photons(resonant):
    dist = CountingService.channel_distribution(resonant, 0.0, Channel.FORWARD, n_max=5)
    assert dist.probs[0] == 1.0
    assert np.all(dist.probs[1:] == 0)


def test_joint_marginals_reproduce_channels(detuned):
    nbar = 3.0
    joint = CountingService.joint_distribution(detuned, nbar)
    forward = CountingService.channel_distribution(detuned, nbar, Channel.FORWARD, joint.n_max)
    backward = CountingService.channel_distribution(detuned, nbar, Channel.BACKWARD, joint.n_max)
    assert np.allclose(joint.forward_marginal(), forward.probs, rtol=0, atol=1e-12)
    assert np.allclose(joint.backward_marginal(), backward.probs, rtol=0, atol=1e-12)
    assert joint.total_mass == pytest.approx(1.0, abs=1e-12)
    assert joint.negative_mass >= 0
    assert len(joint.rows()) == (joint.n_max + 1) * (joint.n_max + 2) // 2


def test_joint_edge_cells_follow_continuum_closed_form():
    # above the factorization threshold s_nm = t^n r^m,
    # so q[n, 0] = e^{-nbar} (nbar T)^n / n! (2 - e^{nbar R})
    params = ScatterParams(gamma=1e5, delta=1e5)
    nbar = 3.0
    amplitudes = ScatteringService.continuum_amplitudes(params)
    joint = CountingService.joint_distribution(params, nbar)
    for n in range(1, 6):
        escape = math.exp(nbar * amplitudes.R)
        expected = poisson.pmf(n, nbar * amplitudes.T) / escape * (2 - escape)
        assert joint.q[n, 0] == pytest.approx(expected, rel=1e-9)
        assert joint.q[n, 0] < 0
    assert joint.negative_mass > 0
    assert joint.total_mass == pytest.approx(1.0, abs=1e-12)


def test_joint_cells_go_negative_at_finite_coupling():
    joint = CountingService.joint_distribution(ScatterParams(gamma=1.0, delta=1.0), 3.0)
    assert joint.min_cell < -1e-3
    assert joint.negative_mass > 0


def test_non_finite_coefficients_are_conditioning_errors(monkeypatch, detuned):
    monkeypatch.setattr(ScatteringService, "marginal", lambda params, n_max, channel: np.full(n_max + 1, np.nan))
    with pytest.raises(ConditioningError, match="non-finite"):
        CountingService.channel_distribution(detuned, 2.0, Channel.FORWARD, n_max=6)

    table = ScatteringService.coeff_table(detuned, 6)
    table.entries[2, 1] = np.inf
    monkeypatch.setattr(ScatteringService, "coeff_table", lambda params, n_max: table)
    with pytest.raises(ConditioningError, match="non-finite"):
        CountingService.joint_distribution(detuned, 2.0, n_max=6)


def test_generating_function_normalization_and_periodicity(detuned):
    nbar = 2.0
    assert abs(CountingService.evaluate_F(detuned, nbar, 0.0, 0.0) - 1) < 1e-12
    base = CountingService.evaluate_F(detuned, nbar, 0.7, 0.0)
    shifted = CountingService.evaluate_F(detuned, nbar, 0.7 + 2 * math.pi, 0.0)
    assert abs(base - shifted) < 1e-12
    assert abs(base) <= 1 + 1e-12


def test_generating_function_matches_joint_sum(detuned):
    nbar = 2.0
    joint = CountingService.joint_distribution(detuned, nbar)
    n = np.arange(joint.n_max + 1)
    direct = np.exp(0.4j * n) @ joint.q @ np.exp(-1.1j * n)
    assert abs(CountingService.evaluate_F(detuned, nbar, 0.4, -1.1, joint.n_max) - direct) < 1e-12


def test_generating_function_broadcasts(detuned):
    values = CountingService.evaluate_F(detuned, 2.0, np.array([0.0, 0.5, 1.0]))
    assert values.shape == (3,)
    assert abs(values[0] - 1) < 1e-12


def test_fugacity_arguments(detuned):
    nbar = 2.0
    dist = CountingService.channel_distribution(detuned, nbar, Channel.FORWARD)
    parity = CountingService.evaluate_F_fugacity(detuned, nbar, -1.0)
    expected = math.fsum(dist.probs * (-1.0) ** np.arange(len(dist.probs)))
    assert abs(parity - expected) < 1e-12
    assert abs(CountingService.evaluate_F_fugacity(detuned, nbar, 0.0) - dist.probs[0]) < 1e-12
    with pytest.raises(InvalidParameterError):
        CountingService.evaluate_F_fugacity(detuned, nbar, 2.0)
    with pytest.raises(InvalidParameterError):
        CountingService.evaluate_F_fugacity(detuned, nbar, 0.5 + 0.5j)


def test_fourier_recovers_distribution(resonant):
    nbar = 3.0
    dist = CountingService.channel_distribution(resonant, nbar, Channel.FORWARD)
    count = 2 * (dist.n_max + 1)
    values = CountingService.evaluate_F(resonant, nbar, CountingService.fourier_nodes(count), 0.0, dist.n_max)
    recovered = CountingService.fourier_recover(values)
    assert np.allclose(recovered[: dist.n_max + 1], dist.probs, rtol=0, atol=1e-12)
    assert np.allclose(recovered[dist.n_max + 1 :], 0.0, atol=1e-12)


def test_poissonian_moments(decoupled):
    nbar = 2.5
    dist = CountingService.channel_distribution(decoupled, nbar, Channel.FORWARD)
    report = CountingService.moments(dist)
    assert report.mean == pytest.approx(nbar, rel=1e-10)
    assert report.variance == pytest.approx(nbar, rel=1e-10)
    assert report.mandel_q == pytest.approx(0.0, abs=1e-9)
    assert report.cumulants == pytest.approx([nbar] * 4, rel=1e-8)


def test_generating_function_cumulants_match_moments(detuned):
    nbar = 2.0
    dist = CountingService.channel_distribution(detuned, nbar, Channel.FORWARD)
    direct = CountingService.moments(dist).cumulants
    numeric = CountingService.cumulants_from_generating_function(detuned, nbar, Channel.FORWARD, dist.n_max)
    for a, b in zip(direct, numeric):
        assert abs(a - b) <= 1e-5 * max(1.0, abs(a))


def test_fano_undefined_without_photons(resonant):
    report = CountingService.moments(CountingService.channel_distribution(resonant, 0.0, Channel.FORWARD, 4))
    assert not report.fano_defined
    assert report.fano is None


def test_reentrant_peak_search():
    assert CountingService.find_reentrant_peak(np.array([0.5, 0.1, 0.05, 0.2, 0.1, 0.05]), 1.0) == 3
    assert CountingService.find_reentrant_peak(np.array([0.5, 0.3, 0.1, 0.06, 0.03, 0.01]), 1.0) is None


def test_joint_channel_rejected_for_single_distribution(resonant):
    with pytest.raises(InvalidParameterError):
        CountingService.channel_distribution(resonant, 1.0, Channel.JOINT_MARGINAL)
