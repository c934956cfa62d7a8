"""Counting statistics in the continuous-radiation limit L -> infinity.

For an input with number distribution p(N) the generating function is

    F = 1 + sum_n (z_r^n - 1) p(n) T^n + sum_m (z_l^m - 1) p(m) R^m
          + sum_{n,m>=1} C(n+m, n) (z_r^n - 1)(z_l^m - 1) p(n+m) T^n R^m,

so the single-channel laws are bimodal: p(n) T^n for n >= 1 plus a zero bucket.
"""
import logging
import math
from typing import Optional

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from app.config import get_settings
from app.exceptions import InvalidParameterError, StateNormalizationError
from app.schemas.distribution import Channel, CountDistribution
from app.schemas.state import CoherentState, CustomState, FockState, InitialState, SqueezedState
from app.services.counting_service import CountingService

logger = logging.getLogger(__name__)
settings = get_settings()

SQUEEZED_TAIL = 1e-16


def _validate_transmission(T: float) -> float:
    if not (math.isfinite(T) and 0.0 <= T <= 1.0):
        raise InvalidParameterError(f"T must lie in [0, 1], got {T}")
    return float(T)


def _log_power(base: float, exponent: np.ndarray) -> np.ndarray:
    # ln base^k with 0^0 = 1
    if base == 0:
        return np.where(exponent == 0, 0.0, -np.inf)
    return exponent * math.log(base)


def _squeezed_support(magnitude: float) -> int:
    """Smallest even support whose dropped tail is below SQUEEZED_TAIL."""
    if magnitude == 0:
        return 0
    tanh2 = math.tanh(magnitude) ** 2
    if tanh2 >= 1.0:
        raise InvalidParameterError(f"squeezing magnitude {magnitude} is too large to represent")
    # |psi_2n|^2 <= tanh^{2n}, so the tail is below tanh^{2k} / (1 - tanh^2)
    pairs = math.ceil(math.log(SQUEEZED_TAIL * (1 - tanh2)) / math.log(tanh2)) + 1
    support = 2 * pairs
    if support > settings.MAX_STATE_SUPPORT:
        raise InvalidParameterError(
            f"squeezing magnitude {magnitude} needs {support} photon numbers, "
            f"above MAX_STATE_SUPPORT={settings.MAX_STATE_SUPPORT}"
        )
    return support


class ContinuumService:
    @staticmethod
    def squeezed_amplitudes(magnitude: float, theta: float, support: Optional[int] = None) -> np.ndarray:
        """psi_2n = (2n-1)!! (-e^{i theta} tanh|zeta|)^n / sqrt((2n)! cosh|zeta|), psi_odd = 0."""
        if magnitude < 0:
            raise InvalidParameterError(f"squeezing magnitude must be >= 0, got {magnitude}")
        if support is None:
            support = _squeezed_support(magnitude)
        psi = np.zeros(support + 1, dtype=complex)
        if magnitude == 0:
            psi[0] = 1.0
            return psi
        k = np.arange(support // 2 + 1)
        # ln (2n-1)!! = ln (2n)! - n ln 2 - ln n!
        log_double_factorial = gammaln(2 * k + 1) - k * math.log(2.0) - gammaln(k + 1)
        log_abs = (
            log_double_factorial
            + k * math.log(math.tanh(magnitude))
            - 0.5 * gammaln(2 * k + 1)
            - 0.5 * math.log(math.cosh(magnitude))
        )
        psi[2 * k] = np.exp(log_abs + 1j * k * (theta + math.pi))
        return psi

    @staticmethod
    def probabilities(state: InitialState, n_max: Optional[int] = None) -> np.ndarray:
        """Photon-number distribution of the incident state."""
        if isinstance(state, CoherentState):
            size = n_max if n_max is not None else CountingService.auto_n_max(state.nbar)
            return CountingService.poisson_weights(state.nbar, size)
        if isinstance(state, FockState):
            probs = np.zeros(max(state.n, n_max or 0) + 1)
            probs[state.n] = 1.0
            return probs
        if isinstance(state, SqueezedState):
            psi = ContinuumService.squeezed_amplitudes(state.magnitude, state.theta)
            return np.abs(psi) ** 2
        if isinstance(state, CustomState):
            return np.array([re * re + im * im for re, im in state.amps])
        raise InvalidParameterError(f"unsupported state {state!r}")

    @staticmethod
    def continuum_F(state: InitialState, T: float, lambda_r, lambda_l=0.0):
        """Joint generating function; lambda arguments broadcast."""
        T = _validate_transmission(T)
        R = 1.0 - T
        z_r = np.exp(1j * np.asarray(lambda_r, dtype=float))
        z_l = np.exp(1j * np.asarray(lambda_l, dtype=float))
        if isinstance(state, CoherentState):
            values = ContinuumService._coherent_F(state.nbar, T, R, z_r, z_l)
        else:
            values = ContinuumService._general_F(ContinuumService.probabilities(state), T, R, z_r, z_l)
        return complex(values) if np.ndim(values) == 0 else values

    @staticmethod
    def _coherent_F(nbar: float, T: float, R: float, z_r, z_l):
        # 1 + e^{-N_l} f_r + e^{-N_r} f_l + f_r f_l with f = exp(N (z - 1)) - 1
        nbar_r, nbar_l = nbar * T, nbar * R
        f_r = np.expm1(nbar_r * (z_r - 1))
        f_l = np.expm1(nbar_l * (z_l - 1))
        return 1 + math.exp(-nbar_l) * f_r + math.exp(-nbar_r) * f_l + f_r * f_l

    @staticmethod
    def _general_F(probs: np.ndarray, T: float, R: float, z_r, z_l):
        z_r, z_l = np.broadcast_arrays(np.asarray(z_r, dtype=complex), np.asarray(z_l, dtype=complex))
        shape = z_r.shape
        z_r, z_l = z_r.ravel(), z_l.ravel()
        support = len(probs) - 1
        k = np.arange(support + 1)
        with np.errstate(divide="ignore"):
            log_p = np.log(probs)
        single_r = np.exp(log_p + _log_power(T, k))
        single_l = np.exp(log_p + _log_power(R, k))
        single_r[0] = single_l[0] = 0.0

        ar = z_r[:, None] ** k - 1
        al = z_l[:, None] ** k - 1
        values = 1 + ar @ single_r + al @ single_l

        if support >= 2 and T > 0 and R > 0 and np.any(al != 0) and np.any(ar != 0):
            n, m = np.meshgrid(k, k, indexing="ij")
            total = n + m
            inside = (n >= 1) & (m >= 1) & (total <= support)
            log_weight = (
                gammaln(total + 1) - gammaln(n + 1) - gammaln(m + 1)
                + log_p[np.minimum(total, support)]
                + n * math.log(T) + m * math.log(R)
            )
            weight = np.where(inside, np.exp(np.where(inside, log_weight, -np.inf)), 0.0)
            values = values + np.einsum("kn,nm,km->k", ar, weight, al)
        return values.reshape(shape)

    @staticmethod
    def continuum_distribution(
        state: InitialState, T: float, channel: Channel = Channel.FORWARD, n_max: Optional[int] = None
    ) -> CountDistribution:
        """Single-channel distribution; backward is the forward law at 1 - T."""
        T = _validate_transmission(T)
        if channel == Channel.JOINT_MARGINAL:
            raise InvalidParameterError("continuum distributions are per channel")
        T_channel = T if channel == Channel.FORWARD else 1.0 - T

        if isinstance(state, CoherentState):
            n_max = n_max if n_max is not None else CountingService.auto_n_max(state.nbar)
            probs = ContinuumService._bimodal_coherent(state.nbar, T_channel, n_max)
            tail = float(poisson.sf(n_max, state.nbar * T_channel)) if state.nbar > 0 else 0.0
        elif isinstance(state, FockState):
            n_max = n_max if n_max is not None else state.n
            if n_max < state.n:
                raise InvalidParameterError(f"n_max={n_max} is below the Fock number {state.n}")
            probs = np.zeros(n_max + 1)
            transmitted = T_channel ** state.n
            probs[state.n] = transmitted
            probs[0] = 1.0 - transmitted if state.n > 0 else 1.0
            tail = 0.0
        else:
            support = len(ContinuumService.probabilities(state)) - 1
            n_max = n_max if n_max is not None else support
            probs = ContinuumService._dft_route(state, T_channel, n_max, support)
            tail = max(0.0, 1.0 - math.fsum(probs))

        norm_defect = max(abs(1.0 - math.fsum(probs)), tail)
        return CountDistribution(
            channel=channel,
            probs=probs,
            zero_bucket_mass=float(probs[0]),
            norm_defect=norm_defect,
            meta={"T": T, "R": 1.0 - T, "n_max": n_max},
        )

    @staticmethod
    def _bimodal_coherent(nbar: float, T: float, n_max: int) -> np.ndarray:
        # (1 - e^{-N R}) delta_{n0} + e^{-N R} Poisson(N T)
        probs = math.exp(-nbar * (1.0 - T)) * CountingService.poisson_weights(nbar * T, n_max)
        probs[0] = 1.0 - math.fsum(probs[1:])
        return probs

    @staticmethod
    def _dft_route(state: InitialState, T: float, n_max: int, support: int) -> np.ndarray:
        nodes = 2 * (max(n_max, support) + 1)
        lambdas = CountingService.fourier_nodes(nodes)
        values = ContinuumService.continuum_F(state, T, lambdas, 0.0)
        recovered = CountingService.fourier_recover(values)
        worst = float(recovered.min())
        if worst < -settings.NEGATIVITY_TOLERANCE:
            raise StateNormalizationError(
                f"inverse transform gives p = {worst:.3e} < 0; the state vector is inconsistent"
            )
        logger.debug(f"continuum distribution from {nodes} Fourier nodes")
        return np.clip(recovered[: n_max + 1], 0.0, None)

    @staticmethod
    def squeezed_distribution(
        magnitude: float, theta: float, T: float, n_max: Optional[int] = None,
        power: Optional[int] = None,
    ) -> CountDistribution:
        """Closed form (1 - d) delta_{n0} + d p_{zeta'}(n), compared with the general route.

        |zeta'| = arctanh(T^power tanh|zeta|) and d = cosh|zeta'| / cosh|zeta|;
        ``power`` defaults to SQUEEZED_TRANSMISSION_POWER. ``reference_probs``
        holds the general-formula result and ``meta`` the largest discrepancy.
        """
        T = _validate_transmission(T)
        power = settings.SQUEEZED_TRANSMISSION_POWER if power is None else power
        support = _squeezed_support(magnitude)
        n_max = support if n_max is None else n_max

        magnitude_out = math.atanh(T ** power * math.tanh(magnitude))
        d = math.cosh(magnitude_out) / math.cosh(magnitude)
        transmitted = np.abs(ContinuumService.squeezed_amplitudes(magnitude_out, theta, support)) ** 2
        closed = np.zeros(n_max + 1)
        size = min(n_max, support) + 1
        closed[:size] = d * transmitted[:size]
        closed[0] += 1.0 - d

        state = CustomState.from_amplitudes(ContinuumService.squeezed_amplitudes(magnitude, theta, support))
        reference = ContinuumService.continuum_distribution(state, T, Channel.FORWARD, n_max).probs
        discrepancy = float(np.max(np.abs(closed - reference)))
        if discrepancy > settings.NEGATIVITY_TOLERANCE:
            logger.info(
                f"squeezed closed form with T^{power} differs from the general formula "
                f"by {discrepancy:.3e} at |zeta|={magnitude}, T={T}"
            )
        return CountDistribution(
            channel=Channel.FORWARD,
            probs=closed,
            reference_probs=reference,
            zero_bucket_mass=float(closed[0]),
            norm_defect=abs(1.0 - math.fsum(closed)),
            meta={"T": T, "R": 1.0 - T, "d": d, "magnitude_out": magnitude_out,
                  "power": power, "max_discrepancy": discrepancy},
        )
