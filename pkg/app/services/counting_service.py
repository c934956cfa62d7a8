import cmath
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from app.config import get_settings
from app.exceptions import ConditioningError, InvalidParameterError
from app.schemas.distribution import Channel, CountDistribution, JointDistribution, MomentReport
from app.schemas.params import ScatterParams
from app.services.scattering_service import ScatteringService

logger = logging.getLogger(__name__)
settings = get_settings()

MAX_CUMULANT_ORDER = 4


def _validate_nbar(nbar: float) -> None:
    if not (math.isfinite(nbar) and nbar >= 0):
        raise InvalidParameterError(f"nbar must be finite and >= 0, got {nbar}")


def _log_poisson(nbar: float, n: np.ndarray) -> np.ndarray:
    if nbar == 0:
        return np.where(n == 0, 0.0, -np.inf)
    return -nbar + n * math.log(nbar) - gammaln(n + 1)


def _moments_to_cumulants(raw: List[float]) -> List[float]:
    # raw[k] = E[n^k]; recursion kappa_k = mu_k - sum_{j=1}^{k-1} C(k-1, j-1) kappa_j mu_{k-j}
    kappa = [0.0] * len(raw)
    for k in range(1, len(raw)):
        kappa[k] = raw[k] - sum(
            math.comb(k - 1, j - 1) * kappa[j] * raw[k - j] for j in range(1, k)
        )
    return kappa[1:]


def _central_difference(f, k: int, h: float) -> complex:
    # sum_j (-1)^j C(k, j) f((k/2 - j) h) / h^k
    return sum(
        (-1) ** j * math.comb(k, j) * f((k / 2 - j) * h) for j in range(k + 1)
    ) / h ** k


def _richardson(values: List[complex]) -> complex:
    # values at h, h/2, h/4 of an even-in-h error expansion
    first = [(4 * values[i + 1] - values[i]) / 3 for i in range(len(values) - 1)]
    return (16 * first[1] - first[0]) / 15


class CountingService:
    @staticmethod
    def poisson_weight(nbar: float, n: int) -> float:
        """e^{-nbar} nbar^n / n!, evaluated in log space."""
        _validate_nbar(nbar)
        if n < 0:
            raise InvalidParameterError(f"n must be >= 0, got {n}")
        if nbar == 0:
            return 1.0 if n == 0 else 0.0
        return math.exp(-nbar + n * math.log(nbar) - math.lgamma(n + 1))

    @staticmethod
    def poisson_weights(nbar: float, n_max: int) -> np.ndarray:
        _validate_nbar(nbar)
        return np.exp(_log_poisson(nbar, np.arange(n_max + 1)))

    @staticmethod
    def auto_n_max(nbar: float) -> int:
        """Poisson tail bound plus safety margin, grown until the tail is negligible."""
        _validate_nbar(nbar)
        n_max = math.ceil(
            nbar + settings.AUTO_TAIL_SIGMAS * math.sqrt(nbar) + settings.AUTO_SAFETY_MARGIN
        )
        while poisson.sf(n_max, nbar) > settings.AUTO_TAIL_TARGET:
            n_max += max(1, math.ceil(math.sqrt(nbar)))
        return n_max

    @staticmethod
    def _resolve_n_max(nbar: float, n_max: Optional[int]) -> int:
        if n_max is None:
            return CountingService.auto_n_max(nbar)
        if n_max < 0:
            raise InvalidParameterError(f"n_max must be >= 0, got {n_max}")
        return n_max

    @staticmethod
    def channel_distribution(
        params: ScatterParams, nbar: float, channel: Channel, n_max: Optional[int] = None
    ) -> CountDistribution:
        """p(n) |s_n|^2 for n >= 1 with the zero bucket fixed by normalization.

        ``n_max=None`` selects Auto truncation.
        """
        _validate_nbar(nbar)
        if channel == Channel.JOINT_MARGINAL:
            raise InvalidParameterError("use joint_distribution for joint marginals")
        n_max = CountingService._resolve_n_max(nbar, n_max)

        weights = CountingService.poisson_weights(nbar, n_max)
        s = ScatteringService.marginal(params, n_max, channel)
        s_abs2 = np.abs(s) ** 2
        raw = weights * s_abs2
        if not np.all(np.isfinite(raw)):
            raise ConditioningError(
                f"non-finite {channel.value} probabilities at "
                f"gamma={params.gamma}, delta={params.delta}, nbar={nbar}"
            )

        probs = raw.copy()
        probs[0] = 1.0 - math.fsum(raw[1:])
        if probs[0] < -settings.NEGATIVITY_TOLERANCE:
            raise ConditioningError(
                f"zero bucket is {probs[0]:.3e} < 0 for {channel.value} at "
                f"gamma={params.gamma}, delta={params.delta}, nbar={nbar}: some |s_n| exceeds 1"
            )
        tail = float(poisson.sf(n_max, nbar)) if nbar > 0 else 0.0
        norm_defect = max(abs(1.0 - math.fsum(probs)), tail)
        logger.debug(f"{channel.value} distribution n_max={n_max} defect={norm_defect:.2e}")
        return CountDistribution(
            channel=channel,
            probs=probs,
            raw_probs=raw,
            s_abs2=s_abs2,
            zero_bucket_mass=float(probs[0]),
            norm_defect=norm_defect,
            params=params,
            nbar=nbar,
            meta={"n_max": n_max, "raw_zero": float(raw[0])},
        )

    @staticmethod
    def joint_distribution(
        params: ScatterParams, nbar: float, n_max: Optional[int] = None
    ) -> JointDistribution:
        _validate_nbar(nbar)
        n_max = CountingService._resolve_n_max(nbar, n_max)
        table = ScatteringService.coeff_table(params, n_max)
        s_abs2 = np.abs(table.entries) ** 2
        weights = CountingService.poisson_weights(nbar, n_max)

        idx = np.arange(n_max + 1)
        n_grid, m_grid = np.meshgrid(idx, idx, indexing="ij")
        inside = n_grid + m_grid <= n_max
        # e^{-nbar} nbar^{n+m} / (n! m!): the e^{nbar} of the cross term is absorbed here
        if nbar == 0:
            log_w = np.where((n_grid == 0) & (m_grid == 0), 0.0, -np.inf)
        else:
            log_w = -nbar + (n_grid + m_grid) * math.log(nbar) - gammaln(n_grid + 1) - gammaln(m_grid + 1)
        cross = np.where(inside, np.exp(log_w) * s_abs2, 0.0)
        cross[0, :] = 0.0
        cross[:, 0] = 0.0

        forward = weights * s_abs2[:, 0]
        backward = weights * s_abs2[0, :]
        q = cross.copy()
        q[1:, 0] = forward[1:] - cross[1:, :].sum(axis=1)
        q[0, 1:] = backward[1:] - cross[:, 1:].sum(axis=0)
        q[0, 0] = 1.0 - math.fsum(forward[1:]) - math.fsum(backward[1:]) + math.fsum(cross.ravel())
        if not np.all(np.isfinite(q)):
            raise ConditioningError(
                f"non-finite joint cells at gamma={params.gamma}, delta={params.delta}, nbar={nbar}"
            )

        # single-channel zero buckets keep the hard guard, joint cells do not
        for zero in (q[0, :].sum(), q[:, 0].sum()):
            if zero < -settings.NEGATIVITY_TOLERANCE:
                raise ConditioningError(f"joint zero bucket {zero:.3e} < 0: some |s_nm| exceeds 1")
        negative = q[q < 0]
        negative_mass = float(-negative.sum()) if negative.size else 0.0
        min_cell = float(q.min())
        if negative_mass > settings.NEGATIVITY_TOLERANCE:
            logger.warning(
                f"joint distribution has negative cells (mass {negative_mass:.3e}, "
                f"min {min_cell:.3e}) at gamma={params.gamma}, delta={params.delta}, nbar={nbar}"
            )
        return JointDistribution(
            params=params, nbar=nbar, q=q, negative_mass=negative_mass, min_cell=min_cell
        )

    @staticmethod
    def evaluate_F(
        params: ScatterParams, nbar: float, lambda_r, lambda_l=0.0, n_max: Optional[int] = None
    ):
        """Generating function <e^{i lambda_r N_r + i lambda_l N_l}>; arrays broadcast."""
        return CountingService.evaluate_F_fugacity(
            params, nbar, np.exp(1j * np.asarray(lambda_r, dtype=float)),
            np.exp(1j * np.asarray(lambda_l, dtype=float)), n_max,
        )

    @staticmethod
    def evaluate_F_fugacity(params: ScatterParams, nbar: float, z_r, z_l=1.0, n_max: Optional[int] = None):
        """Generating function at fugacities z_r, z_l (|z| = 1 or real z in [-1, 1])."""
        z_r = np.asarray(z_r, dtype=complex)
        z_l = np.asarray(z_l, dtype=complex)
        for z in (z_r, z_l):
            real = np.abs(z.imag) == 0
            if np.any(real & (np.abs(z.real) > 1)) or np.any(~real & ~np.isclose(np.abs(z), 1.0)):
                raise InvalidParameterError("fugacity must lie on the unit circle or in [-1, 1]")
        n_max = CountingService._resolve_n_max(nbar, n_max)
        powers = np.arange(n_max + 1)
        shape = np.broadcast(z_r, z_l).shape
        zr = np.broadcast_to(z_r, shape).ravel()
        zl = np.broadcast_to(z_l, shape).ravel()

        if np.all(zl == 1):
            dist = CountingService.channel_distribution(params, nbar, Channel.FORWARD, n_max)
            values = (zr[:, None] ** powers) @ dist.probs
        elif np.all(zr == 1):
            dist = CountingService.channel_distribution(params, nbar, Channel.BACKWARD, n_max)
            values = (zl[:, None] ** powers) @ dist.probs
        else:
            q = CountingService.joint_distribution(params, nbar, n_max).q
            values = np.einsum("kn,nm,km->k", zr[:, None] ** powers, q, zl[:, None] ** powers)
        values = values.reshape(shape)
        return complex(values) if values.ndim == 0 else values

    @staticmethod
    def moments(dist: CountDistribution) -> MomentReport:
        """Moments and cumulants up to order four from the distribution itself."""
        probs = dist.probs
        n = np.arange(len(probs), dtype=float)
        raw = [math.fsum(probs * n ** k) for k in range(MAX_CUMULANT_ORDER + 1)]
        cumulants = _moments_to_cumulants(raw)
        mean, variance = cumulants[0], max(cumulants[1], 0.0)
        if mean < 1e-14:
            return MomentReport(
                mean=mean, variance=variance, fano=None, mandel_q=None,
                fano_defined=False, cumulants=cumulants,
            )
        fano = variance / mean
        return MomentReport(
            mean=mean, variance=variance, fano=fano, mandel_q=fano - 1.0,
            fano_defined=True, cumulants=cumulants,
        )

    @staticmethod
    def cumulants_from_generating_function(
        params: ScatterParams, nbar: float, channel: Channel = Channel.FORWARD,
        n_max: Optional[int] = None, order: int = MAX_CUMULANT_ORDER,
    ) -> List[float]:
        """kappa_k = Re (-i)^k d^k ln F / d lambda^k at 0 by Richardson-extrapolated differences."""
        dist = CountingService.channel_distribution(params, nbar, channel, n_max)
        powers = np.arange(len(dist.probs))

        def log_f(lam: float) -> complex:
            return cmath.log(complex(np.exp(1j * lam * powers) @ dist.probs))

        out = []
        for k in range(1, order + 1):
            h = settings.FD_BASE_STEP * settings.FD_STEP_GROWTH ** (k - 1)
            estimates = [_central_difference(log_f, k, h / 2 ** level) for level in range(3)]
            out.append(((-1j) ** k * _richardson(estimates)).real)
        return out

    @staticmethod
    def fourier_recover(values: np.ndarray) -> np.ndarray:
        """p(n) from F sampled at lambda_k = 2 pi k / N, k = 0..N-1."""
        values = np.asarray(values, dtype=complex)
        return np.fft.fft(values).real / len(values)

    @staticmethod
    def fourier_nodes(count: int) -> np.ndarray:
        return 2 * np.pi * np.arange(count) / count

    @staticmethod
    def find_reentrant_peak(probs: np.ndarray, nbar: float) -> Optional[int]:
        """First local maximum n* > nbar away from the zero bucket, if any."""
        for n in range(max(2, math.floor(nbar) + 1), len(probs) - 1):
            if probs[n] > probs[n - 1] and probs[n] >= probs[n + 1]:
                return n
        return None

    @staticmethod
    def mean_curves(
        params: ScatterParams, nbar: float, n_max: Optional[int] = None
    ) -> Tuple[MomentReport, MomentReport]:
        """Forward and backward moment reports at one parameter point."""
        forward = CountingService.channel_distribution(params, nbar, Channel.FORWARD, n_max)
        backward = CountingService.channel_distribution(params, nbar, Channel.BACKWARD, n_max)
        return CountingService.moments(forward), CountingService.moments(backward)
