import cmath
import logging
import math
import warnings
from functools import lru_cache
from typing import Dict, Iterable, List, Tuple

import mpmath
import numpy as np

from app.config import get_settings
from app.exceptions import ConditioningWarning, InvalidParameterError
from app.schemas.coeffs import CoeffRoute, CoeffTable
from app.schemas.distribution import Channel
from app.schemas.params import ContinuumAmplitudes, ScatterParams
from app.utils.bessel import c_coefficients, c_coefficients_mp
from app.utils.summation import CompensatedSum, exact_sum

logger = logging.getLogger(__name__)
settings = get_settings()

Index = Tuple[int, int]


@lru_cache(maxsize=2048)
def _log_binomials(n: int) -> np.ndarray:
    # exact integers first, so ln C(n, p) is correctly rounded even past n ~ 1000
    return np.array([math.log(math.comb(n, p)) for p in range(n + 1)])


def _ratio(params: ScatterParams) -> complex:
    """-gamma / (2 rho), the base of the power in the binomial sum."""
    return -params.gamma / (2 * params.rho)


def _log_terms(n: int, m: int, log_x: complex, log_c: np.ndarray) -> np.ndarray:
    # C(n, p) x^{p+m} c_{p+m} with magnitude and phase combined in one exponent
    p = np.arange(n + 1)
    with np.errstate(under="ignore", invalid="ignore"):
        return np.exp(_log_binomials(n) + (p + m) * log_x + log_c[m : n + m + 1])


def _refine_digits(abs_total: float) -> int:
    magnitude = math.ceil(math.log10(abs_total)) if abs_total > 1 else 0
    return settings.EXTENDED_PRECISION_DIGITS + magnitude


def _refine(
    params: ScatterParams, indices: List[Index], k_max: int, digits: int
) -> Dict[Index, complex]:
    """Re-evaluate the binomial sum for ``indices`` in extended precision."""
    c = c_coefficients_mp(k_max, params.rho, digits)
    out = {}
    with mpmath.workdps(digits):
        x = mpmath.mpf(-params.gamma) / (2 * mpmath.mpc(params.rho.real, params.rho.imag))
        powers = [mpmath.mpc(1)]
        for _ in range(k_max):
            powers.append(powers[-1] * x)
        for n, m in indices:
            total = mpmath.fsum(math.comb(n, p) * powers[p + m] * c[p + m] for p in range(n + 1))
            out[(n, m)] = complex(total)
    return out


def _evaluate(
    params: ScatterParams, indices: Iterable[Index], k_max: int
) -> Tuple[Dict[Index, complex], Dict[Index, float], List[Index]]:
    """Binomial Bessel sums for every (n, m) in ``indices`` with n + m <= k_max.

    Returns values, absolute error bounds and the indices whose double
    precision estimate broke the conditioning tolerance.
    """
    c = c_coefficients(k_max, params.rho)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_c = np.log(c)
    log_x = cmath.log(_ratio(params))

    values, bounds, abs_totals, flagged = {}, {}, {}, []
    for n, m in indices:
        terms = _log_terms(n, m, log_x, log_c)
        value, bound = exact_sum(terms)
        values[(n, m)], bounds[(n, m)] = value, bound
        if not bound <= settings.CONDITIONING_RTOL * abs(value):
            flagged.append((n, m))
            abs_totals[(n, m)] = float(np.sum(np.abs(terms)))

    if flagged and settings.EXTENDED_PRECISION_REFINE:
        digits = max(_refine_digits(abs_totals[index]) for index in flagged)
        logger.info(
            f"refining {len(flagged)} ill-conditioned s_nm at rho={params.rho} "
            f"with {digits} digits, first {flagged[:5]}"
        )
        refined = _refine(params, flagged, k_max, digits)
        for index, value in refined.items():
            values[index] = value
            bounds[index] = abs_totals[index] * 10.0 ** (2 - digits)
    elif flagged:
        logger.warning(f"s_nm ill-conditioned at rho={params.rho}: indices {flagged[:20]}")
        warnings.warn(
            f"compensated sum error above {settings.CONDITIONING_RTOL:g} relative "
            f"for (n, m) in {flagged}",
            ConditioningWarning,
            stacklevel=3,
        )
    return values, bounds, flagged


class ScatteringService:
    @staticmethod
    def continuum_amplitudes(params: ScatterParams) -> ContinuumAmplitudes:
        """Single-photon transmission t and reflection r of the L -> infinity limit."""
        if params.gamma == 0 and params.delta == 0:
            raise InvalidParameterError("continuum amplitudes are undefined at gamma = delta = 0")
        denominator = complex(params.delta, params.gamma)
        norm = params.delta ** 2 + params.gamma ** 2
        return ContinuumAmplitudes(
            t=params.delta / denominator,
            r=-1j * params.gamma / denominator,
            T=params.delta ** 2 / norm,
            R=params.gamma ** 2 / norm,
        )

    @staticmethod
    def factorized_coefficient(params: ScatterParams, n: int, m: int) -> complex:
        """Large-|rho| form s_nm -> t^n r^m.

        Valid only while n + m << |rho|. Tables switch to it wholesale above
        LARGE_RHO_THRESHOLD, so entries with n + m comparable to |rho| jump at
        the threshold; the induced change in count probabilities is far below
        double-precision resolution.
        """
        amplitudes = ScatteringService.continuum_amplitudes(params)
        return amplitudes.t ** n * amplitudes.r ** m

    @staticmethod
    def s_nm(params: ScatterParams, n: int, m: int) -> complex:
        if n < 0 or m < 0:
            raise InvalidParameterError(f"s_nm needs n, m >= 0, got ({n}, {m})")
        if params.is_decoupled:
            # whole pulse transmitted
            return 1.0 + 0j if m == 0 else 0j
        rho = params.rho
        if abs(rho) > settings.LARGE_RHO_THRESHOLD:
            return ScatteringService.factorized_coefficient(params, n, m)

        c = c_coefficients(n + m, rho)
        x = _ratio(params)
        log_x = cmath.log(x)
        acc = CompensatedSum()
        for p in range(n + 1):
            if c[p + m] == 0:
                continue
            acc.add(cmath.exp(_log_binomials(n)[p] + (p + m) * log_x + cmath.log(c[p + m])))
        if acc.error_bound <= settings.CONDITIONING_RTOL * abs(acc.total):
            return acc.total
        values, _, _ = _evaluate(params, [(n, m)], n + m)
        return values[(n, m)]

    @staticmethod
    def coeff_table(params: ScatterParams, n_max: int) -> CoeffTable:
        """All s_nm with n + m <= n_max; c_k is computed once and shared."""
        if n_max < 0:
            raise InvalidParameterError(f"n_max must be >= 0, got {n_max}")
        entries = np.zeros((n_max + 1, n_max + 1), dtype=complex)
        bounds = np.zeros((n_max + 1, n_max + 1))
        indices = [(n, m) for n in range(n_max + 1) for m in range(n_max + 1 - n)]

        if params.is_decoupled:
            entries[:, 0] = 1.0
            return CoeffTable(
                params=params, n_max=n_max, route=CoeffRoute.DECOUPLED,
                entries=entries, error_bounds=bounds,
            )
        if abs(params.rho) > settings.LARGE_RHO_THRESHOLD:
            for n, m in indices:
                entries[n, m] = ScatteringService.factorized_coefficient(params, n, m)
            logger.debug(f"|rho|={abs(params.rho):g} above threshold, factorized table")
            return CoeffTable(
                params=params, n_max=n_max, route=CoeffRoute.FACTORIZED,
                entries=entries, error_bounds=bounds,
            )

        values, errors, flagged = _evaluate(params, indices, n_max)
        for index in indices:
            entries[index] = values[index]
            bounds[index] = errors[index]
        return CoeffTable(
            params=params, n_max=n_max, route=CoeffRoute.BESSEL_SUM,
            entries=entries, error_bounds=bounds, ill_conditioned=flagged,
        )

    @staticmethod
    def marginal(params: ScatterParams, n_max: int, channel: Channel) -> np.ndarray:
        """s_n^r = s_n0 (forward) or s_n^l = s_0n (backward) for n = 0..n_max."""
        if channel == Channel.JOINT_MARGINAL:
            raise InvalidParameterError("marginal coefficients exist for channels r and l only")
        if n_max < 0:
            raise InvalidParameterError(f"n_max must be >= 0, got {n_max}")
        forward = channel == Channel.FORWARD
        if params.is_decoupled:
            out = np.zeros(n_max + 1, dtype=complex)
            out[0] = 1.0
            if forward:
                out[:] = 1.0
            return out
        if abs(params.rho) > settings.LARGE_RHO_THRESHOLD:
            return np.array([
                ScatteringService.factorized_coefficient(params, n, 0) if forward
                else ScatteringService.factorized_coefficient(params, 0, n)
                for n in range(n_max + 1)
            ])
        indices = [(n, 0) if forward else (0, n) for n in range(n_max + 1)]
        values, _, _ = _evaluate(params, indices, n_max)
        return np.array([values[index] for index in indices])

    @staticmethod
    def s_n_forward_asymptotic(params: ScatterParams, n: int) -> float:
        """Large-n overlay cos(sqrt(gamma n / 2)) for the forward marginal at resonance."""
        if n < 1:
            raise InvalidParameterError(f"asymptotic form needs n >= 1, got {n}")
        if params.delta != 0:
            raise InvalidParameterError("asymptotic form is quoted at delta = 0 only")
        return math.cos(math.sqrt(params.gamma * n / 2))

    @staticmethod
    def sign_agreement(params: ScatterParams, n_start: int = 200, n_stop: int = 400) -> float:
        """Fraction of n in [n_start, n_stop] where Re s_n0 and the asymptotic share a sign."""
        forward = ScatteringService.marginal(params, n_stop, Channel.FORWARD)
        hits = 0
        for n in range(n_start, n_stop + 1):
            overlay = ScatteringService.s_n_forward_asymptotic(params, n)
            hits += np.sign(forward[n].real) == np.sign(overlay)
        return hits / (n_stop - n_start + 1)
