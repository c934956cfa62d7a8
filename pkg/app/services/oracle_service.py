"""Independent routes to the generating kernel and the coefficients it generates.

The kernel is
    d(w) = e^{i rho} [cos h - i rho sin(h) / h],   h^2 = u = rho^2 + 2 gamma w,
an entire function of u. Derivatives in w give s_nm through
    s_nm = 2^{-(n+m)} (D + 2)^n D^m d |_{w=0}.
"""
import cmath
import logging
import math
from typing import List, Union

import numpy as np

from app.config import get_settings
from app.exceptions import BranchError, InvalidParameterError
from app.schemas.coeffs import CoeffRoute, CoeffTable
from app.schemas.kernel import KernelRoute, KernelValue
from app.schemas.params import ScatterParams
from app.utils.bessel import c_coefficients
from app.utils.jet import Jet, jet_power_series, jet_reciprocal, jet_sin_cos, jet_sqrt
from app.utils.summation import exact_sum

logger = logging.getLogger(__name__)
settings = get_settings()

ENTIRE = "entire"
TRIG = "trig"


def _cos_sqrt_coefficients(terms: int) -> List[float]:
    """cos(sqrt u) = sum_j (-u)^j / (2j)!"""
    return [(-1) ** j / math.factorial(2 * j) for j in range(terms)]


def _sinc_sqrt_coefficients(terms: int) -> List[float]:
    """sin(sqrt u) / sqrt u = sum_j (-u)^j / (2j+1)!"""
    return [(-1) ** j / math.factorial(2 * j + 1) for j in range(terms)]


def _series_terms(order: int, u0: complex) -> int:
    return order + max(settings.KERNEL_SERIES_TERMS, math.ceil(3 * math.sqrt(abs(u0))) + 20)


def _kernel_scalar(rho: complex, u: complex) -> complex:
    phase = cmath.exp(1j * rho)
    if 2 * math.sqrt(abs(u)) < settings.KERNEL_SERIES_THRESHOLD:
        # removable point kappa L = 2h = 0
        terms = settings.KERNEL_TAYLOR_TERMS
        cos_h = sum(c * u ** j for j, c in enumerate(_cos_sqrt_coefficients(terms)))
        sinc_h = sum(c * u ** j for j, c in enumerate(_sinc_sqrt_coefficients(terms)))
    else:
        h = cmath.sqrt(u)
        cos_h = cmath.cos(h)
        sinc_h = cmath.sin(h) / h
    return phase * (cos_h - 1j * rho * sinc_h)


def _kernel_jet(rho: complex, u: Jet, form: str) -> Jet:
    phase = cmath.exp(1j * rho)
    if form == ENTIRE:
        terms = _series_terms(u.order, u.value)
        cos_h = jet_power_series(_cos_sqrt_coefficients(terms), u)
        sinc_h = jet_power_series(_sinc_sqrt_coefficients(terms), u)
    elif form == TRIG:
        h = jet_sqrt(u)
        sin_h, cos_h = jet_sin_cos(h)
        sinc_h = sin_h * jet_reciprocal(h)
    else:
        raise InvalidParameterError(f"unknown kernel form {form!r}; use {ENTIRE!r} or {TRIG!r}")
    return (cos_h - sinc_h * (1j * rho)) * phase


class OracleService:
    @staticmethod
    def kernel_d_tilde(
        params: ScatterParams, w: Union[complex, Jet], form: str = ENTIRE
    ) -> Union[complex, Jet]:
        """Trig closed form of the kernel at a scalar or jet argument.

        Jets use the entire series in u by default; ``form="trig"`` goes
        through jet sqrt, sin, cos and reciprocal instead, which loses
        accuracy quickly for small |rho| at high order.
        """
        rho = params.rho
        if isinstance(w, Jet):
            u = w * (2 * params.gamma) + rho * rho
            return _kernel_jet(rho, u, form)
        return _kernel_scalar(rho, rho * rho + 2 * params.gamma * complex(w))

    @staticmethod
    def kernel_series(params: ScatterParams, w: complex, terms: int = None) -> complex:
        """sum_k t^k c_k / k! with t = -gamma w / rho."""
        terms = terms or settings.KERNEL_SERIES_TERMS
        rho = params.rho
        if rho == 0:
            return 1.0 + 0j
        c = c_coefficients(terms - 1, rho)
        t = -params.gamma * complex(w) / rho
        weights = np.empty(terms, dtype=complex)
        weights[0] = 1.0
        for k in range(1, terms):
            weights[k] = weights[k - 1] * t / k
        total, _ = exact_sum(weights * c)
        return total

    @staticmethod
    def kernel_root_form(params: ScatterParams, w: complex) -> complex:
        """Kernel through the roots of P^2 + 2 rho P - 2 gamma w = 0.

        P = p L is the dimensionless root of the dispersion quadratic. With
        (k0 - Delta_g) L = delta + i gamma = 2 rho and 2 pi g^2 L = 2 gamma,
        the coherent amplitude times the even-channel field, alpha v*, is w.
        """
        rho = params.rho
        u = rho * rho + 2 * params.gamma * complex(w)
        h = cmath.sqrt(u)
        p_plus, p_minus = -rho + h, -rho - h
        if abs(p_plus - p_minus) < settings.ROOT_CONFLUENT_THRESHOLD:
            # double root: first order in u around e^{i rho}(1 - i rho)
            return cmath.exp(1j * rho) * ((1 - u / 2) - 1j * rho * (1 - u / 6))
        return (
            -p_minus * cmath.exp(-1j * p_plus) + p_plus * cmath.exp(-1j * p_minus)
        ) / (p_plus - p_minus)

    @staticmethod
    def kernel_value(params: ScatterParams, w: complex, route: KernelRoute) -> KernelValue:
        if route == KernelRoute.TRIG_CLOSED_FORM:
            value = OracleService.kernel_d_tilde(params, w)
        elif route == KernelRoute.ROOT_REPRESENTATION:
            value = OracleService.kernel_root_form(params, w)
        else:
            value = OracleService.kernel_series(params, w)
        return KernelValue(value=complex(value), route=route)

    @staticmethod
    def kernel_jet(params: ScatterParams, order: int, form: str = ENTIRE) -> Jet:
        """Taylor jet of the kernel at w = 0."""
        if order < 0:
            raise InvalidParameterError(f"jet order must be >= 0, got {order}")
        if params.rho == 0:
            raise BranchError("kernel jet needs (delta + i gamma)^2 != 0")
        return OracleService.kernel_d_tilde(params, Jet.variable(0.0, order), form)

    @staticmethod
    def s_nm_oracle(
        params: ScatterParams, n: int, m: int, padding: int = 0, form: str = ENTIRE
    ) -> complex:
        """s_nm from jet derivatives of the kernel; jet order is n + m + padding."""
        if n < 0 or m < 0:
            raise InvalidParameterError(f"s_nm needs n, m >= 0, got ({n}, {m})")
        if padding < 0:
            raise InvalidParameterError(f"padding must be >= 0, got {padding}")
        jet = OracleService.kernel_jet(params, n + m + padding, form)
        return _apply_operator(jet.derivatives(), n, m)

    @staticmethod
    def oracle_table(params: ScatterParams, n_max: int, form: str = ENTIRE) -> CoeffTable:
        """Every s_nm with n + m <= n_max from a single jet of order n_max."""
        if n_max < 0:
            raise InvalidParameterError(f"n_max must be >= 0, got {n_max}")
        derivatives = OracleService.kernel_jet(params, n_max, form).derivatives()
        entries = np.zeros((n_max + 1, n_max + 1), dtype=complex)
        bounds = np.zeros((n_max + 1, n_max + 1))
        for n in range(n_max + 1):
            for m in range(n_max + 1 - n):
                entries[n, m], bounds[n, m] = _apply_operator(derivatives, n, m, with_bound=True)
        logger.debug(f"oracle table to n_max={n_max} at rho={params.rho}")
        return CoeffTable(
            params=params, n_max=n_max, route=CoeffRoute.JET_ORACLE,
            entries=entries, error_bounds=bounds,
        )


def _apply_operator(derivatives: np.ndarray, n: int, m: int, with_bound: bool = False):
    # 2^{-(n+m)} (D + 2)^n D^m = sum_p C(n, p) 2^{-(p+m)} D^{p+m}
    terms = np.array([
        math.comb(n, p) * 2.0 ** -(p + m) * derivatives[p + m] for p in range(n + 1)
    ])
    total, bound = exact_sum(terms)
    return (total, bound) if with_bound else total
