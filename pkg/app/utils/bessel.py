"""Spherical Bessel functions of complex argument and the c_n coefficient family.

j_n is obtained by Miller's downward recurrence
    j_{k-1}(rho) = (2k + 1) / rho * j_k(rho) - j_{k+1}(rho)
started well above max(n, |rho|) and normalised against j_0 = sin(rho)/rho or
j_{-1} = cos(rho)/rho, whichever is larger in magnitude. Upward recurrence is
unstable for n > |rho| and is never used.
"""
import cmath
import logging
import math
from typing import Tuple

import mpmath
import numpy as np
from scipy.special import gammaln

from app.config import get_settings
from app.exceptions import InvalidParameterError

logger = logging.getLogger(__name__)
settings = get_settings()

_RESCALE_ABOVE = 1e200


def _start_order(order: int, rho: complex) -> int:
    size = math.ceil(abs(rho))
    return max(order, size) + max(settings.BESSEL_MIN_EXTRA_ORDERS, size)


def _log_double_factorial_odd(n: int) -> float:
    """ln (2n+1)!!"""
    return float(gammaln(2 * n + 2) - n * math.log(2.0) - gammaln(n + 1))


def _miller_sequence(order: int, rho: complex) -> Tuple[np.ndarray, int]:
    """Unnormalised j_{-1..order}, scaled so that the anchor entry equals 1.

    Returns (f, anchor) with anchor 0 for j_0 and -1 for j_{-1}; f[k + 1]
    holds the value for order k.
    """
    start = _start_order(order, rho)
    f = np.zeros(order + 2, dtype=complex)
    upper, current = 0j, 1 + 0j
    for k in range(start, -1, -1):
        # current holds f_k, upper holds f_{k+1}
        if k <= order:
            f[k + 1] = current
        lower = (2 * k + 1) / rho * current - upper
        upper, current = current, lower
        if abs(current) > _RESCALE_ABOVE:
            scale = 1.0 / abs(current)
            upper *= scale
            current *= scale
            f *= scale
    f[0] = current  # f_{-1}

    # |sin rho| vs |cos rho| through bounded exponentials (Im rho >= 0 keeps them finite)
    e2 = cmath.exp(2j * rho) if rho.imag >= 0 else cmath.exp(-2j * rho)
    anchor = 0 if abs(e2 - 1) >= abs(e2 + 1) else -1
    f = f / f[anchor + 1]
    return f, anchor


def _anchor_value(rho: complex, anchor: int) -> complex:
    return (cmath.sin(rho) if anchor == 0 else cmath.cos(rho)) / rho


def spherical_bessel_table(order: int, rho: complex) -> np.ndarray:
    """j_k(rho) for k = -1..order; entry k + 1 holds j_k."""
    if order < -1:
        raise InvalidParameterError(f"order must be >= -1, got {order}")
    rho = complex(rho)
    if rho == 0:
        raise InvalidParameterError("spherical_bessel_j is undefined at rho = 0; use the limit")
    order = max(order, 0)

    if abs(rho) < settings.BESSEL_SMALL_RHO:
        # Leading series term rho^n / (2n+1)!! avoids cancellation.
        table = np.zeros(order + 2, dtype=complex)
        table[0] = cmath.cos(rho) / rho
        log_rho = cmath.log(rho)
        for k in range(order + 1):
            table[k + 1] = cmath.exp(k * log_rho - _log_double_factorial_odd(k))
        return table

    f, anchor = _miller_sequence(order, rho)
    return f * _anchor_value(rho, anchor)


def spherical_bessel_j(n: int, rho: complex) -> complex:
    if n < -1:
        raise InvalidParameterError(f"spherical Bessel order must be >= -1, got {n}")
    rho = complex(rho)
    if rho == 0:
        raise InvalidParameterError("spherical_bessel_j is undefined at rho = 0; use the limit")
    if n == -1:
        return cmath.cos(rho) / rho
    return complex(spherical_bessel_table(n, rho)[n + 1])


def c_coefficients(k_max: int, rho: complex) -> np.ndarray:
    """c_k(rho) = rho e^{i rho} [j_{k-1}(rho) - i j_k(rho)] for k = 0..k_max.

    Evaluated as A (f_{k-1} - i f_k) with A = e^{i rho} sin(rho) or
    e^{i rho} cos(rho) in exponential form, which stays bounded for
    Im rho >= 0 even where j_k itself overflows.
    """
    if k_max < 0:
        raise InvalidParameterError(f"k_max must be >= 0, got {k_max}")
    rho = complex(rho)
    if rho == 0:
        c = np.zeros(k_max + 1, dtype=complex)
        c[0] = 1.0
        return c

    if abs(rho) < settings.BESSEL_SMALL_RHO:
        j = spherical_bessel_table(k_max, rho)
        c = rho * cmath.exp(1j * rho) * (j[:-1] - 1j * j[1:])
        c[0] = 1.0
        return c

    f, anchor = _miller_sequence(k_max, rho)
    e2 = cmath.exp(2j * rho)
    prefactor = (e2 - 1) / 2j if anchor == 0 else (e2 + 1) / 2
    c = prefactor * (f[:-1] - 1j * f[1:])
    logger.debug(f"c_k table up to {k_max} at rho={rho} anchored on j_{anchor}")
    return c


def c_coeff(n: int, rho: complex) -> complex:
    if n < 0:
        raise InvalidParameterError(f"c_n requires n >= 0, got {n}")
    return complex(c_coefficients(n, rho)[n])


def spherical_bessel_series(n: int, rho: complex, dps: int = 60) -> complex:
    """Reference j_n from the power series summed in extended precision.

    j_n(z) = z^n sum_k (-z^2/2)^k / (k! (2n+2k+1)!!), truncated once a term
    falls below 1e-16 of the running sum (after the terms start shrinking).
    """
    if n < -1:
        raise InvalidParameterError(f"spherical Bessel order must be >= -1, got {n}")
    rho = complex(rho)
    # the largest terms grow like e^{|rho|}; carry enough digits to absorb the cancellation
    dps = max(dps, 30 + int(abs(rho) / 2.3))
    with mpmath.workdps(dps):
        z = mpmath.mpc(rho.real, rho.imag)
        if n == -1:
            return complex(mpmath.cos(z) / z)
        half_sq = -z * z / 2
        term = z ** n / mpmath.fac2(2 * n + 1)
        total = term
        k = 0
        while True:
            k += 1
            term = term * half_sq / (k * (2 * n + 2 * k + 1))
            total += term
            if k > abs(z) and abs(term) <= mpmath.mpf("1e-16") * abs(total):
                break
        return complex(total)


def c_coefficients_mp(k_max: int, rho: complex, dps: int) -> list:
    """c_0..c_k_max as mpmath numbers carried at ``dps`` digits.

    Same downward recurrence as the double-precision table, but mpmath's
    exponent range makes the rescaling and the bounded prefactor unnecessary.
    The caller must hold ``mpmath.workdps(dps)`` while using the result.
    """
    if k_max < 0:
        raise InvalidParameterError(f"k_max must be >= 0, got {k_max}")
    rho = complex(rho)
    with mpmath.workdps(dps):
        if rho == 0:
            return [mpmath.mpc(1)] + [mpmath.mpc(0)] * k_max
        z = mpmath.mpc(rho.real, rho.imag)
        size = math.ceil(abs(rho))
        start = max(k_max, size) + max(settings.BESSEL_MIN_EXTRA_ORDERS, size, dps)
        f = [mpmath.mpc(0)] * (k_max + 2)
        upper, current = mpmath.mpc(0), mpmath.mpc(1)
        for k in range(start, -1, -1):
            if k <= k_max:
                f[k + 1] = current
            upper, current = current, (2 * k + 1) / z * current - upper
        f[0] = current

        sin_z, cos_z = mpmath.sin(z), mpmath.cos(z)
        if abs(sin_z) >= abs(cos_z):
            scale = sin_z / z / f[1]
        else:
            scale = cos_z / z / f[0]
        prefactor = z * mpmath.exp(1j * z) * scale
        c = [prefactor * (f[k] - 1j * f[k + 1]) for k in range(k_max + 1)]
        c[0] = mpmath.mpc(1)
        return c
