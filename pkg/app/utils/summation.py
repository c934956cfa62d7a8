import math
from typing import Iterable, Tuple

import numpy as np

EPSILON = float(np.finfo(np.float64).eps)

# Relative error assumed for each incoming term (a few roundings upstream).
TERM_RELATIVE_ERROR = 4 * EPSILON


def _two_sum(a: float, b: float) -> Tuple[float, float]:
    # Error free transformation: a + b = s + t exactly.
    s = a + b
    bp = s - a
    ap = s - bp
    return s, (a - ap) + (b - bp)


class CompensatedSum:
    """Neumaier running sum over complex terms with a first-order error bound.

    Real and imaginary parts are compensated independently. ``error_bound``
    estimates the absolute error of ``total`` from the magnitudes of the
    terms, so heavy cancellation shows up as a large ``relative_error``.
    """

    def __init__(self, term_relative_error: float = TERM_RELATIVE_ERROR):
        self._re = 0.0
        self._im = 0.0
        self._re_comp = 0.0
        self._im_comp = 0.0
        self._abs_total = 0.0
        self._count = 0
        self._term_relative_error = term_relative_error

    def add(self, term: complex) -> None:
        term = complex(term)
        self._re, err = _two_sum(self._re, term.real)
        self._re_comp += err
        self._im, err = _two_sum(self._im, term.imag)
        self._im_comp += err
        self._abs_total += abs(term)
        self._count += 1

    def extend(self, terms: Iterable[complex]) -> "CompensatedSum":
        for term in terms:
            self.add(term)
        return self

    @property
    def total(self) -> complex:
        return complex(self._re + self._re_comp, self._im + self._im_comp)

    @property
    def abs_total(self) -> float:
        return self._abs_total

    @property
    def error_bound(self) -> float:
        # Input errors dominate; the summation itself adds O(eps |total|).
        return self._term_relative_error * self._abs_total + EPSILON * abs(self.total)

    @property
    def relative_error(self) -> float:
        magnitude = abs(self.total)
        if magnitude == 0.0:
            return 0.0 if self._abs_total == 0.0 else float("inf")
        return self.error_bound / magnitude


def compensated_sum(terms: Iterable[complex]) -> Tuple[complex, float]:
    """Return (sum, absolute error bound) of ``terms``."""
    acc = CompensatedSum().extend(terms)
    return acc.total, acc.error_bound


def exact_sum(terms: np.ndarray) -> Tuple[complex, float]:
    """Correctly rounded sum of a complex array with the same error bound.

    ``math.fsum`` keeps the fixed term order's result independent of
    intermediate rounding, so the total is reproducible bit for bit.
    """
    terms = np.asarray(terms, dtype=complex)
    total = complex(math.fsum(terms.real), math.fsum(terms.imag))
    abs_total = float(np.sum(np.abs(terms)))
    return total, TERM_RELATIVE_ERROR * abs_total + EPSILON * abs(total)
