import math

import numpy as np

from app.utils.summation import CompensatedSum, compensated_sum, exact_sum


def test_compensated_sum_recovers_cancelled_term():
    total, bound = compensated_sum([1e16, 1.0, -1e16])
    assert total == 1.0
    assert bound > 0


def test_exact_sum_is_order_independent():
    terms = np.array([1e16, 1.0 + 1j, -1e16, 3.0, -1j])
    forward, _ = exact_sum(terms)
    backward, _ = exact_sum(terms[::-1])
    assert forward == backward == 4.0


def test_relative_error_tracks_cancellation():
    acc = CompensatedSum().extend([1e10, -1e10 + 1e-3])
    assert acc.relative_error > 1e-3
    clean = CompensatedSum().extend([1.0, 2.0, 3.0])
    assert clean.relative_error < 1e-14


def test_zero_total():
    assert CompensatedSum().relative_error == 0.0
    assert math.isinf(CompensatedSum().extend([1.0, -1.0]).relative_error)
