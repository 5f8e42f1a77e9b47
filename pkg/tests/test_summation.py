import math

import numpy as np
from hypothesis import given, strategies as st

from toruspackets.summation import KahanAccumulator, fsum_complex, kahan_sum


def test_fsum_complex_cancellation():
    vals = np.array([1e16, 1.0, -1e16, 1j * 1e16, 1j, -1j * 1e16])
    assert fsum_complex(vals) == 1 + 1j


def test_kahan_recovers_small_terms():
    vals = np.array([1.0] + [1e-16] * 1000)
    assert kahan_sum(vals) == math.fsum(vals)
    assert np.sum(vals) != math.fsum(vals)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=200))
def test_kahan_close_to_exact(xs):
    exact = math.fsum(xs)
    assert abs(kahan_sum(np.array(xs)) - exact) <= 1e-12 * max(1.0, sum(abs(x) for x in xs))


def test_accumulator_matches_axis_sum():
    rng = np.random.default_rng(3)
    terms = rng.normal(size=(50, 4, 3)) + 1j * rng.normal(size=(50, 4, 3))
    acc = KahanAccumulator((4, 3))
    for t in terms:
        acc.add(t)
    assert np.array_equal(acc.value, kahan_sum(terms, axis=0))
