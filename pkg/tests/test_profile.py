import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from toruspackets.errors import ProfileInvalid, QuadratureUnderResolved
from toruspackets.profile import (
    autocorrelation,
    gaussian_profile,
    load_profile_csv,
    profile_fourier,
    sample_profile,
    sampled_profile,
    write_profile_csv,
)

X = np.arange(-20.0, 20.0 + 5e-4, 1e-3)


def trapezoid_autocorrelation(R):
    phi = lambda x: (2 * math.pi) ** -0.25 * np.exp(-x * x / 4)
    return np.trapezoid(phi(X) * np.conj(phi(X - 2 * R)), X)


def test_gaussian_values():
    assert gaussian_profile(1).evaluate(0.0) == pytest.approx(0.6316187778, abs=1e-10)
    assert gaussian_profile(2).evaluate([0.0, 0.0]) == pytest.approx((2 * math.pi) ** -0.5)
    assert np.trapezoid(np.abs(gaussian_profile(1).evaluate(X)) ** 2, X) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("R, frozen", [(1.0, 0.6065306597), (0.5, 0.8824969026)])
def test_autocorrelation_against_quadrature(R, frozen):
    oracle = trapezoid_autocorrelation(R)
    value = autocorrelation(gaussian_profile(1), R)
    assert abs(value - oracle) < 1e-12
    assert value.real == pytest.approx(frozen, abs=1e-10)
    assert autocorrelation(gaussian_profile(1), 0.0) == 1


def test_fourier_at_zero_matches_defining_integral():
    oracle = np.trapezoid(gaussian_profile(1).evaluate(X), X) / math.sqrt(2 * math.pi)
    value = profile_fourier(gaussian_profile(1), 0.0)
    assert abs(value - oracle) < 1e-12
    assert value.real == pytest.approx(0.8932438417, abs=1e-10)


def test_fourier_tail_below_cutoff():
    g = gaussian_profile(1)
    xi = np.linspace(6, 40, 200)
    assert np.max(np.abs(g.fourier(xi))) < 1e-14
    oracle = np.array([np.trapezoid(g.evaluate(X) * np.exp(-1j * s * X), X) for s in (6.0, 7.5)])
    assert np.max(np.abs(oracle / math.sqrt(2 * math.pi))) < 1e-14


@given(st.floats(-8, 8), st.floats(-8, 8))
def test_autocorrelation_bounded_and_hermitian(r1, r2):
    g = gaussian_profile(2)
    s = g.autocorrelation_values(np.array([r1, r2]))
    assert abs(s) <= 1 + 1e-15
    assert g.autocorrelation_values(np.array([-r1, -r2])) == np.conj(s)


@given(st.floats(-10, 10))
def test_fourier_even_and_real(xi):
    g = gaussian_profile(1)
    assert g.fourier(xi) == g.fourier(-xi)
    assert g.fourier(xi).imag == 0


@pytest.fixture(scope="module")
def sampled():
    return sample_profile(gaussian_profile(1), half_width=20.0, step=0.05)


def test_sampled_matches_closed_form(sampled):
    xi = np.linspace(-4, 4, 17)
    R = np.linspace(-3, 3, 13)
    assert np.max(np.abs(profile_fourier(sampled, xi) - gaussian_profile(1).fourier(xi))) < 1e-12
    assert np.max(np.abs(autocorrelation(sampled, R) - gaussian_profile(1).autocorrelation_values(R))) < 1e-12
    assert np.max(np.abs(sampled.evaluate(np.array([0.013, 1.7])) - gaussian_profile(1).evaluate(np.array([0.013, 1.7])))) < 1e-12


def test_sampled_parseval(sampled):
    xi = np.linspace(-12, 12, 2401)
    assert np.trapezoid(np.abs(sampled.fourier(xi)) ** 2, xi) == pytest.approx(1.0, abs=1e-8)


def test_sampled_validation():
    x = np.linspace(-20, 20, 801)
    good = (2 * math.pi) ** -0.25 * np.exp(-x * x / 4)
    with pytest.raises(ProfileInvalid):
        sampled_profile(good * 1.1, 20.0, 0.05)
    with pytest.raises(ProfileInvalid):
        sampled_profile(good[:-1], 20.0, 0.05)
    wide = np.exp(-x * x / 400)
    wide /= np.sqrt(np.sum(wide ** 2) * 0.05)
    with pytest.raises(ProfileInvalid):
        sampled_profile(wide, 20.0, 0.05)


def test_coarse_sampling_is_flagged():
    coarse = sample_profile(gaussian_profile(1), half_width=20.0, step=1.0)
    with pytest.raises(QuadratureUnderResolved):
        profile_fourier(coarse, 2.5)


def test_csv_round_trip(tmp_path, sampled):
    path = tmp_path / "phi.csv"
    write_profile_csv(sampled, path)
    back = load_profile_csv(path)
    assert back.dimension == 1
    assert np.array_equal(back.samples, sampled.samples)
