import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_state
from toruspackets.errors import ParamMismatch, ValidationError, WindowOverflow
from toruspackets.profile import gaussian_profile
from toruspackets.state import (
    FourierState,
    PacketSpec,
    SemiclassicalParams,
    coherent_state,
    evolve,
    evolve_fraction,
    inner_product,
    position_density,
    single_mode,
    translate,
    wavefunction,
)

G1 = gaussian_profile(1)


def packet(hbar, q0=0.0, p0=0.0, d=1):
    params = SemiclassicalParams.from_hbar(hbar, d)
    spec = PacketSpec((q0,) * d if np.ndim(q0) == 0 else q0, (p0,) * d if np.ndim(p0) == 0 else p0)
    return params, coherent_state(params, spec, gaussian_profile(d))


def test_params_validation():
    with pytest.raises(ValidationError):
        SemiclassicalParams(0.0, 0.1)
    with pytest.raises(ValidationError):
        SemiclassicalParams(0.1, -1.0)
    assert SemiclassicalParams(0.1, 0.3).revival_time() == 2 * math.pi / 0.1


def test_packet_spec_reduces_q0():
    spec = PacketSpec((7.0,), (1.0,))
    assert spec.q0[0] == pytest.approx(7.0 - 2 * math.pi)


def test_coefficients_against_direct_quadrature():
    hbar, q0, p0 = 0.1, 1.3, 0.7
    params, psi = packet(hbar, q0, p0)
    a = params.alpha
    x = np.linspace(q0 - 40 * a, q0 + 40 * a, 200001)
    eta = a ** -0.5 * G1.evaluate((x - q0) / a) * np.exp(1j * p0 * (x - q0) / hbar)
    for k in (0, 4, 7, 12):
        direct = np.trapezoid(eta * np.exp(-1j * k * x), x) / math.sqrt(2 * math.pi)
        assert abs(psi.coeffs[k - psi.kmin[0]] - direct) < 1e-12


def test_coherent_peak_and_norm():
    _, psi = packet(0.1, 0.0, 1.0)
    assert psi.kmin[0] + int(np.argmax(np.abs(psi.coeffs))) == 10
    defect_coarse = abs(1 - psi.norm2())
    assert defect_coarse <= 1e-8
    _, finer = packet(0.05, 0.0, 1.0)
    assert abs(1 - finer.norm2()) < defect_coarse


def test_window_overflow():
    params = SemiclassicalParams.from_hbar(1e-6, 2)
    with pytest.raises(WindowOverflow):
        coherent_state(params, PacketSpec((0, 0), (0, 0)), gaussian_profile(2))


def test_evolve_identity_and_period():
    params, psi = packet(0.1, 0.4, 0.3)
    assert np.array_equal(evolve(psi, 0.0).coeffs, psi.coeffs)
    assert np.max(np.abs(evolve(psi, params.revival_time()).coeffs - psi.coeffs)) <= 1e-12
    assert np.array_equal(evolve_fraction(psi, Fraction(1)).coeffs, psi.coeffs)


def test_half_period_is_antipodal_translation():
    params, psi = packet(0.1, 0.4, 0.3)
    half = evolve(psi, params.revival_time() / 2)
    assert np.max(np.abs(half.coeffs - translate(psi, math.pi).coeffs)) < 1e-12
    exact = evolve_fraction(psi, Fraction(1, 2))
    k = np.arange(psi.kmin[0], psi.kmax[0] + 1)
    assert np.array_equal(exact.coeffs, psi.coeffs * (-1.0) ** k)


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_unitarity_and_group_law(t1, t2):
    _, psi = packet(0.2, 0.1, 0.5)
    a = evolve(evolve(psi, t1), t2)
    b = evolve(psi, t1 + t2)
    assert np.max(np.abs(a.coeffs - b.coeffs)) < 1e-13 * max(1.0, abs(t1) + abs(t2)) * 10
    assert a.norm2() == pytest.approx(psi.norm2(), abs=1e-14)


def test_state_is_immutable():
    _, psi = packet(0.2)
    with pytest.raises((AttributeError, TypeError)):
        psi.hbar = 1.0
    with pytest.raises(ValueError):
        psi.coeffs[0] = 1.0


def test_inner_product_properties(rng):
    a = random_state(rng)
    b = FourierState((-3,), rng.normal(size=40) + 0j, 0.5)
    assert inner_product(a, a).real == pytest.approx(a.norm2(), abs=1e-14)
    assert inner_product(a, b) == pytest.approx(np.conj(inner_product(b, a)), abs=1e-14)
    with pytest.raises(ParamMismatch):
        inner_product(a, FourierState((0,), np.ones(2), 0.25))


def test_distant_packets_are_orthogonal():
    _, a = packet(0.05, 0.0, 0.0)
    _, b = packet(0.05, math.pi, 0.0)
    assert abs(inner_product(a, b)) < 1e-10


def test_position_density():
    flat = single_mode((0,), 0.1)
    q = np.linspace(0, 2 * math.pi, 7)
    assert np.allclose(position_density(flat, q), 1 / (2 * math.pi), atol=1e-15)
    _, psi = packet(0.05, 2.0, 0.0)
    grid = 2 * math.pi * np.arange(256) / 256
    assert grid[np.argmax(position_density(psi, grid))] == pytest.approx(2.0, abs=2 * math.pi / 256)
    fine = 2 * math.pi * np.arange(512) / 512
    assert np.sum(position_density(psi, fine)) * 2 * math.pi / 512 == pytest.approx(psi.norm2(), abs=1e-10)


def test_wavefunction_matches_direct_series(rng):
    psi = random_state(rng, 8)
    q = 0.77
    direct = sum(c * np.exp(1j * k * q) for k, c in zip(range(-10, -2), psi.coeffs)) / math.sqrt(2 * math.pi)
    assert wavefunction(psi, q) == pytest.approx(direct, abs=1e-14)


def test_translate():
    params, psi = packet(0.05, 1.0, 0.4)
    assert np.array_equal(translate(psi, 0.0).coeffs, psi.coeffs)
    back = translate(translate(psi, 0.3), -0.3)
    assert np.max(np.abs(back.coeffs - psi.coeffs)) <= 1e-15
    moved = coherent_state(params, PacketSpec((1.9,), (0.4,)), G1)
    assert np.max(np.abs(translate(psi, 0.9).coeffs - moved.coeffs)) < 1e-12


def test_two_dimensional_packet_factorizes():
    params, psi = packet(0.1, (0.5, 1.5), (0.2, -0.3), d=2)
    p1, a = packet(0.1, 0.5, 0.2)
    _, b = packet(0.1, 1.5, -0.3)
    assert np.max(np.abs(psi.coeffs - np.multiply.outer(a.coeffs, b.coeffs))) < 1e-15
