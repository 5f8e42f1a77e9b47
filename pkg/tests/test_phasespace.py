import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_state
from toruspackets.errors import GridTooLarge
from toruspackets.observable import constant, cosine
from toruspackets.phasespace import (
    HusimiGridSpec,
    HusimiPairing,
    husimi_grid,
    husimi_point,
    pair_husimi_observable,
    pair_wigner_observable,
    smooth_wigner_check,
    wigner,
)
from toruspackets.profile import gaussian_profile, sample_profile
from toruspackets.state import (
    FourierState,
    PacketSpec,
    SemiclassicalParams,
    coherent_state,
    evolve,
    position_density,
    single_mode,
    translate,
)

G1 = gaussian_profile(1)


def packet(hbar, q0=0.0, p0=0.0):
    params = SemiclassicalParams.from_hbar(hbar)
    return params, coherent_state(params, PacketSpec((q0,), (p0,)), G1)


# -- Husimi ---------------------------------------------------------------------

def test_husimi_at_center():
    params, psi = packet(0.05, 1.0, 0.5)
    value = husimi_point(psi, params, G1, (1.0,), (0.5,))
    oracle = psi.norm2() ** 2 / (2 * math.pi * 0.05)
    assert value == pytest.approx(oracle, rel=1e-13)
    assert abs(value * 2 * math.pi * 0.05 - 1) < 0.05


def test_single_mode_husimi():
    params = SemiclassicalParams.from_hbar(0.1)
    psi = single_mode((3,), 0.1)
    ps = np.linspace(0.0, 0.6, 13)
    for q in (0.0, 2.0):
        vals = np.array([husimi_point(psi, params, G1, (q,), (p,)) for p in ps])
        oracle = params.alpha * np.abs(G1.fourier(params.alpha * (3 - ps / 0.1))) ** 2 / (2 * math.pi * 0.1)
        assert np.max(np.abs(vals - oracle)) < 1e-13
    assert ps[np.argmax(vals)] == pytest.approx(0.3)


def test_grid_normalization_and_positivity():
    params, psi = packet(0.05, 1.0, 0.5)
    grid = husimi_grid(psi, params, G1)
    assert np.all(grid.values >= 0)
    assert grid.total() == pytest.approx(1.0, abs=1e-3)


def test_grid_matches_pointwise():
    params, psi = packet(0.1, 2.0, -0.3)
    grid = husimi_grid(psi, params, G1, HusimiGridSpec(16, 9))
    for i, k in [(0, 0), (5, 4), (11, 8)]:
        point = husimi_point(psi, params, G1, (grid.q_axis[i],), (grid.p_axes[0][k],))
        assert grid.values[i, k] == pytest.approx(point, rel=1e-12, abs=1e-14)


def test_grid_translation_covariance():
    params, psi = packet(0.05, 1.0, 0.5)
    spec = HusimiGridSpec(256, 64, (0.0,), (1.0,))
    base = husimi_grid(psi, params, G1, spec)
    shift = 8
    moved = husimi_grid(translate(psi, 2 * math.pi * shift / 256), params, G1, spec)
    assert np.max(np.abs(moved.values - np.roll(base.values, shift, axis=0))) < 1e-12


def test_single_mode_grid_rows_identical():
    params = SemiclassicalParams.from_hbar(0.1)
    grid = husimi_grid(single_mode((0,), 0.1), params, G1, HusimiGridSpec(32, 16))
    assert np.max(np.abs(grid.values - grid.values[0])) < 1e-13


def test_grid_budget():
    params, psi = packet(0.1)
    with pytest.raises(GridTooLarge):
        husimi_grid(psi, params, G1, HusimiGridSpec(8192, 4096))


# -- Husimi pairing -----------------------------------------------------------------

def test_constant_pairing_is_mass():
    params, psi = packet(0.05, 1.0, 0.5)
    res = pair_husimi_observable(psi, params, G1, constant(1))
    assert res.value == pytest.approx(1.0, abs=1e-8)
    assert res.error <= 1e-10


def test_cosine_pairing_single_mode_vanishes():
    params = SemiclassicalParams.from_hbar(0.1)
    value = pair_husimi_observable(single_mode((2,), 0.1), params, G1, cosine(1, width=4.0)).value
    assert abs(value) < 1e-12


def test_cosine_pairing_against_dense_grid():
    params, psi = packet(0.05)
    obs = cosine(1, width=4.0)
    value = pair_husimi_observable(psi, params, G1, obs).value
    grid = husimi_grid(psi, params, G1, HusimiGridSpec(256, 401, (-2.0,), (2.0,)))
    Q, P = np.meshgrid(grid.q_axis, grid.p_axes[0], indexing="ij")
    riemann = np.sum(grid.values * obs.evaluate(Q[..., None], P[..., None]).real) * grid.cell_volume
    assert value == pytest.approx(riemann, abs=1e-9)
    assert value >= 0.9
    assert value == pytest.approx(0.9504871462569654, abs=1e-12)


def test_pairing_time_dependence_matches_evolution():
    params, psi = packet(0.1, 0.5, 0.8)
    obs = cosine(1, width=2.0) + cosine(2, center=0.5, width=1.0, amplitude=0.3)
    kernel = HusimiPairing(psi, params, G1, obs)
    for t in (0.0, 1.3, 17.0):
        direct = pair_husimi_observable(evolve(psi, t), params, G1, obs).value
        assert kernel.at(t) == pytest.approx(direct, abs=1e-12)
    ts = np.array([0.0, 1.3, 17.0])
    assert np.allclose(kernel.batch(ts), [kernel.at(t) for t in ts], atol=1e-13)


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_pairing_linear(u, v):
    params, psi = packet(0.1, 0.5, 0.3)
    a = cosine(1, width=2.0)
    b = cosine(2, center=0.3, width=1.0)
    lhs = pair_husimi_observable(psi, params, G1, a.scaled(u) + b.scaled(v)).value
    rhs = u * pair_husimi_observable(psi, params, G1, a).value + v * pair_husimi_observable(psi, params, G1, b).value
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_sampled_profile_pairing_matches_gaussian():
    sampled = sample_profile(G1, 20.0, 0.05)
    params = SemiclassicalParams.from_hbar(0.1)
    spec = PacketSpec((0.5,), (0.3,))
    obs = cosine(1, width=2.0)
    a = pair_husimi_observable(coherent_state(params, spec, G1), params, G1, obs).value
    b = pair_husimi_observable(coherent_state(params, spec, sampled), params, sampled, obs).value
    assert a == pytest.approx(b, abs=1e-9)


def test_two_dimensional_pairing_separates():
    params = SemiclassicalParams.from_hbar(0.1, 2)
    g2 = gaussian_profile(2)
    psi = coherent_state(params, PacketSpec((0.3, 1.2), (0.2, -0.1)), g2)
    obs = cosine((1, 0), width=3.0)
    p1 = SemiclassicalParams.from_hbar(0.1)
    a1 = coherent_state(p1, PacketSpec((0.3,), (0.2,)), G1)
    a2 = coherent_state(p1, PacketSpec((1.2,), (-0.1,)), G1)
    first = pair_husimi_observable(a1, p1, G1, cosine(1, width=3.0)).value
    second = pair_husimi_observable(a2, p1, G1, constant(1, width=3.0)).value
    assert pair_husimi_observable(psi, params, g2, obs).value == pytest.approx(first * second, abs=1e-12)


# -- Wigner -------------------------------------------------------------------------

def test_wigner_marginals(rng):
    psi = random_state(rng, 32)
    field = wigner(psi)
    q = rng.uniform(0, 2 * math.pi, 64)
    assert np.max(np.abs(field.q_marginal(q) - position_density(psi, q))) < 1e-12
    masses = field.momentum_masses()
    for k, c in zip(range(psi.kmin[0], psi.kmax[0] + 1), psi.coeffs):
        assert abs(masses[(2 * k,)] - abs(c) ** 2) < 1e-14
    odd = [m for m in masses if m[0] % 2]
    assert all(abs(masses[m]) < 1e-14 for m in odd)


def test_wigner_reality(rng):
    psi = random_state(rng, 16)
    field = wigner(psi)
    for m in list(field.atoms)[::5]:
        assert abs(field.series(m, rng.uniform(0, 6)).imag) <= 1e-14


def test_wigner_pairing_routes(rng):
    psi = random_state(rng, 24)
    obs = cosine(1, width=3.0) + cosine(3, center=0.4, width=1.0, amplitude=0.5) + constant(1, 0.2, 0.1, 2.0)
    assert pair_wigner_observable(psi, obs) == pytest.approx(wigner(psi).pair(obs), abs=1e-12)
    assert pair_wigner_observable(psi, constant(1)) == pytest.approx(psi.norm2(), abs=1e-12)


def test_two_mode_interference():
    c = np.array([1.0, 0.6 - 0.8j]) / math.sqrt(2)
    psi = FourierState((0,), c, 0.1)
    obs = cosine(1, width=4.0)
    hand = (np.conj(c[0]) * c[1]).real * math.exp(-(0.05 ** 2) / 32)
    assert pair_wigner_observable(psi, obs) == pytest.approx(hand, abs=1e-12)
    assert wigner(psi).pair(obs) == pytest.approx(hand, abs=1e-12)


def test_wigner_and_husimi_pairings_merge():
    gaps = []
    for hbar in (0.2, 0.1, 0.05):
        params, psi = packet(hbar, 0.4, 0.2)
        obs = cosine(1, center=0.2, width=2.0)
        gaps.append(abs(pair_wigner_observable(psi, obs) - pair_husimi_observable(psi, params, G1, obs).value))
    assert gaps[0] > gaps[1] > gaps[2]


# -- smoothing identity ---------------------------------------------------------------

def test_smoothing_identity_two_mode():
    params = SemiclassicalParams(0.5, math.sqrt(0.5))
    psi = FourierState((0,), np.array([0.6, 0.8j]), 0.5)
    lhs, rhs = smooth_wigner_check(psi, params, G1, (0.7,), (0.3,))
    assert abs(lhs - rhs) <= 1e-10


def test_smoothing_identity_coherent_center():
    params, psi = packet(0.5, 1.0, 0.5)
    lhs, rhs = smooth_wigner_check(psi, params, G1, (1.0,), (0.5,))
    assert abs(lhs - rhs) <= 1e-10


def test_smoothing_identity_single_mode():
    params = SemiclassicalParams(0.5, math.sqrt(0.5))
    psi = single_mode((1,), 0.5)
    a = smooth_wigner_check(psi, params, G1, (0.2,), (0.4,))
    b = smooth_wigner_check(psi, params, G1, (2.9,), (0.4,))
    assert abs(a[0] - a[1]) <= 1e-12 and abs(a[0] - b[0]) <= 1e-12 and abs(a[1] - b[1]) <= 1e-12


def test_smoothing_identity_sampled_profile():
    sampled = sample_profile(G1, 20.0, 0.05)
    params = SemiclassicalParams(0.5, math.sqrt(0.5))
    psi = FourierState((-1,), np.array([0.3, 0.5 + 0.2j, -0.4, 0.1j]), 0.5)
    lhs, rhs = smooth_wigner_check(psi, params, sampled, (0.9,), (-0.2,))
    assert abs(lhs - rhs) <= 1e-10
