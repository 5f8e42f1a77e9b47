"""Truncated Fourier states on the torus and their exact free evolution.

A state is psi(x) = (2 pi)^(-d/2) sum_k c_k exp(i k.x) with c_k stored on an
integer box window. Free evolution is the diagonal map
c_k -> c_k exp(-i hbar t |k|^2), periodic in t with period 2 pi / hbar.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ParamMismatch, ValidationError, WindowOverflow
from .summation import KahanAccumulator, fsum_complex

TRUNCATION_BUDGET = 1e-14
MAX_LATTICE_POINTS = 2 ** 22
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class SemiclassicalParams:
    hbar: float
    alpha: float
    dimension: int = 1

    def __post_init__(self):
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise ValidationError(f"hbar must be positive, got {self.hbar!r}")
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValidationError(f"alpha must be positive, got {self.alpha!r}")
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ValidationError(f"dimension must be a positive integer, got {self.dimension!r}")

    @classmethod
    def from_hbar(cls, hbar, dimension=1, gamma=0.5):
        """Params with the width rule alpha = hbar**gamma."""
        return cls(hbar, hbar ** gamma, dimension)

    def revival_time(self):
        return TWO_PI / self.hbar


@dataclass(frozen=True)
class PacketSpec:
    q0: tuple
    p0: tuple

    def __post_init__(self):
        q0 = np.atleast_1d(np.asarray(self.q0, dtype=float))
        p0 = np.atleast_1d(np.asarray(self.p0, dtype=float))
        if q0.shape != p0.shape or q0.ndim != 1:
            raise ValidationError("q0 and p0 must be vectors of equal length")
        if not (np.all(np.isfinite(q0)) and np.all(np.isfinite(p0))):
            raise ValidationError("packet center must be finite")
        object.__setattr__(self, "q0", tuple(float(v) for v in np.mod(q0, TWO_PI)))
        object.__setattr__(self, "p0", tuple(float(v) for v in p0))

    @property
    def dimension(self):
        return len(self.q0)


class FourierState:
    """Immutable coefficient table on the window prod_a [kmin_a, kmin_a + n_a - 1]."""

    __slots__ = ("dimension", "kmin", "coeffs", "hbar")

    def __init__(self, kmin, coeffs, hbar):
        coeffs = np.array(coeffs, dtype=complex)
        kmin = tuple(int(k) for k in np.atleast_1d(kmin))
        if coeffs.ndim != len(kmin):
            raise ValidationError("coefficient array rank must equal the dimension")
        if not hbar > 0:
            raise ValidationError("hbar must be positive")
        coeffs.setflags(write=False)
        object.__setattr__(self, "dimension", len(kmin))
        object.__setattr__(self, "kmin", kmin)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "hbar", float(hbar))

    def __setattr__(self, name, value):
        raise AttributeError("FourierState is immutable")

    def __repr__(self):
        return f"FourierState(d={self.dimension}, window={self.window}, hbar={self.hbar})"

    @property
    def shape(self):
        return self.coeffs.shape

    @property
    def kmax(self):
        return tuple(k + n - 1 for k, n in zip(self.kmin, self.coeffs.shape))

    @property
    def window(self):
        return [(lo, hi) for lo, hi in zip(self.kmin, self.kmax)]

    def axis_modes(self, axis):
        return self.kmin[axis] + np.arange(self.coeffs.shape[axis])

    def lattice(self):
        """Integer vectors k, shape coeffs.shape + (d,), lexicographic order."""
        axes = np.meshgrid(*[self.axis_modes(a) for a in range(self.dimension)], indexing="ij")
        return np.stack(axes, axis=-1)

    def k_squared(self):
        return np.sum(self.lattice() ** 2, axis=-1)

    def norm2(self):
        return math.fsum((np.abs(self.coeffs) ** 2).ravel())

    def with_coeffs(self, coeffs):
        return FourierState(self.kmin, coeffs, self.hbar)

    def padded(self, kmin, shape):
        """Coefficients embedded in a larger window (zeros outside)."""
        out = np.zeros(shape, dtype=complex)
        src, dst = [], []
        for a in range(self.dimension):
            lo = max(kmin[a], self.kmin[a])
            hi = min(kmin[a] + shape[a], self.kmin[a] + self.coeffs.shape[a])
            if hi <= lo:
                return out
            src.append(slice(lo - self.kmin[a], hi - self.kmin[a]))
            dst.append(slice(lo - kmin[a], hi - kmin[a]))
        out[tuple(dst)] = self.coeffs[tuple(src)]
        return out


def single_mode(K, hbar, amplitude=1.0):
    K = np.atleast_1d(np.asarray(K, dtype=int))
    return FourierState(K, np.full((1,) * K.size, amplitude, dtype=complex), hbar)


def window_half_width(profile, alpha):
    return int(math.ceil(profile.fourier_cutoff() / alpha))


def coherent_state(params, spec, profile, half_width=None, max_points=MAX_LATTICE_POINTS):
    """Fourier coefficients of the periodized packet centered at (q0, p0).

    c_k = alpha^(d/2) exp(-i k.q0) fourier(alpha (k - p0/hbar)), taken on a box
    of half-width ceil(cutoff/alpha) around round(p0/hbar) so the dropped
    momentum mass stays below TRUNCATION_BUDGET.
    """
    d = params.dimension
    if spec.dimension != d or profile.dimension != d:
        raise ParamMismatch("params, packet and profile dimensions differ")
    hw = window_half_width(profile, params.alpha) if half_width is None else int(half_width)
    n = 2 * hw + 1
    if float(n) ** d > max_points:
        raise WindowOverflow(f"window {n}^{d} exceeds {max_points} lattice points")
    p_over_h = np.asarray(spec.p0) / params.hbar
    center = np.rint(p_over_h).astype(int)
    kmin = center - hw
    q0 = np.asarray(spec.q0)
    axes = [kmin[a] + np.arange(n) for a in range(d)]
    if profile.separable:
        coeffs = np.ones((1,) * d, dtype=complex)
        for a, k in enumerate(axes):
            f = np.sqrt(params.alpha) * np.exp(-1j * k * q0[a]) * profile.axis_fourier(params.alpha * (k - p_over_h[a]))
            shape = [1] * d
            shape[a] = n
            coeffs = coeffs * f.reshape(shape)
    else:
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        phase = np.exp(-1j * (grid @ q0))
        coeffs = params.alpha ** (d / 2) * phase * profile.fourier(params.alpha * (grid - p_over_h))
    return FourierState(kmin, coeffs, params.hbar)


def _turns(k2, s):
    """Fractional part of s * k2 (in turns), exact for rational s."""
    if isinstance(s, Fraction):
        num = (s.numerator * k2.astype(object)) % s.denominator
        return np.asarray(num, dtype=float) / s.denominator
    s = float(s)
    frac = s - math.floor(s)
    return np.mod(frac * k2, 1.0)


_QUARTER_TURNS = np.array([1, -1j, -1, 1j])


def _phase(turns):
    """exp(-2 pi i turns), exact on multiples of a quarter turn."""
    out = np.exp(-2j * np.pi * turns)
    quarters = 4 * turns
    exact = quarters == np.round(quarters)
    if np.any(exact):
        out[exact] = _QUARTER_TURNS[np.round(quarters[exact]).astype(int) % 4]
    return out


def evolve_fraction(state, fraction, extra_time=0.0):
    """Evolve by fraction * T_hbar + extra_time.

    ``fraction`` may be a ``Fraction``, in which case the revival phase is
    reduced in exact integer arithmetic.
    """
    if fraction == 0 and extra_time == 0:
        return state.with_coeffs(state.coeffs.copy())
    k2 = state.k_squared()
    turns = _turns(k2, fraction)
    if extra_time:
        turns = turns + _turns(k2, state.hbar * extra_time / TWO_PI)
    return state.with_coeffs(state.coeffs * _phase(turns))


def evolve(state, t):
    """c_k -> c_k exp(-i hbar t |k|^2)."""
    if t == 0:
        return state.with_coeffs(state.coeffs.copy())
    k2 = state.k_squared()
    turns = _turns(k2, state.hbar * t / TWO_PI)
    return state.with_coeffs(state.coeffs * _phase(turns))


def _check_compatible(a, b):
    if a.dimension != b.dimension or a.hbar != b.hbar:
        raise ParamMismatch(f"states differ: d {a.dimension}/{b.dimension}, hbar {a.hbar}/{b.hbar}")


def inner_product(a, b):
    """sum_k conj(a_k) b_k over the union window (missing entries are zero)."""
    _check_compatible(a, b)
    lo = [max(x, y) for x, y in zip(a.kmin, b.kmin)]
    hi = [min(x, y) for x, y in zip(a.kmax, b.kmax)]
    if any(h < l for l, h in zip(lo, hi)):
        return 0j
    shape = tuple(h - l + 1 for l, h in zip(lo, hi))
    prod = np.conj(a.padded(lo, shape)) * b.padded(lo, shape)
    return fsum_complex(prod)


def fourier_series(state, q):
    """sum_k c_k exp(i k.q) at points q of shape (..., d), compensated over k."""
    q = np.asarray(q, dtype=float)
    if state.dimension == 1 and (q.ndim == 0 or q.shape[-1] != 1):
        q = q[..., None]
    acc = KahanAccumulator(q.shape[:-1])
    ks = state.lattice().reshape(-1, state.dimension)
    cs = state.coeffs.ravel()
    for k, c in zip(ks, cs):
        if c != 0:
            acc.add(c * np.exp(1j * (q @ k)))
    return acc.value


def wavefunction(state, q):
    return fourier_series(state, q) * (TWO_PI ** (-state.dimension / 2))


def position_density(state, q):
    """|psi(q)|^2."""
    out = np.abs(wavefunction(state, q)) ** 2
    return float(out) if np.ndim(out) == 0 else out


def translate(state, dq):
    """Shift the wave function by dq: c_k -> c_k exp(-i k.dq)."""
    dq = np.atleast_1d(np.asarray(dq, dtype=float))
    if dq.size != state.dimension:
        raise ParamMismatch("shift dimension differs from state dimension")
    if not np.any(dq):
        return state.with_coeffs(state.coeffs.copy())
    phase = np.exp(-1j * (state.lattice() @ dq))
    return state.with_coeffs(state.coeffs * phase)
