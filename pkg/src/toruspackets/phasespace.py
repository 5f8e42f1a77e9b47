"""Wigner and Husimi distributions of torus states and their pairings.

Wigner momentum support is the half lattice p = hbar m / 2 and is kept as
exact atoms; only q is ever put on a grid.

Husimi pairings use the coefficient bilinear form. For a term
w exp(i l.q) g(p) of the observable::

    integral H a = w sum_k psi_k conj(psi_{k+l}) J_{k,l}
    J_{k,l} = integral dxi conj(F(xi)) F(xi + alpha l) g(hbar k - hbar xi / alpha)

with F the profile transform. J is evaluated by step-halving trapezoid
quadrature in xi; under free evolution each summand picks up the phase
exp(i hbar t (2 k.l + |l|^2)), which is what makes time averages cheap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import GridTooLarge, ParamMismatch, QuadratureUnderResolved
from .profile import ProfileKind
from .state import PacketSpec, coherent_state, inner_product
from .summation import KahanAccumulator, fsum_complex

TWO_PI = 2 * math.pi
CELL_BUDGET = 2 ** 24
PAIR_ATOL = 1e-10
PAIR_FAIL = 1e-8
MAX_NODES = 2 ** 16
FIRST_NODES = 65


def _check(state, params, profile=None):
    if state.dimension != params.dimension or (profile is not None and profile.dimension != params.dimension):
        raise ParamMismatch("state, params and profile dimensions differ")
    if state.hbar != params.hbar:
        raise ParamMismatch(f"state built with hbar={state.hbar}, params say {params.hbar}")


# -- Husimi ------------------------------------------------------------------

def husimi_point(state, params, profile, q, p):
    """(2 pi hbar)^(-d) |(upsilon_qp, psi)|^2 via an explicit analysis state."""
    _check(state, params, profile)
    analysis = coherent_state(params, PacketSpec(q, p), profile)
    return abs(inner_product(analysis, state)) ** 2 / (TWO_PI * params.hbar) ** params.dimension


@dataclass(frozen=True)
class HusimiGridSpec:
    n_q: int = 256
    n_p: int = 256
    p_lo: tuple | None = None
    p_hi: tuple | None = None


@dataclass(frozen=True, eq=False)
class HusimiGrid:
    q_axis: np.ndarray
    p_axes: tuple
    values: np.ndarray
    hbar: float
    dimension: int

    @property
    def dq(self):
        return TWO_PI / self.q_axis.size

    @property
    def dp(self):
        return tuple(float(ax[1] - ax[0]) for ax in self.p_axes)

    @property
    def cell_volume(self):
        return self.dq ** self.dimension * math.prod(self.dp)

    def total(self):
        return float(np.sum(self.values) * self.cell_volume)

    def q_marginal(self):
        d = self.dimension
        return np.sum(self.values, axis=tuple(range(d, 2 * d))) * math.prod(self.dp)

    def argmax_q(self):
        marg = self.q_marginal()
        idx = np.unravel_index(int(np.argmax(marg)), marg.shape)
        return np.array([self.q_axis[i] for i in idx])


def default_p_window(state, params, profile, spread=8.0, obs=None):
    """Center at the mean momentum, half-width spread * combined momentum std."""
    d = state.dimension
    ks = state.lattice().reshape(-1, d).astype(float)
    w = (np.abs(state.coeffs) ** 2).ravel()
    w = w / np.sum(w)
    mean = params.hbar * (w @ ks)
    var = params.hbar ** 2 * (w @ (ks * ks)) - mean ** 2
    coh = params.hbar * profile.xi_spread() / params.alpha
    half = spread * np.sqrt(np.maximum(var, 0.0) + coh ** 2)
    lo, hi = mean - half, mean + half
    if obs is not None:
        for t in obs.terms:
            if not t.flat:
                lo = np.minimum(lo, np.asarray(t.center) - 8 * t.width)
                hi = np.maximum(hi, np.asarray(t.center) + 8 * t.width)
    return tuple(lo), tuple(hi)


def _q_phase_table(k, n_q):
    # exp(i k q_i) with q_i = 2 pi i / n_q, reduced exactly in integers
    idx = (int(k) * np.arange(n_q)) % n_q
    return np.exp(2j * np.pi * idx / n_q)


def husimi_grid(state, params, profile, gridspec=HusimiGridSpec()):
    _check(state, params, profile)
    d = params.dimension
    if gridspec.n_q < 2 or gridspec.n_p < 2:
        raise GridTooLarge("grid resolution must be at least 2 per axis")
    cells = (gridspec.n_q * gridspec.n_p) ** d
    if cells > CELL_BUDGET:
        raise GridTooLarge(f"{cells} cells exceed budget {CELL_BUDGET}")
    if gridspec.p_lo is None or gridspec.p_hi is None:
        lo, hi = default_p_window(state, params, profile)
    else:
        lo = np.broadcast_to(np.asarray(gridspec.p_lo, dtype=float), (d,))
        hi = np.broadcast_to(np.asarray(gridspec.p_hi, dtype=float), (d,))
    q_axis = TWO_PI * np.arange(gridspec.n_q) / gridspec.n_q
    p_axes = tuple(np.linspace(lo[a], hi[a], gridspec.n_p) for a in range(d))
    alpha, hbar = params.alpha, params.hbar
    shape = (gridspec.n_q,) * d + (gridspec.n_p,) * d
    acc = KahanAccumulator(shape)
    if not profile.separable:
        pgrid = np.stack(np.meshgrid(*p_axes, indexing="ij"), axis=-1)
    for k, c in zip(state.lattice().reshape(-1, d), state.coeffs.ravel()):
        if c == 0:
            continue
        term = np.array(c * alpha ** (d / 2))
        for a in range(d):
            term = np.multiply.outer(term, _q_phase_table(k[a], gridspec.n_q))
        if profile.separable:
            for a in range(d):
                term = np.multiply.outer(term, np.conj(profile.axis_fourier(alpha * (k[a] - p_axes[a] / hbar))))
        else:
            term = np.multiply.outer(term, np.conj(profile.fourier(alpha * (k - pgrid / hbar))))
        acc.add(term)
    values = np.abs(acc.value) ** 2 / (TWO_PI * hbar) ** d
    return HusimiGrid(q_axis, p_axes, values, hbar, d)


# -- Husimi pairing ------------------------------------------------------------

class PairingResult(NamedTuple):
    value: float
    error: float


def _trapezoid_weights(n, h):
    w = np.full(n, h)
    w[0] = w[-1] = h / 2
    return w


class HusimiPairing:
    """Husimi pairing of a state with an observable, as a function of time.

    ``at(t)`` is the pairing of the state freely evolved by ``t``;
    ``at(0)`` is the plain pairing.
    """

    def __init__(self, state, params, profile, obs, atol=PAIR_ATOL):
        _check(state, params, profile)
        if obs.dimension != state.dimension:
            raise ParamMismatch("observable dimension differs from state")
        self.hbar = params.hbar
        self._state, self._params, self._profile, self._obs = state, params, profile, obs
        self._cutoff = profile.fourier_cutoff()
        ks = state.lattice()
        n = FIRST_NODES
        while True:
            terms = [self._term(t, ks, n) for t in obs.terms]
            fine = fsum_complex(np.concatenate([D for D, _, _ in terms]))
            coarse = fsum_complex(np.concatenate([Dc for _, Dc, _ in terms]))
            err = abs(fine - coarse)
            if err <= atol:
                break
            nxt = 2 * n - 1
            too_big = nxt > MAX_NODES + 1 if profile.separable else nxt ** state.dimension > MAX_NODES
            if too_big:
                if err > PAIR_FAIL:
                    raise QuadratureUnderResolved(f"pairing step-halving disagreement {err:.3g} > {PAIR_FAIL}")
                break
            n = nxt
        self.error = float(err)
        self.nodes = n
        self._coeff = np.concatenate([D for D, _, _ in terms])
        self._freq = np.concatenate([w for _, _, w in terms])

    def _term(self, term, ks, n):
        state, params, profile = self._state, self._params, self._profile
        d = state.dimension
        l = np.asarray(term.j)
        pair = state.coeffs * np.conj(state.padded(tuple(np.asarray(state.kmin) + l), state.shape))
        xi = np.linspace(-self._cutoff, self._cutoff, n)
        h = xi[1] - xi[0]
        if profile.separable:
            fine = np.ones((1,) * d, dtype=complex)
            coarse = np.ones((1,) * d, dtype=complex)
            for a in range(d):
                kk = state.axis_modes(a)
                base = np.conj(profile.axis_fourier(xi)) * profile.axis_fourier(xi + params.alpha * l[a])
                p = params.hbar * kk[:, None] - params.hbar * xi[None, :] / params.alpha
                integrand = base[None, :] * term.axis_window(a, p)
                shape = [1] * d
                shape[a] = kk.size
                fine = fine * (integrand @ _trapezoid_weights(n, h)).reshape(shape)
                coarse = coarse * (integrand[:, ::2] @ _trapezoid_weights((n + 1) // 2, 2 * h)).reshape(shape)
        else:
            grid = np.stack(np.meshgrid(*([xi] * d), indexing="ij"), -1).reshape(-1, d)
            base = np.conj(profile.fourier(grid)) * profile.fourier(grid + params.alpha * l)
            w1 = _trapezoid_weights(n, h)
            wf = np.ones(1)
            for _ in range(d):
                wf = np.multiply.outer(wf, w1)
            wf = wf.reshape(-1)
            sub = np.ones((n,) * d, dtype=bool)
            for a in range(d):
                idx = [slice(None)] * d
                idx[a] = slice(1, None, 2)
                sub[tuple(idx)] = False
            w2 = _trapezoid_weights((n + 1) // 2, 2 * h)
            wc = np.ones(1)
            for _ in range(d):
                wc = np.multiply.outer(wc, w2)
            wc = wc.reshape(-1)
            sub = sub.reshape(-1)
            flat_k = ks.reshape(-1, d)
            fine = np.empty(flat_k.shape[0], dtype=complex)
            coarse = np.empty(flat_k.shape[0], dtype=complex)
            for start in range(0, flat_k.shape[0], 64):
                kb = flat_k[start:start + 64]
                p = params.hbar * kb[:, None, :] - params.hbar * grid[None, :, :] / params.alpha
                integrand = base[None, :] * term.window(p)
                fine[start:start + 64] = integrand @ wf
                coarse[start:start + 64] = integrand[:, sub] @ wc
            fine = fine.reshape(state.shape)
            coarse = coarse.reshape(state.shape)
        freq = params.hbar * (2 * (ks @ l) + l @ l)
        D = term.weight * pair * fine
        Dc = term.weight * pair * coarse
        mask = pair.ravel() != 0
        return D.ravel()[mask], Dc.ravel()[mask], freq.ravel()[mask].astype(float)

    def at(self, t=0.0):
        if t == 0:
            return fsum_complex(self._coeff).real
        return fsum_complex(self._coeff * np.exp(1j * self._freq * t)).real

    def batch(self, ts):
        """Pairing at many times; compensated over terms in fixed order."""
        ts = np.asarray(ts, dtype=float)
        acc = KahanAccumulator(ts.shape, dtype=float)
        for start in range(0, self._coeff.size, 512):
            block = np.exp(1j * np.multiply.outer(ts, self._freq[start:start + 512]))
            acc.add((block * self._coeff[start:start + 512]).real.sum(axis=-1))
        return acc.value

    def time_transform(self, transform):
        """sum_k D_k * transform(omega_k): exact t-integrals against a window."""
        return fsum_complex(self._coeff * transform(self._freq)).real


def pair_husimi_observable(state, params, profile, obs):
    """Finite-hbar Husimi pairing: returns (value, quadrature error estimate)."""
    kernel = HusimiPairing(state, params, profile, obs)
    return PairingResult(kernel.at(0.0), kernel.error)


# -- Wigner ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WignerField:
    """Atoms m -> (offsets r, coefficients); momentum of atom m is hbar m / 2.

    The q-dependence of atom m is sum_r coeff_r exp(i r.q).
    """
    atoms: dict
    hbar: float
    dimension: int

    def momentum(self, m):
        return self.hbar * np.asarray(m, dtype=float) / 2

    def series(self, m, q):
        q = np.asarray(q, dtype=float)
        if self.dimension == 1 and (q.ndim == 0 or q.shape[-1] != 1):
            q = q[..., None]
        offsets, coeffs = self.atoms[tuple(m)]
        return np.exp(1j * (q @ offsets.T)) @ coeffs

    def q_marginal(self, q):
        q = np.asarray(q, dtype=float)
        if self.dimension == 1 and (q.ndim == 0 or q.shape[-1] != 1):
            q = q[..., None]
        acc = KahanAccumulator(q.shape[:-1])
        for m in sorted(self.atoms):
            acc.add(self.series(m, q))
        return acc.value

    def momentum_masses(self):
        """Integral over the torus of each atom's q-series."""
        out = {}
        vol = TWO_PI ** self.dimension
        for m, (offsets, coeffs) in self.atoms.items():
            zero = np.all(offsets == 0, axis=1)
            out[m] = float((vol * coeffs[zero].sum()).real) if np.any(zero) else 0.0
        return out

    def pair(self, obs):
        """Pairing with an observable computed atom by atom."""
        vals = []
        vol = TWO_PI ** self.dimension
        for m in sorted(self.atoms):
            offsets, coeffs = self.atoms[m]
            p = self.momentum(m)
            for t in obs.terms:
                hit = np.all(offsets == -np.asarray(t.j), axis=1)
                if np.any(hit):
                    vals.append(vol * t.weight * coeffs[hit].sum() * t.window(p))
        return fsum_complex(np.array(vals)).real if vals else 0.0


def wigner(state, cell_budget=CELL_BUDGET):
    d = state.dimension
    ks = state.lattice().reshape(-1, d)
    c = state.coeffs.ravel()
    if ks.shape[0] ** 2 > cell_budget:
        raise GridTooLarge(f"{ks.shape[0]}^2 coefficient pairs exceed budget {cell_budget}")
    coef = (np.conj(c)[:, None] * c[None, :]).ravel() / TWO_PI ** d
    m = (ks[:, None, :] + ks[None, :, :]).reshape(-1, d)
    r = (ks[None, :, :] - ks[:, None, :]).reshape(-1, d)
    order = np.lexsort(tuple(np.concatenate([m, r], axis=1).T[::-1]))
    m, r, coef = m[order], r[order], coef[order]
    keys, starts = np.unique(m, axis=0, return_index=True)
    bounds = list(starts) + [m.shape[0]]
    atoms = {}
    for i, key in enumerate(keys):
        sl = slice(bounds[i], bounds[i + 1])
        atoms[tuple(int(v) for v in key)] = (r[sl], coef[sl])
    return WignerField(atoms, state.hbar, d)


def pair_wigner_observable(state, obs):
    """Exact sum over momentum atoms: sum_j conj(c_j) c_{j-l} g(hbar (2j - l) / 2)."""
    if obs.dimension != state.dimension:
        raise ParamMismatch("observable dimension differs from state")
    ks = state.lattice()
    parts = []
    for t in obs.terms:
        l = np.asarray(t.j)
        shifted = state.padded(tuple(np.asarray(state.kmin) - l), state.shape)
        p = state.hbar * (2 * ks - l) / 2
        parts.append((t.weight * np.conj(state.coeffs) * shifted * t.window(p)).ravel())
    return fsum_complex(np.concatenate(parts)).real


def _coherent_wigner_qfourier(params, profile, q, p, m, r):
    """integral over R^d of W_eta(q', hbar m / 2) exp(i r.q') dq' for eta at (q, p)."""
    d = params.dimension
    hbar, alpha = params.hbar, params.alpha
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    phase = np.exp(1j * (r @ q))
    if profile.kind is ProfileKind.GAUSSIAN:
        dp = hbar * m / 2 - p
        return ((np.pi * hbar) ** (-d) * (TWO_PI * alpha ** 2) ** (d / 2) * phase
                * np.exp(-alpha ** 2 * np.sum(r * r, axis=-1) / 2)
                * np.exp(-2 * alpha ** 2 * np.sum(dp * dp, axis=-1) / hbar ** 2))
    k = (m + r) / 2
    j = (m - r) / 2
    return (hbar ** (-d) * alpha ** d * phase
            * np.conj(profile.fourier(alpha * (k - p / hbar))) * profile.fourier(alpha * (j - p / hbar)))


def smooth_wigner_check(state, params, profile, q, p, cell_budget=CELL_BUDGET):
    """Both sides of H_psi(q,p) = integral W_{q,p}(q',p') W_psi(q',p') dq' dp'.

    The right side pairs the Wigner atoms of psi with the q'-Fourier transform of
    the packet's Wigner function.
    """
    _check(state, params, profile)
    lhs = husimi_point(state, params, profile, q, p)
    field = wigner(state, cell_budget)
    parts = []
    for m in sorted(field.atoms):
        offsets, coeffs = field.atoms[m]
        mm = np.broadcast_to(np.asarray(m, dtype=float), offsets.shape)
        kernel = _coherent_wigner_qfourier(params, profile, q, p, mm, offsets.astype(float))
        parts.append(coeffs * kernel)
    rhs = fsum_complex(np.concatenate(parts)).real
    return lhs, rhs
