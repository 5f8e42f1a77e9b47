"""hbar-schedule sweeps that compare finite-hbar pairings with the limit laws."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ValidationError
from .limits import (
    GrowingAction,
    IrrationalScale,
    RationalRevival,
    limit_measure,
    pair_limit_observable,
)
from .phasespace import HusimiPairing, pair_husimi_observable
from .quadrature import romberg
from .state import SemiclassicalParams, coherent_state, evolve_fraction

TWO_PI = 2 * math.pi
SMALLNESS_FACTOR = 10.0


@dataclass(frozen=True)
class HbarSchedule:
    """hbar_n = base * ratio**n for n = 0..n_max, alpha = hbar**gamma."""
    n_max: int = 5
    gamma: float = 0.5
    base: float = 0.4
    ratio: float = 0.5
    hbar_seq: tuple | None = None

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValidationError("gamma must lie in (0, 1)")
        seq = self.hbars
        if not seq:
            raise ValidationError("empty hbar schedule")
        if any(h <= 0 for h in seq) or any(b >= a for a, b in zip(seq, seq[1:])):
            raise ValidationError("hbar sequence must be positive and strictly decreasing")

    @property
    def hbars(self):
        if self.hbar_seq is not None:
            return tuple(float(h) for h in self.hbar_seq)
        return tuple(self.base * self.ratio ** n for n in range(self.n_max + 1))

    def params(self, d=1):
        return [SemiclassicalParams.from_hbar(h, d, self.gamma) for h in self.hbars]


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    hbar: float
    alpha: float
    t_value: float
    empirical_pairing: float
    theoretical_pairing: float
    abs_error: float
    flags: tuple = field(default=())


def _split_time(sched, params):
    """(fraction of T_hbar, residual time) so that t = fraction * T + residual."""
    if isinstance(sched, RationalRevival):
        if math.isinf(sched.B):
            raise ValidationError("B = inf is a limit sentinel and has no finite-hbar time")
        return Fraction(sched.M, sched.N), sched.B * params.alpha / params.hbar
    if isinstance(sched, IrrationalScale):
        if math.isinf(sched.B):
            raise ValidationError("B = inf is a limit sentinel and has no finite-hbar time")
        return sched.A, sched.B * params.alpha / params.hbar
    if isinstance(sched, GrowingAction):
        return math.log(1 / params.hbar), 0.0
    raise ValidationError(f"unknown schedule {sched!r}")


def realize_time(sched, params):
    fraction, residual = _split_time(sched, params)
    return float(fraction) * params.revival_time() + residual


def evolved_packet(params, spec, profile, sched):
    fraction, residual = _split_time(sched, params)
    return evolve_fraction(coherent_state(params, spec, profile), fraction, residual)


def smallness_flags(params, spec):
    """Rows where a scale separation holds by less than a factor of 10."""
    flags = []
    pbar = float(np.linalg.norm(spec.p0))
    if params.alpha * SMALLNESS_FACTOR > TWO_PI:
        flags.append("alpha_vs_torus")
    if pbar * math.pi < SMALLNESS_FACTOR * params.hbar:
        flags.append("action_vs_hbar")
    if pbar * params.alpha < SMALLNESS_FACTOR * params.hbar:
        flags.append("spread_vs_hbar")
    return tuple(flags)


def _map_ordered(fn, items, threads):
    if threads == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads or None) as pool:
        return list(pool.map(fn, items))


def run_convergence(schedule, tsched, spec, profile, obs, threads=1):
    d = spec.dimension

    def row(item):
        n, params = item
        fraction, residual = _split_time(tsched, params)
        state = evolve_fraction(coherent_state(params, spec, profile), fraction, residual)
        empirical = pair_husimi_observable(state, params, profile, obs).value
        measure = limit_measure(tsched, spec, residual_time=residual, profile=profile)
        theoretical = pair_limit_observable(measure, obs)
        return ConvergenceRow(
            n, params.hbar, params.alpha, float(fraction) * params.revival_time() + residual,
            empirical, theoretical, abs(empirical - theoretical), smallness_flags(params, spec),
        )

    return _map_ordered(row, list(enumerate(schedule.params(d))), threads)


def revival_scan(params, spec, profile, steps=257):
    """|<psi_0, psi_t>|^2 on the uniform grid t_i = i T / (steps - 1), endpoints included.

    Phases are reduced in integer arithmetic, so the endpoints match exactly.
    """
    if steps < 2:
        raise ValidationError("a scan needs at least two time points")
    state = coherent_state(params, spec, profile)
    weights = (np.abs(state.coeffs) ** 2).ravel()
    k2 = state.k_squared().ravel().astype(np.int64)
    keep = weights > 0
    weights, k2 = weights[keep], k2[keep]
    period = params.revival_time()
    den = steps - 1
    out = []
    for i in range(steps):
        turns = ((i * k2) % den) / den
        amp = math.fsum(weights * np.cos(TWO_PI * turns)) - 1j * math.fsum(weights * np.sin(TWO_PI * turns))
        out.append((period * i / den, abs(amp) ** 2))
    return out


def count_peaks(scan, rel=0.2):
    """Local maxima of the scan at least ``rel`` times the t = 0 value; endpoints compare to one side."""
    vals = np.array([v for _, v in scan])
    floor = rel * vals[0]
    peaks = 0
    for i, v in enumerate(vals):
        left = vals[i - 1] if i > 0 else -np.inf
        right = vals[i + 1] if i + 1 < vals.size else -np.inf
        if v >= floor and v >= left and v >= right:
            peaks += 1
    return peaks


def lambda_rule(params, target):
    """Time stretch with hbar lambda / alpha -> target along the schedule.

    target = inf uses lambda = alpha^(1/2) / hbar (hbar lambda -> 0 as well);
    target = 0 uses alpha^(3/2) / hbar; finite B uses B alpha / hbar.
    """
    if math.isinf(target):
        return math.sqrt(params.alpha) / params.hbar
    if target == 0:
        return params.alpha ** 1.5 / params.hbar
    if target < 0:
        raise ValidationError("target must be non-negative")
    return target * params.alpha / params.hbar


def time_averaged_pairing(params, lambda_factor, spec, profile, obs, window, atol=1e-6, exact=False):
    """integral b(t) <H at time lambda t, a> dt.

    Adaptive Romberg in t by default; ``exact=True`` uses the closed-form
    window transform term by term instead.
    """
    kernel = HusimiPairing(coherent_state(params, spec, profile), params, profile, obs)
    if exact:
        return kernel.time_transform(lambda w: window.fourier(lambda_factor * w))
    lo, hi = window.support()
    value, _ = romberg(lambda ts: window(ts) * kernel.batch(lambda_factor * ts), lo, hi, atol=atol)
    return float(value)


def flow_corrected_pairing(params, spec, profile, obs, tsched, residual_time):
    """Pairing at t = A T + residual with the drift 2 p residual pulled back out.

    Pairs the evolved state against a(q - 2 p residual, p), the observable
    composed with the inverse free flow.
    """
    fraction, offset = _split_time(tsched, params)
    state = evolve_fraction(coherent_state(params, spec, profile), fraction, offset + residual_time)
    corrected = obs.composed_with_flow(offset + residual_time) if (offset + residual_time) else obs
    return pair_husimi_observable(state, params, profile, corrected).value


def uncorrected_pairing(params, spec, profile, obs, tsched, residual_time):
    fraction, offset = _split_time(tsched, params)
    state = evolve_fraction(coherent_state(params, spec, profile), fraction, offset + residual_time)
    return pair_husimi_observable(state, params, profile, obs).value
