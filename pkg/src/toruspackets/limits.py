"""Closed-form semiclassical limit laws for free packets on the torus.

Covers the time-schedule classification (uniform shell vs fractional
revival), revival arithmetic, the copy profile delta_B and its theta-function
image form, limit measures and their pairings, time-averaged limits with the
resonance test, and the classical flow g^t(q, p) = (q + 2 p t, p).
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DriftUnresolved, NonIrreducible, SingularAtZeroWidth, ValidationError
from .profile import ProfileKind, gaussian_profile
from .quadrature import romberg
from .summation import fsum_complex

TWO_PI = 2 * math.pi
B_INFINITE = math.inf
SERIES_CUTOFF = 1e-15
RESONANCE_RTOL = 1e-12
SQRT2_LITERAL = "1.414213562373095048801688724210"


# -- time schedules ---------------------------------------------------------------

@dataclass(frozen=True)
class RationalRevival:
    """t = (M/N) T_hbar + B alpha / hbar."""
    M: int
    N: int
    B: float = 0.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValidationError("N must be a positive integer")
        if not self.B >= 0:
            raise ValidationError("B must be non-negative")


@dataclass(frozen=True)
class IrrationalScale:
    """t = A T_hbar + B alpha / hbar with A declared irrational.

    ``literal`` keeps the high-precision decimal the float came from; it is
    recorded, never tested.
    """
    A: float
    B: float = 0.0
    literal: str | None = None

    def __post_init__(self):
        if not self.B >= 0:
            raise ValidationError("B must be non-negative")


@dataclass(frozen=True)
class GrowingAction:
    """hbar t -> infinity; realized as t = T_hbar ln(1/hbar)."""


def sqrt2_schedule(B=0.0):
    return IrrationalScale(float(SQRT2_LITERAL), B, SQRT2_LITERAL)


class Regime(enum.Enum):
    EQUIDISTRIBUTION = "equidistribution"
    FRACTIONAL_REVIVAL = "fractional_revival"


def _require_irreducible(M, N):
    if math.gcd(abs(int(M)), int(N)) != 1:
        raise NonIrreducible(f"{M}/{N} is not in lowest terms")


def classify_schedule(sched):
    if isinstance(sched, RationalRevival):
        _require_irreducible(sched.M, sched.N)
        return Regime.EQUIDISTRIBUTION if math.isinf(sched.B) else Regime.FRACTIONAL_REVIVAL
    if isinstance(sched, (IrrationalScale, GrowingAction)):
        return Regime.EQUIDISTRIBUTION
    raise ValidationError(f"unknown schedule {sched!r}")


# -- revival arithmetic ------------------------------------------------------------

@dataclass(frozen=True)
class RevivalStructure:
    N_prime: int
    delta_q0: tuple
    gamma: int
    copy_centers: tuple
    copy_weight: float


def revival_structure(M, N, d=1, base=None):
    """Copy count, parity shift and copy centers of the (M/N) fractional revival.

    Centers are base + delta_q0 - 2 pi k / N' (mod 2 pi) for k in [N']^d in
    lexicographic order; ``base`` defaults to the origin.
    """
    _require_irreducible(M, N)
    n_prime = N if N % 2 else N // 2
    gamma = 1 if N % 4 == 2 else 0
    shift = (TWO_PI / N) * gamma
    delta = (shift,) * d
    base = np.zeros(d) if base is None else np.asarray(base, dtype=float)
    centers = []
    for k in itertools.product(range(n_prime), repeat=d):
        c = np.mod(base + shift - TWO_PI * np.asarray(k) / n_prime, TWO_PI)
        centers.append(tuple(float(v) for v in c))
    return RevivalStructure(n_prime, delta, gamma, tuple(centers), 1.0 / n_prime ** d)


# -- delta_B -----------------------------------------------------------------------

def _sigma_cutoff_radius(profile, B):
    """Sup-norm radius J with |sigma_{B j}| < SERIES_CUTOFF for |j| > J."""
    if profile.kind is ProfileKind.GAUSSIAN:
        return int(math.ceil(math.sqrt(2 * math.log(1 / SERIES_CUTOFF)) / B))
    d = profile.dimension
    J = 1
    while J < 4096:
        shell = [j for j in itertools.product(range(-J, J + 1), repeat=d) if max(map(abs, j)) == J]
        vals = profile.autocorrelation_values(B * np.array(shell, dtype=float))
        if np.max(np.abs(vals)) < SERIES_CUTOFF:
            return J
        J *= 2
    return J


def _lattice_box(J, d):
    axes = np.meshgrid(*([np.arange(-J, J + 1)] * d), indexing="ij")
    return np.stack(axes, axis=-1).reshape(-1, d)


def delta_B(profile, B, q):
    """(2 pi)^(-d) sum_j sigma_{B j} exp(i j.q), truncated at |sigma| < 1e-15."""
    if B == 0:
        raise SingularAtZeroWidth("delta_B at B = 0 is a Dirac comb; no point values")
    if B < 0:
        raise ValidationError("B must be non-negative")
    d = profile.dimension
    q = np.asarray(q, dtype=float)
    if d == 1 and (q.ndim == 0 or q.shape[-1] != 1):
        q = q[..., None]
    if math.isinf(B):
        out = np.full(q.shape[:-1], TWO_PI ** (-d))
        return float(out) if out.ndim == 0 else out
    js = _lattice_box(_sigma_cutoff_radius(profile, B), d)
    sig = profile.autocorrelation_values(B * js.astype(float))
    keep = np.abs(sig) >= SERIES_CUTOFF
    js, sig = js[keep], sig[keep]
    flat = q.reshape(-1, d)
    out = np.array([fsum_complex(sig * np.exp(1j * (js @ x))).real for x in flat]) * TWO_PI ** (-d)
    out = out.reshape(q.shape[:-1])
    return float(out) if out.ndim == 0 else out


def theta_identity_check(B, q, d=1):
    """Gaussian delta_B as (Fourier series, periodized Gaussian) pair."""
    if not B > 0:
        raise ValidationError("B must be positive")
    q = np.broadcast_to(np.asarray(q, dtype=float), (d,))
    J = int(math.ceil(math.sqrt(2 * math.log(1 / SERIES_CUTOFF)) / B))
    js = np.arange(-J, J + 1)
    reach = B * math.sqrt(2 * math.log(1 / SERIES_CUTOFF))
    fourier, images = 1.0, 1.0
    for x in q:
        fourier *= math.fsum(np.exp(-(B * js) ** 2 / 2) * np.cos(js * x)) / TWO_PI
        ns = np.arange(math.floor((x - reach) / TWO_PI) - 1, math.ceil((x + reach) / TWO_PI) + 2)
        images *= math.fsum(np.exp(-((x - TWO_PI * ns) ** 2) / (2 * B * B))) / math.sqrt(TWO_PI * B * B)
    return fourier, images


# -- time windows ------------------------------------------------------------------

@dataclass(frozen=True)
class BoxWindow:
    t0: float = 0.0
    t1: float = 1.0
    height: float = 1.0

    def integral(self):
        return self.height * (self.t1 - self.t0)

    def support(self):
        return self.t0, self.t1

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.where((t >= self.t0) & (t <= self.t1), self.height, 0.0)

    def fourier(self, omega):
        """integral b(t) exp(i omega t) dt, exact."""
        omega = np.asarray(omega, dtype=float)
        small = np.abs(omega) * (self.t1 - self.t0) < 1e-8
        safe = np.where(small, 1.0, omega)
        val = (np.exp(1j * safe * self.t1) - np.exp(1j * safe * self.t0)) / (1j * safe)
        mid = (self.t1 - self.t0) * np.exp(1j * omega * (self.t0 + self.t1) / 2)
        return self.height * np.where(small, mid, val)


@dataclass(frozen=True)
class GaussianWindow:
    center: float = 0.0
    width: float = 1.0
    height: float = 1.0

    def integral(self):
        return self.height * self.width * math.sqrt(TWO_PI)

    def support(self):
        return self.center - 10 * self.width, self.center + 10 * self.width

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.height * np.exp(-((t - self.center) ** 2) / (2 * self.width ** 2))

    def fourier(self, omega):
        omega = np.asarray(omega, dtype=float)
        return self.integral() * np.exp(1j * omega * self.center - (omega * self.width) ** 2 / 2)


# -- limit measures --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class UniformShell:
    p0: tuple

    def to_dict(self):
        return {"variant": "UniformShell", "p0": list(self.p0), "B": None, "centers": [], "weight": None}


@dataclass(frozen=True, eq=False)
class RevivalMixture:
    p0: tuple
    B: float
    structure: RevivalStructure
    drift: tuple
    profile: object = None

    def to_dict(self):
        return {
            "variant": "RevivalMixture",
            "p0": list(self.p0),
            "B": self.B,
            "N_prime": self.structure.N_prime,
            "delta_q0": list(self.structure.delta_q0),
            "gamma": self.structure.gamma,
            "drift": list(self.drift),
            "centers": [list(c) for c in self.structure.copy_centers],
            "weight": self.structure.copy_weight,
        }


@dataclass(frozen=True, eq=False)
class TimeAveraged:
    p0: tuple
    B: float
    q0: tuple
    window: object
    profile: object = None

    def to_dict(self):
        return {
            "variant": "TimeAveraged",
            "p0": list(self.p0),
            "B": self.B,
            "q0": list(self.q0),
            "window": {"kind": type(self.window).__name__, **self.window.__dict__},
            "centers": [],
            "weight": None,
        }


def limit_measure(sched, spec, residual_time=None, profile=None):
    """Limit of the Husimi distribution along ``sched`` for the packet ``spec``.

    For a fractional revival with p0 != 0 the copies sit at a drift
    2 p0 (t - A T) that has no limit in general; ``residual_time`` supplies
    t - A T so the drift is concrete.
    """
    d = spec.dimension
    profile = profile or gaussian_profile(d)
    p0 = np.asarray(spec.p0)
    if classify_schedule(sched) is Regime.EQUIDISTRIBUTION:
        return UniformShell(spec.p0)
    if np.any(p0 != 0):
        if residual_time is None:
            raise DriftUnresolved("p0 != 0 on a rational schedule needs the residual time t - (M/N) T")
        drift = 2 * p0 * residual_time
    else:
        drift = np.zeros(d)
    base = np.asarray(spec.q0) + drift
    structure = revival_structure(sched.M, sched.N, d, base)
    return RevivalMixture(spec.p0, sched.B, structure, tuple(float(v) for v in drift), profile)


def smoothed_observable_value(obs, profile, B, q, p):
    """a^(B)(q, p) = sum_j sigma_{B j} w_j g_j(p) exp(i j.q)."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    parts = []
    for t in obs.terms:
        j = np.asarray(t.j, dtype=float)
        sig = 1.0 if B == 0 or not np.any(j) else complex(profile.autocorrelation_values(B * j))
        parts.append(sig * t.weight * complex(t.window(p)) * np.exp(1j * (j @ q)))
    return fsum_complex(np.array(parts)).real


def pair_limit_observable(measure, obs):
    if isinstance(measure, UniformShell):
        return float(np.real(obs.q_mean(np.asarray(measure.p0))))
    if isinstance(measure, RevivalMixture):
        profile = measure.profile or gaussian_profile(len(measure.p0))
        vals = [smoothed_observable_value(obs, profile, measure.B, c, measure.p0)
                for c in measure.structure.copy_centers]
        return math.fsum(vals) * measure.structure.copy_weight
    if isinstance(measure, TimeAveraged):
        return time_average_limit(obs, measure.p0, measure.B, measure.window,
                                  q0=measure.q0, profile=measure.profile)
    raise ValidationError(f"unknown measure {measure!r}")


# -- resonance and time averages ---------------------------------------------------------

def resonant(p0, j_search_bound=1000, rtol=RESONANCE_RTOL):
    """Is there a nonzero integer j, |j|_inf <= bound, with |j.p0| <= rtol |p0|?"""
    if j_search_bound < 1:
        raise ValidationError("search bound must be at least 1")
    p = np.atleast_1d(np.asarray(p0, dtype=float))
    scale = float(np.linalg.norm(p))
    if scale == 0:
        return True
    tol = rtol * scale
    if p.size == 1:
        return False
    # solve for the coordinate with the largest |p_a|; enumerate the others
    a = int(np.argmax(np.abs(p)))
    rest = np.delete(p, a)
    rng = np.arange(-j_search_bound, j_search_bound + 1)
    for head in itertools.product(rng, repeat=rest.size - 1):
        head = np.asarray(head, dtype=float)
        partial = rng * rest[-1] + (head @ rest[:-1] if head.size else 0.0)
        ja = np.rint(-partial / p[a])
        ok = (np.abs(ja) <= j_search_bound) & (np.abs(partial + ja * p[a]) <= tol)
        nonzero = (ja != 0) | (rng != 0) | (np.any(head != 0) if head.size else False)
        if np.any(ok & nonzero):
            return True
    return False


def _orthogonal(j, p0, rtol=RESONANCE_RTOL):
    p = np.asarray(p0, dtype=float)
    return abs(float(np.asarray(j, dtype=float) @ p)) <= rtol * max(float(np.linalg.norm(p)), 0.0)


def time_average_limit(obs, p0, B, window, q0=None, profile=None):
    """Limit of the time-averaged Husimi pairing.

    B = inf: <a>(p0) * integral b. Finite B: sum over observable terms with
    j.p0 = 0 of [integral b(t) sigma_{B t j} dt] w_j g_j(p0) exp(i j.q0).
    """
    p0 = np.atleast_1d(np.asarray(p0, dtype=float))
    d = p0.size
    q0 = np.zeros(d) if q0 is None else np.atleast_1d(np.asarray(q0, dtype=float))
    profile = profile or gaussian_profile(d)
    if math.isinf(B):
        return float(np.real(obs.q_mean(p0))) * window.integral()
    parts = []
    for t in obs.terms:
        j = np.asarray(t.j, dtype=float)
        if not _orthogonal(j, p0):
            continue
        if B == 0 or not np.any(j):
            weight = window.integral()
        else:
            lo, hi = window.support()

            def integrand(ts, j=j):
                return window(ts) * profile.autocorrelation_values(B * np.outer(ts, j)).real

            weight, _ = romberg(integrand, lo, hi, atol=1e-12)
        parts.append(weight * t.weight * complex(t.window(p0)) * np.exp(1j * (j @ q0)))
    return fsum_complex(np.array(parts)).real if parts else 0.0


def time_averaged_measure(p0, B, window, q0=None, profile=None):
    p0 = tuple(float(v) for v in np.atleast_1d(p0))
    q0 = tuple(float(v) for v in (np.zeros(len(p0)) if q0 is None else np.atleast_1d(q0)))
    return TimeAveraged(p0, B, q0, window, profile)


# -- classical flow -------------------------------------------------------------------------

def classical_flow(q, p, t):
    """g^t(q, p) = (q + 2 p t mod 2 pi, p)."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    return np.mod(q + 2 * p * t, TWO_PI), p
