"""Phase-space test functions a(q, p) = sum_j w_j exp(i j.q) g_j(p).

Each p-profile g_j is an isotropic Gaussian window
exp(-|p - c|^2 / (2 s^2)), optionally multiplied by the flow twist
exp(-2 i j.p tau) that appears when the observable is pulled back along the
free classical flow. ``width=inf`` gives a flat window (the constant observable).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class ObservableTerm:
    j: tuple
    weight: complex
    center: tuple
    width: float
    twist: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "j", tuple(int(v) for v in self.j))
        object.__setattr__(self, "center", tuple(float(v) for v in np.broadcast_to(self.center, (len(self.j),))))
        object.__setattr__(self, "weight", complex(self.weight))
        if not self.width > 0:
            raise ValidationError("window width must be positive")

    @property
    def flat(self):
        return math.isinf(self.width)

    def window(self, p):
        """g_j(p) for p of shape (..., d)."""
        p = np.asarray(p, dtype=float)
        out = np.ones(p.shape[:-1], dtype=complex)
        if not self.flat:
            diff = p - np.asarray(self.center)
            out = out * np.exp(-np.sum(diff * diff, axis=-1) / (2 * self.width ** 2))
        if self.twist:
            out = out * np.exp(-2j * self.twist * (p @ np.asarray(self.j, dtype=float)))
        return out

    def axis_window(self, axis, p):
        """Factor of g_j along one momentum axis; g_j is the product over axes."""
        p = np.asarray(p, dtype=float)
        out = np.ones(p.shape, dtype=complex)
        if not self.flat:
            out = out * np.exp(-((p - self.center[axis]) ** 2) / (2 * self.width ** 2))
        if self.twist:
            out = out * np.exp(-2j * self.twist * self.j[axis] * p)
        return out

    def conjugate_partner(self):
        return replace(self, j=tuple(-v for v in self.j), weight=self.weight.conjugate())


@dataclass(frozen=True)
class Observable:
    terms: tuple
    hermitian: bool = True

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ValidationError("observable needs at least one term")
        d = len(terms[0].j)
        if any(len(t.j) != d for t in terms):
            raise ValidationError("observable terms disagree on dimension")
        object.__setattr__(self, "terms", terms)
        if self.hermitian:
            keyed = {}
            for t in terms:
                key = (t.j, t.center, t.width, t.twist)
                keyed[key] = keyed.get(key, 0j) + t.weight
            for (j, center, width, twist), weight in keyed.items():
                partner = keyed.get((tuple(-v for v in j), center, width, twist))
                if partner is None or abs(partner - weight.conjugate()) > 1e-14 * max(1.0, abs(weight)):
                    raise ValidationError(f"term j={j} lacks its conjugate partner")

    @property
    def dimension(self):
        return len(self.terms[0].j)

    def __add__(self, other):
        return Observable(self.terms + other.terms, self.hermitian and other.hermitian)

    def scaled(self, factor):
        return Observable(tuple(replace(t, weight=t.weight * factor) for t in self.terms), self.hermitian)

    def composed_with_flow(self, tau):
        """a(q - 2 p tau, p): the observable pulled back by the inverse flow."""
        return Observable(tuple(replace(t, twist=t.twist + tau) for t in self.terms), self.hermitian)

    def evaluate(self, q, p):
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        total = 0j
        for t in self.terms:
            total = total + t.weight * np.exp(1j * (q @ np.asarray(t.j, dtype=float))) * t.window(p)
        return total

    def q_mean(self, p):
        """(2 pi)^(-d) integral over the torus of a(q, p): the j = 0 part."""
        p = np.asarray(p, dtype=float)
        total = 0j
        for t in self.terms:
            if not any(t.j):
                total = total + t.weight * t.window(p)
        return total

    def value_range(self, n_q=64, n_p=65):
        """Approximate (min, max) of the real observable by dense sampling."""
        d = self.dimension
        finite = [t for t in self.terms if not t.flat]
        if finite:
            lo = min(min(t.center) - 8 * t.width for t in finite)
            hi = max(max(t.center) + 8 * t.width for t in finite)
        else:
            lo, hi = -1.0, 1.0
        qs = TWO_PI * np.arange(n_q) / n_q
        ps = np.linspace(lo, hi, n_p)
        if d == 1:
            Q, P = np.meshgrid(qs, ps, indexing="ij")
            vals = self.evaluate(Q[..., None], P[..., None]).real
        else:
            qg = np.stack(np.meshgrid(*([qs[:: max(1, n_q // 16)]] * d), indexing="ij"), -1).reshape(-1, d)
            pg = np.stack(np.meshgrid(*([ps[:: max(1, n_p // 16)]] * d), indexing="ij"), -1).reshape(-1, d)
            vals = self.evaluate(qg[:, None, :], pg[None, :, :]).real
        return float(np.min(vals)), float(np.max(vals))


def _vec(value, d):
    return tuple(float(v) for v in np.broadcast_to(np.asarray(value, dtype=float), (d,)))


def constant(d, value=1.0, center=0.0, width=math.inf):
    return Observable((ObservableTerm((0,) * d, value, _vec(center, d), width),))


def cosine(j, center=0.0, width=math.inf, amplitude=1.0):
    """amplitude * cos(j.q) * g(p)."""
    j = tuple(int(v) for v in np.atleast_1d(j))
    d = len(j)
    if not any(j):
        return constant(d, amplitude, center, width)
    c = _vec(center, d)
    return Observable((
        ObservableTerm(j, amplitude / 2, c, width),
        ObservableTerm(tuple(-v for v in j), amplitude / 2, c, width),
    ))


def sine(j, center=0.0, width=math.inf, amplitude=1.0):
    """amplitude * sin(j.q) * g(p)."""
    j = tuple(int(v) for v in np.atleast_1d(j))
    c = _vec(center, len(j))
    return Observable((
        ObservableTerm(j, amplitude / 2j, c, width),
        ObservableTerm(tuple(-v for v in j), -amplitude / 2j, c, width),
    ))
