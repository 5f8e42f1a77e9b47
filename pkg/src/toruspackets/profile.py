"""Wave-packet envelopes on R^d.

Fourier convention used throughout the package::

    fourier(xi) = (2 pi)^(-d/2) * integral phi(x) exp(-i xi.x) dx

Two kinds of envelope exist: the closed-form Gaussian and an envelope given by
samples on a uniform box grid, for which every transform is a trapezoid sum
(spectrally accurate for rapidly decreasing integrands).
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ProfileInvalid, QuadratureUnderResolved

NORM_TOL = 1e-10
DECAY_TOL = 1e-14
QUAD_TOL = 1e-10
DEFAULT_BOX = 20.0
# |fourier|^2 below this counts as outside the momentum support
FOURIER_TAIL = 1e-16


class ProfileKind(enum.Enum):
    GAUSSIAN = "gaussian"
    NUMERIC_SAMPLED = "sampled"


def as_points(x, d):
    """Coerce ``x`` to an array of shape (..., d)."""
    x = np.asarray(x, dtype=float)
    if d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        return x[..., None]
    if x.shape[-1] != d:
        raise ValueError(f"expected trailing dimension {d}, got shape {x.shape}")
    return x


@dataclass(frozen=True, eq=False)
class Profile:
    kind: ProfileKind
    dimension: int
    samples: np.ndarray | None = None
    half_width: float = DEFAULT_BOX
    step: float | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def separable(self):
        """True when fourier(xi) factorizes into per-axis factors."""
        return self.kind is ProfileKind.GAUSSIAN or self.dimension == 1

    # -- evaluation -------------------------------------------------------
    def evaluate(self, x):
        x = as_points(x, self.dimension)
        if self.kind is ProfileKind.GAUSSIAN:
            r2 = np.sum(x * x, axis=-1)
            return (2 * np.pi) ** (-self.dimension / 4) * np.exp(-r2 / 4) + 0j
        return self._sinc_interpolate(x)

    def fourier(self, xi):
        """Unchecked vectorized transform; see ``profile_fourier``."""
        xi = as_points(xi, self.dimension)
        if self.kind is ProfileKind.GAUSSIAN:
            r2 = np.sum(xi * xi, axis=-1)
            return (2 / np.pi) ** (self.dimension / 4) * np.exp(-r2) + 0j
        return self._trapezoid_fourier(xi, stride=1)

    def axis_fourier(self, xi):
        """Per-axis factor g with fourier(xi) = prod_a g(xi_a)."""
        if not self.separable:
            raise ProfileInvalid("profile does not factorize over axes")
        xi = np.asarray(xi, dtype=float)
        if self.kind is ProfileKind.GAUSSIAN:
            return (2 / np.pi) ** 0.25 * np.exp(-xi * xi) + 0j
        return self._trapezoid_fourier(xi[..., None], stride=1)

    def autocorrelation_values(self, R):
        """Unchecked vectorized sigma_R; see ``autocorrelation``."""
        R = as_points(R, self.dimension)
        if self.kind is ProfileKind.GAUSSIAN:
            return np.exp(-np.sum(R * R, axis=-1) / 2) + 0j
        return self._spectral_autocorrelation(R, stride=1)

    def xi_spread(self):
        """RMS of one coordinate of xi under |fourier|^2 (1/2 for the Gaussian)."""
        if self.kind is ProfileKind.GAUSSIAN:
            return 0.5
        if "spread" not in self._cache:
            xi, power = self._power_spectrum(1)
            w = power * self._xi_step(1) ** self.dimension
            self._cache["spread"] = float(np.sqrt(np.sum(w * np.sum(xi * xi, axis=-1)) / self.dimension))
        return self._cache["spread"]

    def fourier_cutoff(self):
        """Radius (sup-norm) outside which |fourier|^2 < FOURIER_TAIL."""
        if self.kind is ProfileKind.GAUSSIAN:
            return 6.0
        if "cutoff" not in self._cache:
            xi, power = self._power_spectrum(1)
            radius = np.max(np.abs(xi), axis=-1)
            outside = power >= FOURIER_TAIL
            cut = float(np.max(radius[outside])) if np.any(outside) else 0.0
            self._cache["cutoff"] = min(cut + self._xi_step(1), np.pi / self.step)
        return self._cache["cutoff"]

    # -- sampled-profile internals ----------------------------------------
    def _axis_nodes(self, stride):
        n = self.samples.shape[0]
        return -self.half_width + self.step * np.arange(0, n, stride)

    def _sub(self, stride):
        sl = (slice(None, None, stride),) * self.dimension
        return self.samples[sl]

    def _trapezoid_fourier(self, xi, stride):
        d = self.dimension
        nodes = self._axis_nodes(stride)
        samples = self._sub(stride)
        h = self.step * stride
        flat_xi = xi.reshape(-1, d)
        out = np.empty(flat_xi.shape[0], dtype=complex)
        for start in range(0, flat_xi.shape[0], 256):
            block = flat_xi[start:start + 256]
            acc = samples[None, ...].astype(complex)
            for a in range(d):
                shape = [1] * (d + 1)
                shape[0] = block.shape[0]
                shape[a + 1] = nodes.size
                acc = acc * np.exp(-1j * np.outer(block[:, a], nodes)).reshape(shape)
            out[start:start + block.shape[0]] = acc.reshape(block.shape[0], -1).sum(axis=1)
        return (out * (h / np.sqrt(2 * np.pi)) ** d).reshape(xi.shape[:-1])

    def _xi_step(self, stride):
        n = self._sub(stride).shape[0]
        pad = 1 << int(math.ceil(math.log2(4 * n)))
        return 2 * np.pi / (pad * self.step * stride)

    def _power_spectrum(self, stride):
        """|fourier|^2 on the zero-padded FFT grid covering one Nyquist band."""
        key = ("power", stride)
        if key in self._cache:
            return self._cache[key]
        d = self.dimension
        samples = self._sub(stride)
        n = samples.shape[0]
        h = self.step * stride
        pad = 1 << int(math.ceil(math.log2(4 * n)))
        spec = np.fft.fftn(samples, s=(pad,) * d, axes=tuple(range(d)))
        # |.|^2 discards the exp(-i xi x_0) phase of the offset origin
        power = np.abs(spec) ** 2 * (h * h / (2 * np.pi)) ** d
        m = np.fft.fftfreq(pad, d=1.0 / pad)
        dxi = 2 * np.pi / (pad * h)
        axes = np.meshgrid(*([m * dxi] * d), indexing="ij")
        xi = np.stack(axes, axis=-1).reshape(-1, d)
        result = (xi, power.ravel())
        self._cache[key] = result
        return result

    def _spectral_autocorrelation(self, R, stride):
        xi, power = self._power_spectrum(stride)
        dxi = self._xi_step(stride)
        flat = R.reshape(-1, self.dimension)
        vals = np.array([np.sum(power * np.exp(2j * xi @ r)) for r in flat])
        return (vals * dxi ** self.dimension).reshape(R.shape[:-1])

    def _sinc_interpolate(self, x):
        d = self.dimension
        nodes = self._axis_nodes(1)
        flat = x.reshape(-1, d)
        out = np.empty(flat.shape[0], dtype=complex)
        for i, pt in enumerate(flat):
            acc = self.samples.astype(complex)
            for a in range(d):
                shape = [1] * d
                shape[a] = nodes.size
                acc = acc * np.sinc((pt[a] - nodes) / self.step).reshape(shape)
            out[i] = acc.sum()
        return out.reshape(x.shape[:-1])

    def quadrature_error(self, xi=None, R=None):
        """Step-halving estimate for the sampled transforms at given points."""
        if self.kind is ProfileKind.GAUSSIAN:
            return 0.0
        errs = [0.0]
        if xi is not None:
            xi = as_points(xi, self.dimension)
            fine = self._trapezoid_fourier(xi, 1)
            coarse = self._trapezoid_fourier(xi, 2)
            errs.append(float(np.max(np.abs(fine - coarse), initial=0.0)))
        if R is not None:
            R = as_points(R, self.dimension)
            fine = self._spectral_autocorrelation(R, 1)
            coarse = self._spectral_autocorrelation(R, 2)
            errs.append(float(np.max(np.abs(fine - coarse), initial=0.0)))
        return max(errs)


def gaussian_profile(d):
    """Closed-form envelope (2 pi)^(-d/4) exp(-x^2/4)."""
    if int(d) != d or d < 1:
        raise ProfileInvalid(f"dimension must be a positive integer, got {d!r}")
    return Profile(ProfileKind.GAUSSIAN, int(d))


def sampled_profile(samples, half_width, step):
    """Envelope given on the grid -L + i*h, i = 0..n-1, along every axis.

    The grid must be symmetric with an odd point count so that a step-doubled
    subgrid exists for error estimation.
    """
    samples = np.asarray(samples, dtype=complex)
    d = samples.ndim
    n = samples.shape[0]
    if any(s != n for s in samples.shape):
        raise ProfileInvalid("sample grid must have equal extent along every axis")
    if n < 5 or n % 2 == 0:
        raise ProfileInvalid("sample grid needs an odd number (>= 5) of points per axis")
    if not math.isclose(-half_width + step * (n - 1), half_width, rel_tol=1e-9):
        raise ProfileInvalid("grid must span [-L, L] exactly")
    norm = float(np.sum(np.abs(samples) ** 2) * step ** d)
    if abs(norm - 1.0) > NORM_TOL:
        raise ProfileInvalid(f"L2 norm {norm!r} differs from 1 by more than {NORM_TOL}")
    edge = 0.0
    for a in range(d):
        edge = max(edge, float(np.max(np.abs(np.take(samples, [0, -1], axis=a)))))
    if edge > DECAY_TOL:
        raise ProfileInvalid(f"profile does not decay at the box edge (|phi| = {edge:.3g})")
    return Profile(ProfileKind.NUMERIC_SAMPLED, d, samples, float(half_width), float(step))


def sample_profile(profile, half_width=DEFAULT_BOX, step=0.05):
    """Tabulate ``profile`` on a box grid and return it as a sampled profile."""
    n = int(round(2 * half_width / step)) + 1
    nodes = -half_width + step * np.arange(n)
    axes = np.meshgrid(*([nodes] * profile.dimension), indexing="ij")
    pts = np.stack(axes, axis=-1)
    values = profile.evaluate(pts)
    # renormalize away the trapezoid defect of the tabulation
    values = values / np.sqrt(np.sum(np.abs(values) ** 2) * step ** profile.dimension)
    values[np.abs(values) < 1e-300] = 0.0
    return sampled_profile(values, half_width, step)


def load_profile_csv(path):
    """Read a sampled profile from CSV with header ``x_1..x_d,re,im``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        rows = [[float(v) for v in row] for row in reader if row]
    d = len(header) - 2
    expected = [f"x_{i + 1}" for i in range(d)] + ["re", "im"]
    if d < 1 or header != expected:
        raise ProfileInvalid(f"bad header {header}; expected {expected}")
    data = np.array(rows)
    coords = [np.unique(data[:, a]) for a in range(d)]
    n = coords[0].size
    if any(c.size != n for c in coords) or data.shape[0] != n ** d:
        raise ProfileInvalid("CSV rows do not form a full tensor grid")
    step = float(coords[0][1] - coords[0][0])
    for c in coords:
        if not np.allclose(np.diff(c), step, rtol=1e-9, atol=0):
            raise ProfileInvalid("grid is not uniform")
    idx = [np.rint((data[:, a] - coords[a][0]) / step).astype(int) for a in range(d)]
    samples = np.zeros((n,) * d, dtype=complex)
    samples[tuple(idx)] = data[:, d] + 1j * data[:, d + 1]
    return sampled_profile(samples, -float(coords[0][0]), step)


def write_profile_csv(profile, path):
    d = profile.dimension
    nodes = profile._axis_nodes(1)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"x_{i + 1}" for i in range(d)] + ["re", "im"])
        for index in np.ndindex(*profile.samples.shape):
            v = profile.samples[index]
            w.writerow([f"{nodes[i]:.17g}" for i in index] + [f"{v.real:.17g}", f"{v.imag:.17g}"])


def _check(profile, **points):
    err = profile.quadrature_error(**points)
    if err > QUAD_TOL:
        raise QuadratureUnderResolved(f"sampled-profile quadrature error {err:.3g} > {QUAD_TOL}")


def profile_fourier(profile, xi):
    if profile.kind is ProfileKind.NUMERIC_SAMPLED:
        _check(profile, xi=xi)
    out = profile.fourier(xi)
    return complex(out) if np.ndim(out) == 0 else out


def autocorrelation(profile, R):
    """sigma_R = integral phi(x) conj(phi(x - 2R)) dx."""
    if profile.kind is ProfileKind.NUMERIC_SAMPLED:
        _check(profile, R=R)
    out = profile.autocorrelation_values(R)
    return complex(out) if np.ndim(out) == 0 else out
