"""Input pulse envelopes.

Every envelope is real, square-normalized on ``[0, inf)`` and exposes the
three quantities the coupling synthesis needs: the amplitude, its time
derivative and the cumulative energy ``int_0^t amplitude**2``.  Times are
in whatever unit the caller uses for ``1/kappa``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import erf, erfc

#: amplitude FWHM in units of the Gaussian standard deviation
FWHM_PER_ETA = 2.0 * math.sqrt(2.0 * math.log(2.0))
#: amplitude FWHM in units of the sech width
FWHM_PER_BETA = 2.0 * math.acosh(2.0)

DEFAULT_EDGE_THRESHOLD = 1e-5

# 4-point Gauss-Legendre integrates the squared cubic spline (degree 6) exactly
_GL_X, _GL_W = np.polynomial.legendre.leggauss(4)


def _sech(x):
    ax = np.abs(x)
    e = np.exp(-ax)
    return 2.0 * e / (1.0 + e * e)


@dataclass(frozen=True)
class GaussianPulse:
    """``(eta*sqrt(pi))**-0.5 * exp(-(t-T)**2 / (2 eta**2))``."""

    T: float
    eta: float

    def __post_init__(self):
        if not (self.T > 0 and self.eta > 0):
            raise ValueError(f"Gaussian pulse needs T > 0 and eta > 0, got T={self.T}, eta={self.eta}")

    @classmethod
    def from_duration(cls, tp, T=None):
        """Build from the amplitude FWHM ``tp``; ``T`` defaults to five widths."""
        eta = tp / FWHM_PER_ETA
        return cls(T=5.0 * eta if T is None else T, eta=eta)

    @property
    def duration(self):
        return FWHM_PER_ETA * self.eta

    @property
    def truncation_loss(self):
        """Pulse energy that arrives before t = 0 and is never seen."""
        return 0.5 * erfc(self.T / self.eta)

    @property
    def peak_time(self):
        return self.T

    @property
    def default_t_end(self):
        return self.T + 8.0 * self.eta

    def amplitude(self, t):
        t = np.asarray(t, dtype=float)
        return (self.eta * math.sqrt(math.pi)) ** -0.5 * np.exp(-((t - self.T) ** 2) / (2.0 * self.eta**2))

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        return -(t - self.T) / self.eta**2 * self.amplitude(t)

    def energy(self, t):
        t = np.asarray(t, dtype=float)
        a = self.T / self.eta
        x = (t - self.T) / self.eta
        # before the peak the erf sum cancels to ~1e-16; the erfc difference does not
        early = 0.5 * (erfc(-x) - erfc(a))
        late = 0.5 * (erf(a) + erf(x))
        return np.where(t > 0, np.where(x < 0, early, late), 0.0)


@dataclass(frozen=True)
class SechPulse:
    """``(2 beta)**-0.5 * sech((t-T) / beta)``."""

    T: float
    beta: float

    def __post_init__(self):
        if not (self.T > 0 and self.beta > 0):
            raise ValueError(f"sech pulse needs T > 0 and beta > 0, got T={self.T}, beta={self.beta}")

    @classmethod
    def from_duration(cls, tp, T=None):
        """Build from the amplitude FWHM ``tp``; ``T`` defaults to ten widths."""
        beta = tp / FWHM_PER_BETA
        return cls(T=10.0 * beta if T is None else T, beta=beta)

    @property
    def duration(self):
        return FWHM_PER_BETA * self.beta

    @property
    def truncation_loss(self):
        """Pulse energy that arrives before t = 0 and is never seen."""
        return 0.5 * (1.0 - math.tanh(self.T / self.beta))

    @property
    def peak_time(self):
        return self.T

    @property
    def default_t_end(self):
        return self.T + 20.0 * self.beta

    def amplitude(self, t):
        t = np.asarray(t, dtype=float)
        return (2.0 * self.beta) ** -0.5 * _sech((t - self.T) / self.beta)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        x = (t - self.T) / self.beta
        return -np.tanh(x) / self.beta * (2.0 * self.beta) ** -0.5 * _sech(x)

    def energy(self, t):
        t = np.asarray(t, dtype=float)
        a = self.T / self.beta
        b = np.maximum((self.T - t) / self.beta, 0.0)
        # tanh(a) - tanh(b) rewritten without the 1 - 1 cancellation
        early = (np.exp(-2.0 * b) - math.exp(-2.0 * a)) / ((1.0 + math.exp(-2.0 * a)) * (1.0 + np.exp(-2.0 * b)))
        late = 0.5 * (math.tanh(a) + np.tanh((t - self.T) / self.beta))
        return np.where(t > 0, np.where(t < self.T, early, late), 0.0)


@dataclass(frozen=True, eq=False)
class TabulatedPulse:
    """Sampled envelope with a natural cubic-spline interpolant.

    Build these through :func:`load_tabulated`, which rescales the samples
    to unit energy and records the factor it applied in ``scale``.
    """

    times: np.ndarray
    amplitudes: np.ndarray
    scale: float = 1.0
    _spline: CubicSpline = field(init=False, repr=False)
    _dspline: object = field(init=False, repr=False)
    _knot_energy: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        amps = np.array(self.amplitudes, dtype=float)
        times.flags.writeable = False
        amps.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "amplitudes", amps)
        spline = CubicSpline(times, amps, bc_type="natural", extrapolate=False)
        object.__setattr__(self, "_spline", spline)
        object.__setattr__(self, "_dspline", spline.derivative())
        seg = _segment_energy(spline, times[:-1], times[1:])
        object.__setattr__(self, "_knot_energy", np.concatenate(([0.0], np.cumsum(seg))))

    @property
    def duration(self):
        """Amplitude FWHM read off the samples."""
        a = np.abs(self.amplitudes)
        half = 0.5 * a.max()
        above = np.flatnonzero(a >= half)
        i, j = above[0], above[-1]
        t = self.times
        left = t[i] if i == 0 else np.interp(half, [a[i - 1], a[i]], [t[i - 1], t[i]])
        right = t[j] if j == len(t) - 1 else np.interp(half, [a[j + 1], a[j]], [t[j + 1], t[j]])
        return float(right - left)

    @property
    def truncation_loss(self):
        return 0.0

    @property
    def peak_time(self):
        return float(self.times[np.argmax(np.abs(self.amplitudes))])

    @property
    def default_t_end(self):
        return float(self.times[-1])

    def amplitude(self, t):
        return np.nan_to_num(self._spline(np.asarray(t, dtype=float)), nan=0.0)

    def derivative(self, t):
        return np.nan_to_num(self._dspline(np.asarray(t, dtype=float)), nan=0.0)

    def energy(self, t):
        t = np.asarray(t, dtype=float)
        tc = np.clip(t, self.times[0], self.times[-1])
        k = np.clip(np.searchsorted(self.times, tc, side="right") - 1, 0, len(self.times) - 2)
        return self._knot_energy[k] + _segment_energy(self._spline, self.times[k], tc)


def _segment_energy(spline, a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[..., None] + half[..., None] * _GL_X
    return half * np.sum(_GL_W * spline(x) ** 2, axis=-1)


# Module-level entry points; shapes are duck-typed on the methods above.

def amplitude(shape, t):
    return shape.amplitude(t)


def amplitude_derivative(shape, t):
    return shape.derivative(t)


def cumulative_energy(shape, t):
    """``int_0^t amplitude(shape, s)**2 ds``."""
    return shape.energy(t)


def load_tabulated(records, edge_threshold=DEFAULT_EDGE_THRESHOLD):
    """Build a unit-energy :class:`TabulatedPulse` from ``(time, amplitude)`` pairs.

    Parameters
    ----------
    records : sequence of (float, float)
        Samples ordered by time, first time at or after 0.
    edge_threshold : float
        Largest allowed ``|amplitude|`` at the first and last sample,
        relative to the peak magnitude.

    Returns
    -------
    TabulatedPulse
        ``shape.scale`` holds the factor the samples were multiplied by.
    """
    arr = np.asarray(records, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("records must be (time, amplitude) pairs")
    times, amps = arr[:, 0], arr[:, 1]
    if len(times) < 4:
        raise ValueError(f"need at least 4 samples, got {len(times)}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("records contain non-finite values")
    if np.any(np.diff(times) <= 0):
        raise ValueError("sample times must be strictly increasing")
    if times[0] < 0:
        raise ValueError(f"samples must start at t >= 0, first time is {times[0]}")
    peak = np.max(np.abs(amps))
    if peak == 0:
        raise ValueError("all amplitudes are zero")
    edge = max(abs(amps[0]), abs(amps[-1])) / peak
    if edge > edge_threshold:
        raise ValueError(
            f"edge amplitude is {edge:.2e} of the peak (threshold {edge_threshold:.1e}); "
            "the record does not contain the whole pulse"
        )
    raw = TabulatedPulse(times, amps)
    total = float(raw.energy(times[-1]))
    scale = 1.0 / math.sqrt(total)
    return TabulatedPulse(times, amps * scale, scale=scale)


def read_pulse_csv(path, edge_threshold=DEFAULT_EDGE_THRESHOLD):
    """Load a two-column ``t,amplitude`` CSV (header optional)."""
    rows = []
    with open(Path(path), newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip():
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                if lineno == 1 and not rows:
                    continue  # header
                raise ValueError(f"{path}:{lineno}: non-numeric row {row!r}") from None
    return load_tabulated(rows, edge_threshold=edge_threshold)
