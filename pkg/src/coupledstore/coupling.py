"""Synthesis of the inter-cavity coupling that absorbs a pulse without reflection.

Imposing a vanishing output field pins the port-cavity amplitude to
``c_a = alpha_in / sqrt(2 kappa)``.  The storage-mode amplitude then follows
from energy balance,

    c_b(t)**2 = int_0^t alpha_in**2 - alpha_in(t)**2 / (2 kappa),

and the coupling is whatever makes both amplitudes consistent with the
equations of motion:

    g(t) = (alpha_in'(t) - kappa alpha_in(t)) / (sqrt(2 kappa) c_b(t)).

The record starts at t = 0, so a pulse with a nonzero tail there leaves
the radicand short by ``alpha_in(0)**2 / (2 kappa)`` (the *edge deficit*).
The coupling is held at zero until the radicand has recovered that amount.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DegenerateDenominator, NegativeRadicand
from .output import fmt

RADICAND_TOL = 1e-12
EDGE_LIMIT = 1e-8
CB_FLOOR = 1e-9
NUMERATOR_FLOOR = 1e-9
SWITCH_OFF_REL = 1e-8
MAX_KAPPA_DT = 1e-2


@dataclass(frozen=True)
class SystemConfig:
    """Cavity decay rate, time grid and coherent photon number.

    ``max_kappa_dt`` caps the step size; it exists so that convergence
    studies can deliberately run coarser than production grids.
    """

    kappa: float
    t_end: float
    dt: float
    n_p: float = 1.0
    max_kappa_dt: float = MAX_KAPPA_DT

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end > self.dt:
            raise ValueError(f"t_end={self.t_end} must exceed dt={self.dt}")
        if self.kappa * self.dt > self.max_kappa_dt * (1 + 1e-12):
            raise ValueError(f"kappa*dt={self.kappa * self.dt:.3g} exceeds {self.max_kappa_dt:g}")
        if not self.n_p > 0:
            raise ValueError(f"n_p must be positive, got {self.n_p}")

    @classmethod
    def for_shape(cls, shape, kappa=1.0, kappa_dt=1e-3, n_p=1.0, extend=0.0, **kw):
        """Default grid: the shape's own horizon plus ``extend``, step ``kappa_dt/kappa``."""
        return cls(kappa=kappa, t_end=shape.default_t_end + abs(extend), dt=kappa_dt / kappa, n_p=n_p, **kw)

    @property
    def n_steps(self):
        return int(math.ceil(self.t_end / self.dt - 1e-9))

    @property
    def times(self):
        """Uniform grid from 0 to ``t_end`` rounded up to a whole step."""
        return np.arange(self.n_steps + 1) * self.dt


@dataclass(frozen=True)
class ValidityReport:
    min_radicand: float
    linewidth_ratio: float
    ok: bool
    edge_deficit: float
    edge_end_time: float | None


@dataclass(frozen=True, eq=False)
class CouplingProfile:
    times: np.ndarray
    g_values: np.ndarray
    switch_off_time: float | None
    validity: ValidityReport
    kappa: float

    def __post_init__(self):
        for name in ("times", "g_values"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @cached_property
    def _interp(self):
        return CubicSpline(self.times, self.g_values)

    def at(self, t):
        """Cubic-spline interpolated coupling; zero outside the profile's span."""
        t = np.asarray(t, dtype=float)
        inside = (t >= self.times[0]) & (t <= self.times[-1])
        val = self._interp(np.clip(t, self.times[0], self.times[-1]))
        return np.where(inside, val, 0.0)

    def summary(self):
        v = self.validity
        return {
            "kappa": self.kappa,
            "switch_off_time": self.switch_off_time,
            "min_radicand": v.min_radicand,
            "linewidth_ratio": v.linewidth_ratio,
            "edge_deficit": v.edge_deficit,
            "edge_end_time": v.edge_end_time,
            "ok": v.ok,
            "max_abs_g": float(np.max(np.abs(self.g_values))),
        }


def edge_deficit(shape, kappa):
    """Radicand shortfall at t = 0 caused by truncating the pulse there."""
    return float(shape.amplitude(0.0)) ** 2 / (2.0 * kappa)


def _slack(deficit):
    return RADICAND_TOL + (deficit if deficit < EDGE_LIMIT else 0.0)


def radicand(shape, kappa, t):
    return shape.energy(t) - shape.amplitude(t) ** 2 / (2.0 * kappa)


def stored_amplitude(shape, config, t):
    """Storage-mode amplitude ``c_b(t)`` along the ideal trajectory.

    Round-off and edge-truncation negatives are clamped to zero; anything
    deeper raises :class:`NegativeRadicand`.
    """
    t_arr = np.asarray(t, dtype=float)
    rad = radicand(shape, config.kappa, t_arr)
    bad = rad < -_slack(edge_deficit(shape, config.kappa))
    if np.any(bad):
        i = np.flatnonzero(np.ravel(bad))[0]
        raise NegativeRadicand(np.ravel(t_arr)[i], np.ravel(rad)[i])
    return np.sqrt(np.maximum(rad, 0.0))


def optimal_coupling(shape, config, t):
    """Coupling ``g(t)`` that keeps the reflected field at zero.

    Negative wherever the pulse is still charging mode B.  Where ``c_b``
    sits below its floor the coupling is set to zero if the pulse is
    still at edge level, ``c_b`` is within the edge-truncation error, or
    the numerator is negligible; otherwise :class:`DegenerateDenominator`
    is raised.
    """
    kappa = config.kappa
    t_arr = np.asarray(t, dtype=float)
    cb = stored_amplitude(shape, config, t_arr)
    a = shape.amplitude(t_arr)
    num = shape.derivative(t_arr) - kappa * a
    deficit = edge_deficit(shape, kappa)
    floor = max(CB_FLOOR, math.sqrt(deficit)) if deficit < EDGE_LIMIT else CB_FLOOR
    low = cb < floor
    # c_b below sqrt(deficit) is inside the truncation error and carries no information
    shadow = cb**2 < deficit if deficit < EDGE_LIMIT else False
    at_edge = (a**2 / (2.0 * kappa) < EDGE_LIMIT) | shadow
    negligible = np.abs(num) < NUMERATOR_FLOOR * math.sqrt(kappa)
    bad = low & ~at_edge & ~negligible
    if np.any(bad):
        i = np.flatnonzero(np.ravel(bad))[0]
        raise DegenerateDenominator(np.ravel(t_arr)[i], np.ravel(num)[i], np.ravel(cb)[i])
    with np.errstate(divide="ignore", invalid="ignore"):
        g = num / (math.sqrt(2.0 * kappa) * cb)
    return np.where(low, 0.0, g)


def check_validity(shape, config):
    """Grid scan of the radicand; never raises."""
    kappa = config.kappa
    t = config.times
    rad = radicand(shape, kappa, t)
    deficit = edge_deficit(shape, kappa)
    nonneg = np.flatnonzero(rad >= 0)
    edge_end = int(nonneg[0]) if len(nonneg) else None
    tail = rad[edge_end:] if edge_end is not None else rad
    ok = (
        deficit < EDGE_LIMIT
        and edge_end is not None
        and float(tail.min()) >= -RADICAND_TOL
        and float(rad.min()) >= -_slack(deficit)
    )
    return ValidityReport(
        min_radicand=float(tail.min()),
        linewidth_ratio=kappa * shape.duration,
        ok=bool(ok),
        edge_deficit=deficit,
        edge_end_time=None if edge_end is None else float(t[edge_end]),
    ), rad


def synthesize_profile(shape, config):
    """Ideal coupling on the configuration grid, clamped to zero after storage.

    The switch-off time is the first grid point after the pulse peak where
    ``|g|`` drops below ``1e-8 * max|g|``; ``None`` if that never happens
    inside the grid.
    """
    report, rad = check_validity(shape, config)
    t = config.times
    if not report.ok:
        deficit = report.edge_deficit
        if deficit >= EDGE_LIMIT:
            raise NegativeRadicand(0.0, -deficit)
        after = np.zeros_like(rad, dtype=bool)
        if report.edge_end_time is not None:
            after[t >= report.edge_end_time] = True
        bad = (rad < -_slack(deficit)) | (after & (rad < -RADICAND_TOL)) | (report.edge_end_time is None)
        idx = np.flatnonzero(bad)
        i = idx[np.argmin(rad[idx])]
        raise NegativeRadicand(t[i], rad[i], t_range=(t[idx[0]], t[idx[-1]]))

    g = np.array(optimal_coupling(shape, config, t), dtype=float)
    ipeak = int(np.argmax(np.abs(shape.amplitude(t))))
    thresh = SWITCH_OFF_REL * np.max(np.abs(g))
    below = np.flatnonzero(np.abs(g[ipeak:]) < thresh)
    switch_off = None
    if len(below):
        k = ipeak + int(below[0])
        switch_off = float(t[k])
        g[k:] = 0.0
    return CouplingProfile(times=t, g_values=g, switch_off_time=switch_off, validity=report, kappa=config.kappa)


def coherent_coupling(shape, config):
    """Coupling for a coherent input with mean photon number ``config.n_p``.

    The mean-field equations have the same form as the single-photon ones
    and the drive ``sqrt(n_p) * alpha_in`` scales numerator and ``<b>``
    alike, so the profile is the single-photon one.
    """
    return synthesize_profile(shape, config)


def write_profile_csv(profile, path, magnitude=False):
    g = np.abs(profile.g_values) if magnitude else profile.g_values
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "g"])
        for ti, gi in zip(profile.times, g):
            w.writerow([fmt(ti), fmt(gi)])
