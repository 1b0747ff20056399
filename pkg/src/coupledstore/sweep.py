"""Single-axis sweeps of the coupling error model."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .coupling import synthesize_profile
from .dynamics import PLATEAU_TOL, ErrorModel, integrate, plateau_drift
from .output import fmt

AMPLITUDE = "amplitude"
DELAY = "delay"
ROBUST_EFFICIENCY = 0.9999
MONOTONE_TOL = 1e-12

SWEEP_HEADER = ["axis_value", "efficiency", "residual", "plateau_ok"]


@dataclass(frozen=True)
class SweepSpec:
    """``values`` are g0 factors (amplitude axis) or tau / t_p (delay axis)."""

    shape: object
    config: object
    axis: str
    values: tuple
    n_p: float = 1.0

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if self.axis not in (AMPLITUDE, DELAY):
            raise ValueError(f"axis must be {AMPLITUDE!r} or {DELAY!r}, got {self.axis!r}")
        if not vals:
            raise ValueError("sweep needs at least one value")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("sweep values must be finite")
        if self.axis == AMPLITUDE and min(vals) <= 0:
            raise ValueError("amplitude factors must be positive")
        if self.axis == DELAY and max(abs(v) for v in vals) > 0.5:
            raise ValueError("delay fractions must lie in [-0.5, 0.5]")
        if not self.n_p > 0:
            raise ValueError("n_p must be positive")

    def error_model(self, value):
        if self.axis == AMPLITUDE:
            return ErrorModel(g0=value)
        return ErrorModel(tau=value * self.shape.duration)

    def grid_config(self):
        """Base config, lengthened by the largest delay so every run can settle."""
        if self.axis == AMPLITUDE:
            return self.config
        extra = max(abs(v) for v in self.values) * self.shape.duration
        return replace(self.config, t_end=self.config.t_end + extra)


@dataclass(frozen=True)
class SweepResult:
    axis: str
    values: tuple
    efficiencies: tuple
    residuals: tuple
    plateau_flags: tuple
    n_p: float = 1.0

    @property
    def mean_photon_numbers(self):
        return tuple(self.n_p * e for e in self.efficiencies)


_worker_state = None


def _init_worker(shape, config, profile):
    global _worker_state
    _worker_state = (shape, config, profile)


def _point(shape, config, profile, errors):
    traj = integrate(shape, config, profile, errors)
    return traj.efficiency, traj.conservation_residual, plateau_drift(traj) <= PLATEAU_TOL


def _worker_point(errors):
    return _point(*_worker_state, errors)


def run_sweep(spec, jobs=1):
    """Perturb one synthesized ideal profile along ``spec.axis``.

    Results come back in axis order whatever ``jobs`` is; each point is an
    independent deterministic integration.  A failing point re-raises with
    ``exc.axis_value`` set.
    """
    config = spec.grid_config()
    profile = synthesize_profile(spec.shape, config)
    models = [spec.error_model(v) for v in spec.values]

    if jobs <= 1 or len(models) == 1:
        outcomes = []
        for v, em in zip(spec.values, models):
            try:
                outcomes.append(_point(spec.shape, config, profile, em))
            except Exception as exc:
                exc.axis_value = v
                raise
    else:
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_init_worker, initargs=(spec.shape, config, profile)
        ) as pool:
            futures = [pool.submit(_worker_point, em) for em in models]
            outcomes = []
            for v, fut in zip(spec.values, futures):
                try:
                    outcomes.append(fut.result())
                except Exception as exc:
                    exc.axis_value = v
                    raise

    eff, res, flags = zip(*outcomes)
    return SweepResult(
        axis=spec.axis,
        values=spec.values,
        efficiencies=tuple(float(e) for e in eff),
        residuals=tuple(float(r) for r in res),
        plateau_flags=tuple(bool(f) for f in flags),
        n_p=spec.n_p,
    )


def _side_profile(values, eff, ideal, side):
    """(distance, efficiency) pairs on one side of the ideal point, nearest first."""
    d = (values - ideal) * side
    keep = d >= 0
    order = np.argsort(d[keep], kind="stable")
    return d[keep][order], eff[keep][order]


def summarize(result, threshold=ROBUST_EFFICIENCY):
    """Reduce a sweep to its extremes, robustness radii and the monotonicity check.

    The radius on each side is the largest distance from the ideal value
    up to which every sampled point keeps efficiency >= ``threshold``.
    """
    values = np.asarray(result.values, dtype=float)
    eff = np.asarray(result.efficiencies, dtype=float)
    ideal = 1.0 if result.axis == AMPLITUDE else 0.0

    radii = {}
    monotone = True
    for name, side in (("below", -1.0), ("above", 1.0)):
        dist, e = _side_profile(values, eff, ideal, side)
        if np.any(np.diff(e) > MONOTONE_TOL):
            monotone = False
        ok = e >= threshold
        n_ok = len(ok) if ok.all() else int(np.argmin(ok))
        radii[name] = float(dist[n_ok - 1]) + 0.0 if n_ok else None  # + 0.0 drops a -0.0

    robust = values[eff >= threshold]
    at_ideal = np.isclose(values, ideal, rtol=0.0, atol=1e-15)
    return {
        "axis": result.axis,
        "n_points": len(values),
        "min_efficiency": float(eff.min()),
        "max_efficiency": float(eff.max()),
        "worst_value": float(values[np.argmin(eff)]),
        "robust_threshold": threshold,
        "robust_max_value": float(robust.max()) if len(robust) else None,
        "radius_below": radii["below"],
        "radius_above": radii["above"],
        "monotone_ok": bool(monotone),
        "ideal_is_max": bool(at_ideal.any() and eff[at_ideal].max() >= eff.max()),
        "max_residual": float(max(result.residuals)),
        "all_plateau_ok": bool(all(result.plateau_flags)),
    }


def write_sweep_csv(result, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for v, e, r, f in zip(result.values, result.efficiencies, result.residuals, result.plateau_flags):
            w.writerow([fmt(v), fmt(e), fmt(r), "true" if f else "false"])
