"""Storage dynamics under an arbitrary (possibly perturbed) coupling.

Equations of motion for the port mode ``c_a`` and storage mode ``c_b``::

    dc_a/dt = g(t) c_b - kappa c_a + sqrt(2 kappa) alpha_in(t)
    dc_b/dt = -g(t) c_a

with output field ``alpha_out = sqrt(2 kappa) c_a - alpha_in``.  The same
pair governs the coherent-state mean fields with the drive scaled by
``sqrt(n_p)``, so coherent results are a rescaling of the single-photon run.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, IntegrationError, Unconverged
from .output import fmt

PLATEAU_FRACTION = 0.05
PLATEAU_TOL = 1e-9

TRAJECTORY_HEADER = ["t", "c_a", "c_b", "pop_b", "alpha_in", "alpha_out", "g_eff"]


@dataclass(frozen=True)
class ErrorModel:
    """Coupling actually applied: ``g0 * g_ideal(t - tau)``."""

    g0: float = 1.0
    tau: float = 0.0

    def __post_init__(self):
        if not self.g0 > 0:
            raise ValueError(f"g0 must be positive, got {self.g0}")
        if not math.isfinite(self.tau):
            raise ValueError(f"tau must be finite, got {self.tau}")

    @property
    def is_ideal(self):
        return self.g0 == 1.0 and self.tau == 0.0


IDEAL = ErrorModel()


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    c_a: np.ndarray
    c_b: np.ndarray
    alpha_in: np.ndarray
    alpha_out: np.ndarray
    g_eff: np.ndarray
    output_energy: np.ndarray  # running int_0^t alpha_out**2
    population_b: np.ndarray
    conservation_residual: float
    efficiency: float
    kappa: float
    errors: ErrorModel

    @property
    def max_alpha_out(self):
        return float(np.max(np.abs(self.alpha_out)))


def _rk4_increments(ya, yb, g1, g2, g4, f1, f2, f4, kappa, h):
    """One classical RK4 step for every grid interval at once.

    ``f*`` are the drive terms ``sqrt(2 kappa) alpha_in`` at the left,
    middle and right of each interval.  Returns the increments and the
    four stage states.
    """
    k1a = g1 * yb - kappa * ya + f1
    k1b = -g1 * ya
    ya2, yb2 = ya + 0.5 * h * k1a, yb + 0.5 * h * k1b
    k2a = g2 * yb2 - kappa * ya2 + f2
    k2b = -g2 * ya2
    ya3, yb3 = ya + 0.5 * h * k2a, yb + 0.5 * h * k2b
    k3a = g2 * yb3 - kappa * ya3 + f2
    k3b = -g2 * ya3
    ya4, yb4 = ya + h * k3a, yb + h * k3b
    k4a = g4 * yb4 - kappa * ya4 + f4
    k4b = -g4 * ya4
    da = h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
    db = h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
    return da, db, (ya, ya2, ya3, ya4)


def integrate(shape, config, profile, errors=IDEAL):
    """Fixed-step RK4 from vacuum, ``c_a(0) = c_b(0) = 0``.

    The applied coupling is ``errors.g0 * profile.at(t - errors.tau)``,
    zero wherever the shifted time leaves the profile.  The running output
    energy is carried as a third RK4 component so that the conservation
    residual reflects integration error only.
    """
    t = config.times
    if profile.times.shape != t.shape or not np.array_equal(profile.times, t):
        raise GridMismatch(
            f"profile grid ({len(profile.times)} points, dt={profile.times[1] - profile.times[0]:.6g}) "
            f"does not match config grid ({len(t)} points, dt={config.dt:.6g})"
        )
    if not abs(errors.tau) < t[-1]:
        raise ValueError(f"|tau|={abs(errors.tau)} must be below t_end={t[-1]}")
    if profile.kappa != config.kappa:
        raise GridMismatch(f"profile synthesized for kappa={profile.kappa}, config has {config.kappa}")

    kappa, h = config.kappa, config.dt
    s = math.sqrt(2.0 * kappa)
    tm = t[:-1] + 0.5 * h
    if errors.tau == 0.0:
        g_nodes = errors.g0 * profile.g_values
    else:
        g_nodes = errors.g0 * profile.at(t - errors.tau)
    g_mid = errors.g0 * profile.at(tm - errors.tau)
    g1, g4 = g_nodes[:-1], g_nodes[1:]

    a_nodes = shape.amplitude(t)
    a_mid = shape.amplitude(tm)
    f1, f2, f4 = s * a_nodes[:-1], s * a_mid, s * a_nodes[1:]

    one, zero = np.ones_like(tm), np.zeros_like(tm)
    # overflow is reported below as IntegrationError, not as numpy warnings
    with np.errstate(over="ignore", invalid="ignore"):
        d00, d10, _ = _rk4_increments(one, zero, g1, g_mid, g4, zero, zero, zero, kappa, h)
        d01, d11, _ = _rk4_increments(zero, one, g1, g_mid, g4, zero, zero, zero, kappa, h)
        b0, b1, _ = _rk4_increments(zero, zero, g1, g_mid, g4, f1, f2, f4, kappa, h)

    d00, d01, d10, d11, b0, b1 = (x.tolist() for x in (d00, d01, d10, d11, b0, b1))
    ca_list, cb_list = [0.0], [0.0]
    ca = cb = 0.0
    for i in range(len(tm)):
        ca, cb = (
            ca + (d00[i] * ca + d01[i] * cb + b0[i]),
            cb + (d10[i] * ca + d11[i] * cb + b1[i]),
        )
        ca_list.append(ca)
        cb_list.append(cb)
    c_a = np.array(ca_list)
    c_b = np.array(cb_list)

    finite = np.isfinite(c_a) & np.isfinite(c_b)
    if not finite.all():
        raise IntegrationError(t[np.argmin(finite)])

    # re-evaluate the stages on the actual states for the output energy
    _, _, stages = _rk4_increments(c_a[:-1], c_b[:-1], g1, g_mid, g4, f1, f2, f4, kappa, h)
    a_stage = (a_nodes[:-1], a_mid, a_mid, a_nodes[1:])
    o1, o2, o3, o4 = ((s * y - a) ** 2 for y, a in zip(stages, a_stage))
    output_energy = np.concatenate(([0.0], np.cumsum(h / 6.0 * (o1 + 2.0 * o2 + 2.0 * o3 + o4))))

    population = c_b**2
    residual = float(np.max(np.abs(c_a**2 + population + output_energy - shape.energy(t))))
    return Trajectory(
        times=t,
        c_a=c_a,
        c_b=c_b,
        alpha_in=a_nodes,
        alpha_out=s * c_a - a_nodes,
        g_eff=g_nodes,
        output_energy=output_energy,
        population_b=population,
        conservation_residual=residual,
        efficiency=float(population[-1]),
        kappa=kappa,
        errors=errors,
    )


def plateau_drift(trajectory):
    """Peak-to-peak population change over the last 5% of the grid."""
    pop = trajectory.population_b
    start = int(math.floor((1.0 - PLATEAU_FRACTION) * (len(pop) - 1)))
    return float(np.ptp(pop[start:]))


def efficiency_at_infinity(trajectory):
    """Final storage-mode population, provided it has stopped changing."""
    drift = plateau_drift(trajectory)
    if drift > PLATEAU_TOL:
        raise Unconverged(drift)
    return float(trajectory.population_b[-1])


def conservation_residual(trajectory, shape):
    """Largest defect of ``|c_a|^2 + |c_b|^2 + int alpha_out^2 = int alpha_in^2``."""
    t = trajectory.times
    lhs = trajectory.c_a**2 + trajectory.c_b**2 + trajectory.output_energy
    return float(np.max(np.abs(lhs - shape.energy(t))))


def ideal_mode_a_check(trajectory, shape, config):
    """Largest departure of ``c_a`` from ``alpha_in / sqrt(2 kappa)``."""
    target = shape.amplitude(trajectory.times) / math.sqrt(2.0 * config.kappa)
    return float(np.max(np.abs(trajectory.c_a - target)))


def coherent_expectations(trajectory, n_p):
    """Mean storage-mode photon number for a coherent drive of ``n_p`` photons."""
    if not n_p > 0:
        raise ValueError(f"n_p must be positive, got {n_p}")
    return n_p * trajectory.population_b


def trajectory_summary(trajectory, n_p=1.0):
    drift = plateau_drift(trajectory)
    return {
        "efficiency": trajectory.efficiency,
        "max_alpha_out": trajectory.max_alpha_out,
        "conservation_residual": trajectory.conservation_residual,
        "plateau_ok": bool(drift <= PLATEAU_TOL),
        "plateau_drift": drift,
        "n_p": float(n_p),
        "mean_photon_number": float(n_p * trajectory.population_b[-1]),
        "g0": trajectory.errors.g0,
        "tau": trajectory.errors.tau,
        "kappa": trajectory.kappa,
        "t_end": float(trajectory.times[-1]),
    }


def write_trajectory_csv(trajectory, path, oracle=None):
    """CSV with the documented header; ``oracle`` adds a ``pop_oracle`` column."""
    cols = [
        trajectory.times,
        trajectory.c_a,
        trajectory.c_b,
        trajectory.population_b,
        trajectory.alpha_in,
        trajectory.alpha_out,
        trajectory.g_eff,
    ]
    header = list(TRAJECTORY_HEADER)
    if oracle is not None:
        header.append("pop_oracle")
        cols.append(np.asarray(oracle, dtype=float))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([fmt(x) for x in row])
