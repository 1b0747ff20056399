import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.integrate import quad

from coupledstore.coupling import CouplingProfile, SystemConfig, synthesize_profile
from coupledstore.dynamics import (
    ErrorModel,
    coherent_expectations,
    conservation_residual,
    efficiency_at_infinity,
    ideal_mode_a_check,
    integrate,
    plateau_drift,
    trajectory_summary,
    write_trajectory_csv,
    TRAJECTORY_HEADER,
)
from coupledstore.errors import GridMismatch, IntegrationError, Unconverged
from coupledstore.pulse import GaussianPulse

from .conftest import KAPPA_20, run_with

# mpmath: pi**-0.25 / sqrt(2 * KAPPA_20)
CA_AT_PEAK = 0.182247423886863216


@pytest.fixture(scope="module")
def uncoupled(gauss20):
    shape, config, profile = gauss20
    zero = CouplingProfile(config.times, np.zeros_like(config.times), None, profile.validity, config.kappa)
    return integrate(shape, config, zero)


def test_ideal_run(gauss20_ideal):
    traj = gauss20_ideal
    assert traj.efficiency >= 1 - 1e-6
    assert traj.max_alpha_out <= 1e-6
    assert efficiency_at_infinity(traj) == pytest.approx(1.0, abs=1e-6)
    assert traj.c_a[0] == 0.0 and traj.c_b[0] == 0.0


def test_uncoupled_run(gauss20, uncoupled):
    shape, config, _ = gauss20
    assert np.all(uncoupled.c_b == 0.0)
    assert uncoupled.efficiency == 0.0
    # driven, damped single cavity: c_a(t) = int_0^t exp(-kappa (t-s)) sqrt(2 kappa) alpha(s) ds
    k = config.kappa
    for i in (len(config.times) // 4, len(config.times) // 2, 3 * len(config.times) // 4):
        t = config.times[i]
        ref, _ = quad(lambda s: math.exp(-k * (t - s)) * math.sqrt(2 * k) * shape.amplitude(s), 0.0, t,
                      points=[shape.T], limit=200, epsabs=1e-14)
        assert uncoupled.c_a[i] == pytest.approx(ref, abs=1e-10)
    assert conservation_residual(uncoupled, shape) < 1e-8


def test_amplitude_error_run(gauss20):
    assert run_with(gauss20, g0=1.2).efficiency == pytest.approx(0.96, abs=0.02)


def test_delay_error_run(gauss20_delayed):
    traj = run_with(gauss20_delayed, tau_frac=0.2)
    assert efficiency_at_infinity(traj) == pytest.approx(0.90, abs=0.03)


def test_unconverged_inside_pulse():
    shape = GaussianPulse.from_duration(20.0)
    config = SystemConfig(kappa=1.0, t_end=shape.T, dt=1e-3)
    traj = integrate(shape, config, synthesize_profile(shape, config))
    with pytest.raises(Unconverged) as info:
        efficiency_at_infinity(traj)
    assert info.value.drift > 1e-9


def test_conservation(gauss20, gauss20_ideal):
    shape, _, _ = gauss20
    traj = gauss20_ideal
    assert conservation_residual(traj, shape) < 1e-8
    assert traj.conservation_residual == conservation_residual(traj, shape)
    lhs0 = traj.c_a[0] ** 2 + traj.c_b[0] ** 2 + traj.output_energy[0]
    assert lhs0 - shape.energy(0.0) == 0.0


def test_ideal_mode_a(gauss20, gauss20_ideal):
    shape, config, _ = gauss20
    assert ideal_mode_a_check(gauss20_ideal, shape, config) < 1e-6
    assert ideal_mode_a_check(run_with(gauss20, g0=1.2), shape, config) > 1e-3


def test_mode_a_at_peak():
    shape = GaussianPulse(T=5.0, eta=1.0)
    config = SystemConfig(kappa=KAPPA_20, t_end=shape.default_t_end, dt=1e-3 / KAPPA_20)
    traj = integrate(shape, config, synthesize_profile(shape, config))
    i = int(np.argmin(np.abs(config.times - shape.T)))
    assert traj.c_a[i] == pytest.approx(CA_AT_PEAK, abs=1e-6)


def test_coherent_sech(sech10_ideal):
    assert coherent_expectations(sech10_ideal, 5.0)[-1] == pytest.approx(5.0, abs=5e-6)
    np.testing.assert_array_equal(coherent_expectations(sech10_ideal, 1.0), sech10_ideal.population_b)


def test_coherent_delayed(gauss20_delayed):
    traj = run_with(gauss20_delayed, tau_frac=0.2)
    assert coherent_expectations(traj, 5.0)[-1] == pytest.approx(4.5, abs=0.15)


@pytest.mark.parametrize("n_p", [0.5, 3.0, 5.0, 17.25])
def test_coherent_scale_bitwise(gauss20_ideal, n_p):
    np.testing.assert_array_equal(
        coherent_expectations(gauss20_ideal, n_p), n_p * coherent_expectations(gauss20_ideal, 1.0)
    )


def test_coherent_rejects_bad_photon_number(gauss20_ideal):
    with pytest.raises(ValueError):
        coherent_expectations(gauss20_ideal, 0.0)


def test_monotone_amplitude_response(gauss20):
    eff = [run_with(gauss20, g0=g).efficiency for g in np.linspace(1.0, 1.2, 21)]
    assert np.all(np.diff(eff) <= 1e-12)


def test_monotone_delay_response(gauss20_delayed):
    eff = [run_with(gauss20_delayed, tau_frac=f).efficiency for f in np.linspace(0.0, 0.2, 21)]
    assert np.all(np.diff(eff) <= 1e-12)


@pytest.mark.parametrize("g0,tau_frac", [(1.0, 0.0), (0.8, 0.0), (1.2, 0.0), (1.0, -0.2), (1.0, 0.2)])
def test_population_bounds_and_plateau(gauss20_delayed, g0, tau_frac):
    traj = run_with(gauss20_delayed, g0=g0, tau_frac=tau_frac)
    assert traj.population_b.min() >= 0.0
    assert traj.population_b.max() <= 1 + 1e-9
    assert 0.0 <= traj.efficiency <= 1 + 1e-9
    assert traj.conservation_residual < 1e-8
    assert plateau_drift(traj) <= 1e-9


def test_population_constant_after_switch_off(gauss20, gauss20_ideal):
    _, config, profile = gauss20
    after = config.times >= profile.switch_off_time
    assert np.ptp(gauss20_ideal.population_b[after]) <= 1e-9


def test_grid_mismatch(gauss20):
    shape, config, profile = gauss20
    with pytest.raises(GridMismatch):
        integrate(shape, replace(config, dt=2e-3), profile)
    with pytest.raises(GridMismatch):
        integrate(shape, replace(config, kappa=1.5), profile)


def test_delay_must_stay_inside_horizon(gauss20):
    shape, config, profile = gauss20
    with pytest.raises(ValueError):
        integrate(shape, config, profile, ErrorModel(tau=config.times[-1]))


def test_non_finite_state_reports_time(gauss20):
    shape, config, profile = gauss20
    with pytest.raises(IntegrationError) as info:
        integrate(shape, config, profile, ErrorModel(g0=1e250))
    assert 0.0 < info.value.t <= config.times[-1]


@pytest.mark.parametrize("g0,tau", [(0.0, 0.0), (-1.0, 0.0), (1.0, math.inf), (1.0, math.nan)])
def test_error_model_rejects(g0, tau):
    with pytest.raises(ValueError):
        ErrorModel(g0=g0, tau=tau)


def test_error_model_ideal_flag():
    assert ErrorModel().is_ideal
    assert not ErrorModel(g0=1.1).is_ideal
    assert not ErrorModel(tau=-0.5).is_ideal


def test_trajectory_export(tmp_path, gauss20, gauss20_ideal):
    path = tmp_path / "traj.csv"
    write_trajectory_csv(gauss20_ideal, path)
    with open(path, encoding="utf-8") as fh:
        assert fh.readline().strip() == ",".join(TRAJECTORY_HEADER)
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data.shape == (len(gauss20_ideal.times), len(TRAJECTORY_HEADER))
    np.testing.assert_allclose(data[:, 3], gauss20_ideal.population_b, rtol=1e-11, atol=1e-300)
    s = trajectory_summary(gauss20_ideal, n_p=2.0)
    assert s["plateau_ok"] and s["mean_photon_number"] == 2.0 * gauss20_ideal.efficiency
