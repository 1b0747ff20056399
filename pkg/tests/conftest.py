import math

import pytest

from coupledstore.coupling import SystemConfig, synthesize_profile
from coupledstore.dynamics import ErrorModel, integrate
from coupledstore.pulse import FWHM_PER_ETA, GaussianPulse, SechPulse

# eta = 1 units used by the worked examples: kappa * t_p = 20
KAPPA_20 = 20.0 / FWHM_PER_ETA


@pytest.fixture(scope="session")
def gauss20():
    """Default Gaussian run: kappa = 1, kappa*t_p = 20, T = 5 eta."""
    shape = GaussianPulse.from_duration(20.0)
    config = SystemConfig.for_shape(shape)
    profile = synthesize_profile(shape, config)
    return shape, config, profile


@pytest.fixture(scope="session")
def gauss20_ideal(gauss20):
    shape, config, profile = gauss20
    return integrate(shape, config, profile)


@pytest.fixture(scope="session")
def sech10():
    """kappa*beta = 10, T = 10 beta."""
    shape = SechPulse(T=100.0, beta=10.0)
    config = SystemConfig.for_shape(shape)
    profile = synthesize_profile(shape, config)
    return shape, config, profile


@pytest.fixture(scope="session")
def sech10_ideal(sech10):
    return integrate(*sech10)


@pytest.fixture(scope="session")
def gauss20_delayed():
    """Config covering a 20% t_p delay, shared by the perturbed runs."""
    shape = GaussianPulse.from_duration(20.0)
    config = SystemConfig.for_shape(shape, extend=0.2 * shape.duration)
    profile = synthesize_profile(shape, config)
    return shape, config, profile


def run_with(setup, g0=1.0, tau_frac=0.0):
    shape, config, profile = setup
    return integrate(shape, config, profile, ErrorModel(g0=g0, tau=tau_frac * shape.duration))


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
