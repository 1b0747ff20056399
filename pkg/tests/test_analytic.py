import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coupledstore.analytic import AnalyticPopulation, gaussian_population, sech_population
from coupledstore.coupling import radicand
from coupledstore.pulse import GaussianPulse, SechPulse, load_tabulated

from .conftest import KAPPA_20

# mpmath, 40 digits
GAUSS_AT_PEAK = 0.466785876485833269
SECH_AT_PEAK = 0.474954602131297566


def test_gaussian_at_peak():
    assert gaussian_population(5.0, 1.0, KAPPA_20, 5.0) == pytest.approx(GAUSS_AT_PEAK, abs=1e-13)


def test_sech_at_peak():
    assert sech_population(5.0, 1.0, 10.0, 5.0) == pytest.approx(SECH_AT_PEAK, abs=1e-13)


def test_late_time_limits():
    # the deficit is the pre-record pulse energy, just under the exponential
    T, eta = 5.0, 1.0
    assert gaussian_population(T, eta, KAPPA_20, 1e3) == pytest.approx(1.0, abs=2 * math.exp(-(T**2) / eta**2))
    T, beta = 10.0, 1.0
    assert sech_population(T, beta, 10.0, 1e3) == pytest.approx(1.0, abs=2 * math.exp(-2 * T / beta))


def test_broad_linewidth_limit():
    assert gaussian_population(2.0, 1.0, 1e15, 2.0) == pytest.approx(0.5 * math.erf(2.0), abs=1e-14)
    assert sech_population(2.0, 1.0, 1e15, 2.0) == pytest.approx(0.5 * math.tanh(2.0), abs=1e-14)


@settings(max_examples=60, deadline=None)
@given(
    T=st.floats(4.0, 8.0),
    eta=st.floats(0.2, 5.0),
    kappa=st.floats(0.5, 50.0),
    frac=st.floats(0.0, 3.0),
)
def test_gaussian_formula_matches_radicand(T, eta, kappa, frac):
    shape = GaussianPulse(T=T, eta=eta)
    t = frac * T
    assert gaussian_population(T, eta, kappa, t) == pytest.approx(float(radicand(shape, kappa, t)), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    T=st.floats(5.0, 12.0),
    beta=st.floats(0.2, 5.0),
    kappa=st.floats(0.5, 50.0),
    frac=st.floats(0.0, 3.0),
)
def test_sech_formula_matches_radicand(T, beta, kappa, frac):
    shape = SechPulse(T=T, beta=beta)
    t = frac * T
    assert sech_population(T, beta, kappa, t) == pytest.approx(float(radicand(shape, kappa, t)), abs=1e-12)


def test_gaussian_oracle_equivalence(gauss20, gauss20_ideal):
    shape, config, _ = gauss20
    oracle = AnalyticPopulation.for_shape(shape, config.kappa)(config.times)
    assert np.max(np.abs(gauss20_ideal.population_b - oracle)) < 1e-6


def test_sech_oracle_equivalence(sech10, sech10_ideal):
    shape, config, _ = sech10
    assert config.kappa * shape.beta == pytest.approx(10.0)
    oracle = AnalyticPopulation.for_shape(shape, config.kappa)(config.times)
    assert np.max(np.abs(sech10_ideal.population_b - oracle)) < 1e-6


def test_analytic_population_dispatch():
    g = AnalyticPopulation.for_shape(GaussianPulse(T=5.0, eta=1.0), KAPPA_20)
    assert g.kind == "gaussian" and g(5.0) == pytest.approx(GAUSS_AT_PEAK, abs=1e-13)
    s = AnalyticPopulation.for_shape(SechPulse(T=5.0, beta=1.0), 10.0)
    assert s.kind == "sech" and s(5.0) == pytest.approx(SECH_AT_PEAK, abs=1e-13)
    t = np.linspace(0, 15, 16)
    tab = load_tabulated(list(zip(t, GaussianPulse(T=7.5, eta=1.0).amplitude(t))), edge_threshold=1e-3)
    with pytest.raises(TypeError):
        AnalyticPopulation.for_shape(tab, 1.0)
    with pytest.raises(ValueError):
        AnalyticPopulation("lorentzian", 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        AnalyticPopulation("gaussian", 1.0, 1.0, 0.0)
