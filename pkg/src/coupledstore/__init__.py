"""Reflection-free storage of a propagating pulse in a pair of coupled cavities.

Synthesizes the time-dependent inter-cavity coupling that absorbs a given
input envelope completely into the storage mode, integrates the resulting
dynamics under ideal and perturbed couplings, and sweeps the storage
efficiency against coupling errors.
"""

__version__ = "0.1.0"

from .analytic import AnalyticPopulation, gaussian_population, sech_population
from .coupling import (
    CouplingProfile,
    SystemConfig,
    ValidityReport,
    check_validity,
    coherent_coupling,
    optimal_coupling,
    stored_amplitude,
    synthesize_profile,
)
from .dynamics import (
    ErrorModel,
    Trajectory,
    coherent_expectations,
    conservation_residual,
    efficiency_at_infinity,
    ideal_mode_a_check,
    integrate,
)
from .errors import (
    DegenerateDenominator,
    GridMismatch,
    IntegrationError,
    NegativeRadicand,
    StorageError,
    Unconverged,
)
from .pulse import (
    GaussianPulse,
    SechPulse,
    TabulatedPulse,
    amplitude,
    amplitude_derivative,
    cumulative_energy,
    load_tabulated,
    read_pulse_csv,
)
from .sweep import SweepResult, SweepSpec, run_sweep, summarize
