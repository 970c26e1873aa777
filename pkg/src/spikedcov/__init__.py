"""spikedcov: limiting eigenvalues of spiked sample covariance matrices.

Closed-form predictions for the ordered sample eigenvalues of spiked
population models, finite-n spectral support analysis via the inverse
Stieltjes transform, the Marchenko-Pastur null law, and Monte Carlo
verification utilities with a reporting CLI.
"""

from .config import ExperimentConfig
from .limits import PredictionEntry, PredictionReport, predict, spike_limit
from .model import (
    BULK_EDGE,
    EntryDistribution,
    Regime,
    SpikeClassification,
    SpikedModel,
    SpikeSpec,
    ValidationResult,
    classify,
    parse_spike,
    validate,
)
from .mplaw import MPLaw, companion_law_convert, mp_cdf, mp_density, mp_edges
from .simulate import (
    EigenSample,
    EigensolverError,
    MonteCarloSummary,
    SeparationCheck,
    eigenvalues_given_entries,
    histogram,
    monte_carlo,
    sample_eigenvalues,
    separation_check,
)
from .support import (
    AsymptoticRoots,
    CriticalPoints,
    DegenerateModelError,
    InconsistentSupportError,
    NearDegeneracyWarning,
    PoleEvaluationError,
    RootIsolationError,
    SupportReport,
    asymptotic_roots,
    critical_points,
    invert_on_interval,
    numerator_polynomial,
    spike_gap_edges,
    support_complement,
    z_p,
    z_p_prime,
)

__version__ = "0.1.0"

__all__ = [
    "BULK_EDGE",
    "AsymptoticRoots",
    "CriticalPoints",
    "DegenerateModelError",
    "EigenSample",
    "EigensolverError",
    "EntryDistribution",
    "ExperimentConfig",
    "InconsistentSupportError",
    "MPLaw",
    "MonteCarloSummary",
    "NearDegeneracyWarning",
    "PoleEvaluationError",
    "PredictionEntry",
    "PredictionReport",
    "Regime",
    "RootIsolationError",
    "SeparationCheck",
    "SpikeClassification",
    "SpikeSpec",
    "SpikedModel",
    "SupportReport",
    "ValidationResult",
    "asymptotic_roots",
    "classify",
    "companion_law_convert",
    "critical_points",
    "eigenvalues_given_entries",
    "histogram",
    "invert_on_interval",
    "monte_carlo",
    "mp_cdf",
    "mp_density",
    "mp_edges",
    "numerator_polynomial",
    "parse_spike",
    "predict",
    "sample_eigenvalues",
    "separation_check",
    "spike_gap_edges",
    "spike_limit",
    "support_complement",
    "validate",
    "z_p",
    "z_p_prime",
]
