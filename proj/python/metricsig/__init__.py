"""Confidence intervals for two-system comparisons scored by an imperfect classifier."""

from ._metricsig import (
    AmbiguousInputError,
    ArmSimulationStats,
    ArmSummary,
    ComparisonResult,
    ConfidenceInterval,
    InsufficientSamplesError,
    InvalidInputError,
    JointDistribution,
    MetricModelProfile,
    MetricsigError,
    MultiClassProfile,
    ParseError,
    SignificanceConfig,
    SimulationReport,
    SimulationSpec,
    VarianceEstimate,
    __version__,
    compare_independent,
    compare_paired,
    confidence_interval,
    deterministic_variance,
    estimate_joint,
    estimate_mean,
    model_covariance,
    model_variance,
    run_cli,
    simulate_trial,
    true_positive_rate,
    true_positive_rate_multiclass,
    validate_variance,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
