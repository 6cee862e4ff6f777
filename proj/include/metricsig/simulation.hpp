#pragma once

// Monte Carlo harness for checking the analytic variances and interval
// coverage. Each sample draws the observed verdict O ~ Bernoulli(p^O) first,
// then the true label from R | O=1 ~ Bernoulli(precision) and
// R | O=0 ~ Bernoulli(FOR).

#include "metricsig/estimator.hpp"
#include "metricsig/paired.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace metricsig {

struct SimulationSpec {
    double rate_control = 0.0;
    double rate_treatment = 0.0;
    MetricModelProfile profile = MetricModelProfile::perfect();
    std::size_t n = 2;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    bool paired = false;
    /// Correlation of the observed verdicts; paired mode only.
    double rho = 0.0;
    SignificanceConfig config;
    /// Worker threads for the trial loop. Does not affect the result.
    unsigned threads = 1;

    /// Throws InvalidInput on bad rates, n < 2, trials < 1, or an
    /// unattainable rho.
    void validate() const;
};

/// Aligned observed and true labels for one arm of one trial.
struct ArmDraw {
    ObservationSet observed;
    ObservationSet truth;
};

struct TrialDraw {
    ArmDraw control;
    ArmDraw treatment;
};

struct ArmSimulationStats {
    /// p^R at the population observed rate.
    double expected_true_rate = 0.0;
    double mean_of_true_means = 0.0;
    /// Across-trial sample variance of the per-trial true-label mean; NaN for a single trial.
    double empirical_variance_of_true_mean = 0.0;
    /// p^R (1 - p^R) / (n - 1).
    double analytic_variance = 0.0;
};

struct SimulationReport {
    ArmSimulationStats control;
    ArmSimulationStats treatment;
    /// p^R_T - p^R_C at the population rates; target of both corrected intervals.
    double target_true_ate = 0.0;
    /// p^O_T - p^O_C; target of the naive interval.
    double target_observed_ate = 0.0;
    double ci_coverage_observed_center = 0.0;
    double ci_coverage_corrected_center = 0.0;
    double naive_ci_coverage = 0.0;
    std::size_t trials_used = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

/// Draws one trial. Deterministic in (spec.seed, trial_index).
TrialDraw simulate_trial(const SimulationSpec& spec, std::uint64_t trial_index);

/// Runs spec.trials trials and aggregates variance and coverage statistics.
/// The report is bit-identical for any spec.threads.
SimulationReport validate_variance(const SimulationSpec& spec);

}  // namespace metricsig
