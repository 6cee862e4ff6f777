#pragma once

// Means, variances and confidence intervals for two-system comparisons scored
// by an imperfect binary classifier (the "metric model").
//
// Two variance routes are provided for every arm:
//   deterministic    the sample variance of the observed verdicts,
//                    sum (f_i - mean)^2 / (N (N - 1))
//   model_corrected  the Bessel-corrected binomial variance of the true
//                    positive rate p^R = precision * p^O + FOR * (1 - p^O),
//                    p^R (1 - p^R) / (N - 1)
// With a perfect metric model (precision 1, FOR 0) the two coincide.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace metricsig {

enum class VarianceMethod { deterministic, model_corrected };

/// Where the model-corrected interval is centred. `observed` uses the raw
/// ATE mean(T) - mean(C); `corrected` uses p^R_T - p^R_C.
enum class CenterMode { observed, corrected };

std::string_view to_string(VarianceMethod method);
std::string_view to_string(CenterMode mode);
CenterMode parse_center_mode(std::string_view text);

/// Binary metric-model verdicts for one system.
///
/// Holds any number of 0/1 values; operations enforce their own minimum
/// sample counts (estimate_mean needs 1, the variances need 2).
class ObservationSet {
public:
    ObservationSet() = default;
    explicit ObservationSet(std::vector<std::uint8_t> verdicts, std::string label = {});

    /// Validates each value before narrowing; throws InvalidInput on anything but 0/1.
    static ObservationSet from_ints(std::span<const int> verdicts, std::string label = {});

    /// `positives` ones followed by `n - positives` zeros.
    static ObservationSet from_counts(std::size_t n, std::size_t positives, std::string label = {});

    std::span<const std::uint8_t> verdicts() const noexcept { return verdicts_; }
    const std::string& label() const noexcept { return label_; }
    std::size_t size() const noexcept { return verdicts_.size(); }
    std::size_t positives() const noexcept { return positives_; }

private:
    std::vector<std::uint8_t> verdicts_;
    std::string label_;
    std::size_t positives_ = 0;
};

/// Precision P(R=1|O=1) and false omission rate P(R=1|O=0) of a binary
/// metric model.
class MetricModelProfile {
public:
    MetricModelProfile(double precision, double false_omission_rate);

    static MetricModelProfile perfect() { return {1.0, 0.0}; }

    double precision() const noexcept { return precision_; }
    double false_omission_rate() const noexcept { return false_omission_rate_; }

    /// P(R=1 | O=observed).
    double conditional_positive(int observed) const noexcept {
        return observed != 0 ? precision_ : false_omission_rate_;
    }

    /// A metric model whose positives are less trustworthy than its negatives.
    bool pathological() const noexcept { return precision_ < false_omission_rate_; }

    friend bool operator==(const MetricModelProfile&, const MetricModelProfile&) = default;

private:
    double precision_;
    double false_omission_rate_;
};

/// Per-class conditionals P(R=1 | O=o_i) for a metric model with more than
/// two output classes.
class MultiClassProfile {
public:
    MultiClassProfile(std::vector<std::string> classes, std::vector<double> conditional_positive);

    const std::vector<std::string>& classes() const noexcept { return classes_; }
    const std::vector<double>& conditional_positive() const noexcept { return conditional_positive_; }
    std::size_t size() const noexcept { return classes_.size(); }

    /// Position of `label` in classes(), or nullopt.
    std::optional<std::size_t> index_of(std::string_view label) const;

private:
    std::vector<std::string> classes_;
    std::vector<double> conditional_positive_;
};

/// Significance level and the two-sided critical value z_{alpha/2}.
class SignificanceConfig {
public:
    /// alpha = 0.05 paired with z = 1.96.
    SignificanceConfig() = default;

    /// z from the standard normal quantile 1 - alpha/2.
    static SignificanceConfig from_alpha(double alpha);

    /// Explicit z; alpha is the two-sided tail mass implied by z.
    static SignificanceConfig from_critical_value(double critical_value);

    /// Restores an echoed (alpha, z) pair as-is.
    static SignificanceConfig from_pair(double alpha, double critical_value);

    /// Explicit z wins over alpha when both are given; a warning is appended.
    static SignificanceConfig resolve(std::optional<double> alpha, std::optional<double> critical_value,
                                      std::vector<std::string>& warnings);

    double alpha() const noexcept { return alpha_; }
    double critical_value() const noexcept { return critical_value_; }
    double level() const noexcept { return 1.0 - alpha_; }

private:
    SignificanceConfig(double alpha, double critical_value) : alpha_(alpha), critical_value_(critical_value) {}

    double alpha_ = 0.05;
    double critical_value_ = 1.96;
};

struct VarianceEstimate {
    double value = 0.0;
    VarianceMethod method = VarianceMethod::deterministic;
    std::size_t sample_count = 0;
};

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;

    double center() const noexcept { return 0.5 * (lower + upper); }
    bool contains(double value) const noexcept { return lower <= value && value <= upper; }
};

/// Per-system summary inside a ComparisonResult.
struct ArmSummary {
    std::string label;
    std::size_t n = 0;
    double observed_rate = 0.0;
    double true_rate = 0.0;
    VarianceEstimate deterministic;
    VarianceEstimate model;
};

struct ComparisonResult {
    ArmSummary control;
    ArmSummary treatment;
    /// mean(T) - mean(C).
    double ate = 0.0;
    /// Centre of ci_model; equals `ate` in observed mode.
    double model_center = 0.0;
    double variance_diff_deterministic = 0.0;
    double variance_diff_model = 0.0;
    // Set only for paired comparisons.
    std::optional<double> covariance_deterministic;
    std::optional<double> covariance_model;
    ConfidenceInterval ci_deterministic;
    ConfidenceInterval ci_model;
    bool reject_deterministic = false;
    bool reject_model = false;
    CenterMode center_mode = CenterMode::observed;
    bool paired = false;
    std::vector<std::string> warnings;
};

/// Fraction of positive verdicts. Throws InvalidInput on an empty set.
double estimate_mean(const ObservationSet& samples);

/// sum (f_i - mean)^2 / (N (N - 1)). Throws InsufficientSamples when N < 2.
VarianceEstimate deterministic_variance(const ObservationSet& samples);

/// p^R = precision * p^O + FOR * (1 - p^O).
double true_positive_rate(double observed_rate, const MetricModelProfile& profile);

/// p^R = sum_i P(R=1 | O=o_i) P(O=o_i). `observed_distribution` is indexed
/// like profile.classes() and must sum to 1 within 1e-9.
double true_positive_rate_multiclass(std::span<const double> observed_distribution,
                                     const MultiClassProfile& profile);

/// Empirical class distribution of `class_labels`, ordered like the profile.
std::vector<double> class_distribution(std::span<const std::string> class_labels,
                                       const MultiClassProfile& profile);

/// p^R (1 - p^R) / (n - 1) with p^R from true_positive_rate.
VarianceEstimate model_variance(double observed_rate, const MetricModelProfile& profile, std::size_t n);

/// p (1 - p) / (n - 1) for an already-corrected rate.
VarianceEstimate model_variance_from_true_rate(double true_rate, std::size_t n);

/// (center - z sqrt(v), center + z sqrt(v)).
ConfidenceInterval confidence_interval(double center, double variance_sum, const SignificanceConfig& config);

/// True when the interval excludes zero.
bool rejects_null(const ConfidenceInterval& ci) noexcept;

/// Unpaired comparison of control (C) and treatment (T). Both arms share one
/// metric model profile.
ComparisonResult compare_independent(const ObservationSet& control, const ObservationSet& treatment,
                                     const MetricModelProfile& profile,
                                     const SignificanceConfig& config = {},
                                     CenterMode center_mode = CenterMode::observed);

/// Unpaired comparison where p^R comes from each arm's observed class
/// distribution. The deterministic side and the observed ATE use the binary
/// verdicts.
ComparisonResult compare_independent_multiclass(const ObservationSet& control,
                                                std::span<const double> control_distribution,
                                                const ObservationSet& treatment,
                                                std::span<const double> treatment_distribution,
                                                const MultiClassProfile& profile,
                                                const SignificanceConfig& config = {},
                                                CenterMode center_mode = CenterMode::observed);

namespace detail {

ArmSummary summarize_arm(const ObservationSet& samples, double true_rate);

/// Builds intervals, decisions and centre from two filled-in arms and the
/// variances of the difference. Shared by the unpaired and paired paths.
ComparisonResult finish_comparison(ArmSummary control, ArmSummary treatment, double variance_diff_deterministic,
                                   double variance_diff_model, const SignificanceConfig& config,
                                   CenterMode center_mode);

}  // namespace detail

}  // namespace metricsig
