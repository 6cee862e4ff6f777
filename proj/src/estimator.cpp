#include "metricsig/estimator.hpp"

#include "metricsig/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace metricsig {

namespace {

constexpr double kDistributionSumTolerance = 1e-9;

void require_probability(double value, std::string_view what) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw InvalidInput(std::string(what) + " must be a probability in [0, 1], got " + std::to_string(value));
    }
}

void require_bessel(std::size_t n) {
    if (n < 2) {
        throw InsufficientSamples("at least 2 samples are required, got " + std::to_string(n));
    }
}

}  // namespace

std::string_view to_string(VarianceMethod method) {
    return method == VarianceMethod::deterministic ? "deterministic" : "model_corrected";
}

std::string_view to_string(CenterMode mode) {
    return mode == CenterMode::observed ? "observed" : "corrected";
}

CenterMode parse_center_mode(std::string_view text) {
    if (text == "observed") return CenterMode::observed;
    if (text == "corrected") return CenterMode::corrected;
    throw InvalidInput("unknown center mode '" + std::string(text) + "' (expected observed|corrected)");
}

// ObservationSet

ObservationSet::ObservationSet(std::vector<std::uint8_t> verdicts, std::string label)
    : verdicts_(std::move(verdicts)), label_(std::move(label)) {
    for (std::size_t i = 0; i < verdicts_.size(); ++i) {
        if (verdicts_[i] > 1) {
            throw InvalidInput("verdict at index " + std::to_string(i) + " is " + std::to_string(verdicts_[i]) +
                               ", expected 0 or 1");
        }
        positives_ += verdicts_[i];
    }
}

ObservationSet ObservationSet::from_ints(std::span<const int> verdicts, std::string label) {
    std::vector<std::uint8_t> narrowed;
    narrowed.reserve(verdicts.size());
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        if (verdicts[i] != 0 && verdicts[i] != 1) {
            throw InvalidInput("verdict at index " + std::to_string(i) + " is " + std::to_string(verdicts[i]) +
                               ", expected 0 or 1");
        }
        narrowed.push_back(static_cast<std::uint8_t>(verdicts[i]));
    }
    return ObservationSet(std::move(narrowed), std::move(label));
}

ObservationSet ObservationSet::from_counts(std::size_t n, std::size_t positives, std::string label) {
    if (positives > n) {
        throw InvalidInput("positives (" + std::to_string(positives) + ") exceed sample count (" +
                           std::to_string(n) + ")");
    }
    std::vector<std::uint8_t> verdicts(n, 0);
    std::fill_n(verdicts.begin(), positives, std::uint8_t{1});
    return ObservationSet(std::move(verdicts), std::move(label));
}

// Profiles

MetricModelProfile::MetricModelProfile(double precision, double false_omission_rate)
    : precision_(precision), false_omission_rate_(false_omission_rate) {
    require_probability(precision, "precision");
    require_probability(false_omission_rate, "false_omission_rate");
}

MultiClassProfile::MultiClassProfile(std::vector<std::string> classes, std::vector<double> conditional_positive)
    : classes_(std::move(classes)), conditional_positive_(std::move(conditional_positive)) {
    if (classes_.empty()) {
        throw InvalidInput("multi-class profile needs at least one class");
    }
    if (classes_.size() != conditional_positive_.size()) {
        throw InvalidInput("multi-class profile has " + std::to_string(classes_.size()) + " classes but " +
                           std::to_string(conditional_positive_.size()) + " conditionals");
    }
    std::set<std::string_view> seen;
    for (const auto& c : classes_) {
        if (!seen.insert(c).second) {
            throw InvalidInput("duplicate class identifier '" + c + "'");
        }
    }
    for (double p : conditional_positive_) {
        require_probability(p, "conditional_positive");
    }
}

std::optional<std::size_t> MultiClassProfile::index_of(std::string_view label) const {
    auto it = std::find(classes_.begin(), classes_.end(), label);
    if (it == classes_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - classes_.begin());
}

// SignificanceConfig

SignificanceConfig SignificanceConfig::from_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidInput("alpha must lie in (0, 1), got " + std::to_string(alpha));
    }
    const boost::math::normal standard;
    return {alpha, boost::math::quantile(standard, 1.0 - alpha / 2.0)};
}

SignificanceConfig SignificanceConfig::from_critical_value(double critical_value) {
    if (!(critical_value > 0.0) || !std::isfinite(critical_value)) {
        throw InvalidInput("critical value must be positive, got " + std::to_string(critical_value));
    }
    return {std::erfc(critical_value / std::sqrt(2.0)), critical_value};
}

SignificanceConfig SignificanceConfig::from_pair(double alpha, double critical_value) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidInput("alpha must lie in (0, 1), got " + std::to_string(alpha));
    }
    if (!(critical_value > 0.0) || !std::isfinite(critical_value)) {
        throw InvalidInput("critical value must be positive, got " + std::to_string(critical_value));
    }
    return {alpha, critical_value};
}

SignificanceConfig SignificanceConfig::resolve(std::optional<double> alpha, std::optional<double> critical_value,
                                               std::vector<std::string>& warnings) {
    if (critical_value) {
        if (alpha) {
            warnings.push_back("both alpha and critical value given; using explicit critical value " +
                               std::to_string(*critical_value));
        }
        return from_critical_value(*critical_value);
    }
    if (alpha) return from_alpha(*alpha);
    return {};
}

// Operations

double estimate_mean(const ObservationSet& samples) {
    if (samples.size() == 0) {
        throw InvalidInput("cannot estimate the mean of an empty observation set");
    }
    return static_cast<double>(samples.positives()) / static_cast<double>(samples.size());
}

VarianceEstimate deterministic_variance(const ObservationSet& samples) {
    const std::size_t n = samples.size();
    require_bessel(n);
    const double mean = estimate_mean(samples);
    double sum_sq = 0.0;
    for (std::uint8_t f : samples.verdicts()) {
        const double d = static_cast<double>(f) - mean;
        sum_sq += d * d;
    }
    const double nn = static_cast<double>(n);
    return {sum_sq / (nn * (nn - 1.0)), VarianceMethod::deterministic, n};
}

double true_positive_rate(double observed_rate, const MetricModelProfile& profile) {
    require_probability(observed_rate, "observed rate");
    const double rate =
        profile.precision() * observed_rate + profile.false_omission_rate() * (1.0 - observed_rate);
    return std::clamp(rate, 0.0, 1.0);
}

double true_positive_rate_multiclass(std::span<const double> observed_distribution,
                                     const MultiClassProfile& profile) {
    if (observed_distribution.size() != profile.size()) {
        throw InvalidInput("observed distribution has " + std::to_string(observed_distribution.size()) +
                           " classes, profile has " + std::to_string(profile.size()));
    }
    double total = 0.0;
    for (double p : observed_distribution) {
        require_probability(p, "class probability");
        total += p;
    }
    if (std::abs(total - 1.0) > kDistributionSumTolerance) {
        throw InvalidInput("observed class distribution sums to " + std::to_string(total) + ", expected 1");
    }
    const auto& conditionals = profile.conditional_positive();
    double rate = 0.0;
    for (std::size_t i = 0; i < observed_distribution.size(); ++i) {
        rate += conditionals[i] * observed_distribution[i];
    }
    return std::clamp(rate, 0.0, 1.0);
}

std::vector<double> class_distribution(std::span<const std::string> class_labels,
                                       const MultiClassProfile& profile) {
    if (class_labels.empty()) {
        throw InvalidInput("cannot estimate a class distribution from zero labels");
    }
    std::vector<std::size_t> counts(profile.size(), 0);
    for (const auto& label : class_labels) {
        auto idx = profile.index_of(label);
        if (!idx) {
            throw InvalidInput("class label '" + label + "' is not in the profile");
        }
        ++counts[*idx];
    }
    std::vector<double> dist(counts.size());
    const double n = static_cast<double>(class_labels.size());
    std::transform(counts.begin(), counts.end(), dist.begin(),
                   [n](std::size_t c) { return static_cast<double>(c) / n; });
    return dist;
}

VarianceEstimate model_variance(double observed_rate, const MetricModelProfile& profile, std::size_t n) {
    require_bessel(n);
    return model_variance_from_true_rate(true_positive_rate(observed_rate, profile), n);
}

VarianceEstimate model_variance_from_true_rate(double true_rate, std::size_t n) {
    require_bessel(n);
    require_probability(true_rate, "true rate");
    return {true_rate * (1.0 - true_rate) / (static_cast<double>(n) - 1.0), VarianceMethod::model_corrected, n};
}

ConfidenceInterval confidence_interval(double center, double variance_sum, const SignificanceConfig& config) {
    if (!(variance_sum >= 0.0)) {
        throw InvalidInput("variance must be non-negative, got " + std::to_string(variance_sum));
    }
    const double half_width = config.critical_value() * std::sqrt(variance_sum);
    return {center - half_width, center + half_width, config.level()};
}

bool rejects_null(const ConfidenceInterval& ci) noexcept {
    return ci.lower > 0.0 || ci.upper < 0.0;
}

namespace detail {

ArmSummary summarize_arm(const ObservationSet& samples, double true_rate) {
    ArmSummary arm;
    arm.label = samples.label();
    arm.n = samples.size();
    arm.observed_rate = estimate_mean(samples);
    arm.true_rate = true_rate;
    arm.deterministic = deterministic_variance(samples);
    arm.model = model_variance_from_true_rate(true_rate, samples.size());
    return arm;
}

ComparisonResult finish_comparison(ArmSummary control, ArmSummary treatment, double variance_diff_deterministic,
                                   double variance_diff_model, const SignificanceConfig& config,
                                   CenterMode center_mode) {
    ComparisonResult result;
    result.ate = treatment.observed_rate - control.observed_rate;
    result.model_center =
        center_mode == CenterMode::observed ? result.ate : treatment.true_rate - control.true_rate;
    result.center_mode = center_mode;
    result.variance_diff_deterministic = variance_diff_deterministic;
    result.variance_diff_model = variance_diff_model;
    result.ci_deterministic = confidence_interval(result.ate, variance_diff_deterministic, config);
    result.ci_model = confidence_interval(result.model_center, variance_diff_model, config);
    result.reject_deterministic = rejects_null(result.ci_deterministic);
    result.reject_model = rejects_null(result.ci_model);
    result.control = std::move(control);
    result.treatment = std::move(treatment);
    return result;
}

}  // namespace detail

ComparisonResult compare_independent(const ObservationSet& control, const ObservationSet& treatment,
                                     const MetricModelProfile& profile, const SignificanceConfig& config,
                                     CenterMode center_mode) {
    ArmSummary c = detail::summarize_arm(control, true_positive_rate(estimate_mean(control), profile));
    ArmSummary t = detail::summarize_arm(treatment, true_positive_rate(estimate_mean(treatment), profile));
    const double vd = c.deterministic.value + t.deterministic.value;
    const double vm = c.model.value + t.model.value;
    auto result = detail::finish_comparison(std::move(c), std::move(t), vd, vm, config, center_mode);
    if (profile.pathological()) {
        result.warnings.push_back("metric model precision is below its false omission rate");
    }
    return result;
}

ComparisonResult compare_independent_multiclass(const ObservationSet& control,
                                                std::span<const double> control_distribution,
                                                const ObservationSet& treatment,
                                                std::span<const double> treatment_distribution,
                                                const MultiClassProfile& profile, const SignificanceConfig& config,
                                                CenterMode center_mode) {
    ArmSummary c = detail::summarize_arm(control, true_positive_rate_multiclass(control_distribution, profile));
    ArmSummary t = detail::summarize_arm(treatment, true_positive_rate_multiclass(treatment_distribution, profile));
    const double vd = c.deterministic.value + t.deterministic.value;
    const double vm = c.model.value + t.model.value;
    return detail::finish_comparison(std::move(c), std::move(t), vd, vm, config, center_mode);
}

}  // namespace metricsig
