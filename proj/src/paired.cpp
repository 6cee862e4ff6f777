#include "metricsig/paired.hpp"

#include "metricsig/errors.hpp"

#include <cmath>

namespace metricsig {

namespace {

constexpr double kJointSumTolerance = 1e-9;

// Composed variances within this fraction of the summed arm variances below
// zero are rounding noise and are zeroed without a warning.
constexpr double kRoundingFloor = 1e-9;

double clamp_difference_variance(double value, double scale, std::string_view which,
                                 std::vector<std::string>& warnings) {
    if (value >= 0.0) return value;
    if (value < -kRoundingFloor * scale) {
        warnings.push_back(std::string(which) + " variance of the difference was negative (" +
                           std::to_string(value) + "); clamped to 0");
    }
    return 0.0;
}

}  // namespace

JointObservationSet::JointObservationSet(std::vector<Pair> pairs) : pairs_(std::move(pairs)) {
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        if (pairs_[i].first > 1 || pairs_[i].second > 1) {
            throw InvalidInput("pair at index " + std::to_string(i) + " is (" + std::to_string(pairs_[i].first) +
                               ", " + std::to_string(pairs_[i].second) + "), expected verdicts in {0, 1}");
        }
    }
}

JointObservationSet JointObservationSet::from_counts(const std::array<std::array<std::size_t, 2>, 2>& counts) {
    std::vector<Pair> pairs;
    for (std::uint8_t x = 0; x < 2; ++x) {
        for (std::uint8_t y = 0; y < 2; ++y) {
            pairs.insert(pairs.end(), counts[x][y], Pair{x, y});
        }
    }
    return JointObservationSet(std::move(pairs));
}

ObservationSet JointObservationSet::control(std::string label) const {
    std::vector<std::uint8_t> v;
    v.reserve(pairs_.size());
    for (const auto& [c, t] : pairs_) v.push_back(c);
    return ObservationSet(std::move(v), std::move(label));
}

ObservationSet JointObservationSet::treatment(std::string label) const {
    std::vector<std::uint8_t> v;
    v.reserve(pairs_.size());
    for (const auto& [c, t] : pairs_) v.push_back(t);
    return ObservationSet(std::move(v), std::move(label));
}

std::array<std::array<std::size_t, 2>, 2> JointObservationSet::counts() const {
    std::array<std::array<std::size_t, 2>, 2> counts{};
    for (const auto& [c, t] : pairs_) ++counts[c][t];
    return counts;
}

void JointDistribution::validate() const {
    double total = 0.0;
    for (const auto& row : p) {
        for (double cell : row) {
            if (!(cell >= 0.0)) {
                throw InvalidInput("joint distribution has a negative cell (" + std::to_string(cell) + ")");
            }
            total += cell;
        }
    }
    if (std::abs(total - 1.0) > kJointSumTolerance) {
        throw InvalidInput("joint distribution sums to " + std::to_string(total) + ", expected 1");
    }
}

JointDistribution JointDistribution::from_correlation(double control_rate, double treatment_rate, double rho) {
    if (!(control_rate >= 0.0 && control_rate <= 1.0) || !(treatment_rate >= 0.0 && treatment_rate <= 1.0)) {
        throw InvalidInput("rates must lie in [0, 1]");
    }
    if (!(rho >= -1.0 && rho <= 1.0)) {
        throw InvalidInput("correlation must lie in [-1, 1], got " + std::to_string(rho));
    }
    const double spread =
        std::sqrt(control_rate * (1.0 - control_rate) * treatment_rate * (1.0 - treatment_rate));
    const double p11 = control_rate * treatment_rate + rho * spread;
    JointDistribution joint;
    joint.p[1][1] = p11;
    joint.p[1][0] = control_rate - p11;
    joint.p[0][1] = treatment_rate - p11;
    joint.p[0][0] = 1.0 - control_rate - treatment_rate + p11;
    for (const auto& row : joint.p) {
        for (double cell : row) {
            if (cell < 0.0) {
                throw InvalidInput("correlation " + std::to_string(rho) + " is not attainable for rates " +
                                   std::to_string(control_rate) + " and " + std::to_string(treatment_rate) +
                                   " (a joint cell would be negative)");
            }
        }
    }
    return joint;
}

JointDistribution estimate_joint(const JointObservationSet& pairs) {
    if (pairs.size() < 2) {
        throw InsufficientSamples("at least 2 pairs are required, got " + std::to_string(pairs.size()));
    }
    const auto counts = pairs.counts();
    const double n = static_cast<double>(pairs.size());
    JointDistribution joint;
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            joint.p[x][y] = static_cast<double>(counts[x][y]) / n;
        }
    }
    return joint;
}

double model_covariance(const JointDistribution& joint, const MetricModelProfile& profile_control,
                        const MetricModelProfile& profile_treatment, std::size_t n) {
    if (n < 2) {
        throw InsufficientSamples("at least 2 samples are required, got " + std::to_string(n));
    }
    joint.validate();
    double expected_product = 0.0;
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            expected_product +=
                profile_control.conditional_positive(x) * profile_treatment.conditional_positive(y) * joint.p[x][y];
        }
    }
    const double true_control = true_positive_rate(joint.control_rate(), profile_control);
    const double true_treatment = true_positive_rate(joint.treatment_rate(), profile_treatment);
    return (expected_product - true_control * true_treatment) / (static_cast<double>(n) - 1.0);
}

double deterministic_covariance(const JointDistribution& joint, std::size_t n) {
    if (n < 2) {
        throw InsufficientSamples("at least 2 samples are required, got " + std::to_string(n));
    }
    return (joint.p[1][1] - joint.control_rate() * joint.treatment_rate()) / (static_cast<double>(n) - 1.0);
}

ComparisonResult compare_paired(const JointObservationSet& pairs, const MetricModelProfile& profile_control,
                                const MetricModelProfile& profile_treatment, const SignificanceConfig& config,
                                CenterMode center_mode, CovarianceSign sign) {
    const JointDistribution joint = estimate_joint(pairs);
    const std::size_t n = pairs.size();

    const ObservationSet control = pairs.control();
    const ObservationSet treatment = pairs.treatment();
    ArmSummary c = detail::summarize_arm(control, true_positive_rate(estimate_mean(control), profile_control));
    ArmSummary t =
        detail::summarize_arm(treatment, true_positive_rate(estimate_mean(treatment), profile_treatment));

    const double cov_d = deterministic_covariance(joint, n);
    const double cov_m = model_covariance(joint, profile_control, profile_treatment, n);
    const double cov_sign = sign == CovarianceSign::standard ? -2.0 : 2.0;

    std::vector<std::string> warnings;
    const double scale_d = c.deterministic.value + t.deterministic.value;
    const double scale_m = c.model.value + t.model.value;
    const double vd = clamp_difference_variance(scale_d - 2.0 * cov_d, scale_d, "deterministic", warnings);
    const double vm = clamp_difference_variance(scale_m + cov_sign * cov_m, scale_m, "model-corrected", warnings);

    auto result = detail::finish_comparison(std::move(c), std::move(t), vd, vm, config, center_mode);
    result.paired = true;
    result.covariance_deterministic = cov_d;
    result.covariance_model = cov_m;
    if (sign == CovarianceSign::additive) {
        warnings.push_back("model-corrected variance uses the +2 Cov composition");
    }
    if (profile_control.pathological() || profile_treatment.pathological()) {
        warnings.push_back("metric model precision is below its false omission rate");
    }
    result.warnings.insert(result.warnings.end(), warnings.begin(), warnings.end());
    return result;
}

}  // namespace metricsig
