#pragma once

// Dependent-sample comparisons. Each sample yields one verdict for the
// control system and one for the treatment system, so the variance of the
// difference picks up a covariance term:
//
//   Cov^M(C, T) = [ sum_{x,y} P(R_C=1|O_C=x) P(R_T=1|O_T=y) P(O_C=x, O_T=y)
//                   - p^R_C p^R_T ] / (N - 1)
//
// The true labels are assumed conditionally independent given the two
// observed verdicts.

#include "metricsig/estimator.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace metricsig {

/// Aligned (control, treatment) verdict pairs.
class JointObservationSet {
public:
    using Pair = std::pair<std::uint8_t, std::uint8_t>;

    JointObservationSet() = default;
    explicit JointObservationSet(std::vector<Pair> pairs);

    /// `counts[x][y]` copies of (x, y), emitted in (0,0), (0,1), (1,0), (1,1) order.
    static JointObservationSet from_counts(const std::array<std::array<std::size_t, 2>, 2>& counts);

    std::span<const Pair> pairs() const noexcept { return pairs_; }
    std::size_t size() const noexcept { return pairs_.size(); }

    ObservationSet control(std::string label = "control") const;
    ObservationSet treatment(std::string label = "treatment") const;

    /// Number of pairs equal to (x, y).
    std::array<std::array<std::size_t, 2>, 2> counts() const;

private:
    std::vector<Pair> pairs_;
};

/// 2x2 table of P(O_C = x, O_T = y), indexed [x][y].
struct JointDistribution {
    std::array<std::array<double, 2>, 2> p{};

    /// Checks non-negativity and that cells sum to 1 within 1e-9.
    void validate() const;

    double control_rate() const noexcept { return p[1][0] + p[1][1]; }
    double treatment_rate() const noexcept { return p[0][1] + p[1][1]; }

    /// Joint with P(1,1) = p_C p_T + rho sqrt(p_C(1-p_C) p_T(1-p_T)).
    /// Throws InvalidInput when any resulting cell is negative.
    static JointDistribution from_correlation(double control_rate, double treatment_rate, double rho);
};

/// Sign applied to the covariance when composing Var(T - C).
enum class CovarianceSign {
    /// Var(C) + Var(T) - 2 Cov(C, T).
    standard,
    /// Var(C) + Var(T) + 2 Cov(C, T), applied to the model-corrected variance only.
    additive,
};

/// Empirical cell frequencies. Throws InsufficientSamples when fewer than 2 pairs.
JointDistribution estimate_joint(const JointObservationSet& pairs);

/// Model-corrected covariance of the two arm means (Bessel corrected).
double model_covariance(const JointDistribution& joint, const MetricModelProfile& profile_control,
                        const MetricModelProfile& profile_treatment, std::size_t n);

/// Empirical covariance of the observed verdict means,
/// (P(1,1) - p_C p_T) / (N - 1).
double deterministic_covariance(const JointDistribution& joint, std::size_t n);

ComparisonResult compare_paired(const JointObservationSet& pairs, const MetricModelProfile& profile_control,
                                const MetricModelProfile& profile_treatment, const SignificanceConfig& config = {},
                                CenterMode center_mode = CenterMode::observed,
                                CovarianceSign sign = CovarianceSign::standard);

/// Both arms scored by the same metric model.
inline ComparisonResult compare_paired(const JointObservationSet& pairs, const MetricModelProfile& profile,
                                       const SignificanceConfig& config = {},
                                       CenterMode center_mode = CenterMode::observed,
                                       CovarianceSign sign = CovarianceSign::standard) {
    return compare_paired(pairs, profile, profile, config, center_mode, sign);
}

}  // namespace metricsig
