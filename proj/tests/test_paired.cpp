#include "metricsig/errors.hpp"
#include "metricsig/paired.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace metricsig;

namespace {

constexpr double kTol = 1e-12;
const MetricModelProfile kReferenceProfile{0.8897, 0.22769};

using IntPairs = std::vector<std::pair<int, int>>;

JointObservationSet to_joint(const IntPairs& pairs) {
    std::vector<JointObservationSet::Pair> v;
    for (const auto& [c, t] : pairs) v.emplace_back(c, t);
    return JointObservationSet(std::move(v));
}

IntPairs repeat(const IntPairs& block, int times) {
    IntPairs out;
    for (int i = 0; i < times; ++i) out.insert(out.end(), block.begin(), block.end());
    return out;
}

// Every (x, y) cell appears count_c[x] * count_t[y] times, so the empirical
// joint factorises exactly into its marginals.
IntPairs factorised_pairs(int c0, int c1, int t0, int t1) {
    IntPairs out;
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            const int k = (x ? c1 : c0) * (y ? t1 : t0);
            for (int i = 0; i < k; ++i) out.emplace_back(x, y);
        }
    }
    return out;
}

IntPairs random_pairs(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double pc = u(rng), pt = u(rng), stick = u(rng);
    std::bernoulli_distribution c(pc), t(pt), same(stick);
    IntPairs out(n);
    for (auto& [x, y] : out) {
        x = c(rng);
        y = same(rng) ? x : static_cast<int>(t(rng));
    }
    return out;
}

}  // namespace

TEST(JointObservationSet, RejectsNonBinary) {
    EXPECT_THROW(JointObservationSet({{0, 2}}), InvalidInput);
}

TEST(EstimateJoint, DirectCounts) {
    const auto j = estimate_joint(to_joint({{1, 1}, {0, 0}, {1, 1}, {0, 0}}));
    EXPECT_EQ(j.p[1][1], 0.5);
    EXPECT_EQ(j.p[0][0], 0.5);
    EXPECT_EQ(j.p[0][1], 0.0);
    EXPECT_EQ(j.p[1][0], 0.0);
    EXPECT_EQ(j.control_rate(), 0.5);
    EXPECT_EQ(j.treatment_rate(), 0.5);
}

TEST(EstimateJoint, Degenerate) {
    const auto j = estimate_joint(to_joint(repeat({{1, 0}}, 7)));
    EXPECT_EQ(j.p[1][0], 1.0);
    EXPECT_EQ(j.p[0][0] + j.p[0][1] + j.p[1][1], 0.0);
}

TEST(EstimateJoint, NeedsTwoPairs) {
    EXPECT_THROW(estimate_joint(to_joint({{1, 0}})), InsufficientSamples);
}

TEST(EstimateJoint, MarginalsMatchArmMeans) {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 50; ++i) {
        const auto pairs = to_joint(random_pairs(rng, 2 + rng() % 300));
        const auto j = estimate_joint(pairs);
        EXPECT_NEAR(j.control_rate(), estimate_mean(pairs.control()), kTol);
        EXPECT_NEAR(j.treatment_rate(), estimate_mean(pairs.treatment()), kTol);
        EXPECT_NO_THROW(j.validate());
    }
}

TEST(EstimateJoint, IndependentDrawsFactorise) {
    std::mt19937_64 rng(2024);
    std::bernoulli_distribution c(0.3), t(0.6);
    IntPairs pairs(1000);
    for (auto& [x, y] : pairs) {
        x = c(rng);
        y = t(rng);
    }
    const auto j = estimate_joint(to_joint(pairs));
    const double se = std::sqrt(0.18 * 0.82 / 1000.0);
    EXPECT_NEAR(j.p[1][1], 0.18, 3.0 * se);
}

TEST(JointDistribution, FromCorrelation) {
    const auto j = JointDistribution::from_correlation(0.3, 0.6, 0.0);
    EXPECT_NEAR(j.p[1][1], 0.18, kTol);
    EXPECT_NO_THROW(j.validate());

    const auto full = JointDistribution::from_correlation(0.5, 0.5, 1.0);
    EXPECT_NEAR(full.p[1][1], 0.5, kTol);
    EXPECT_NEAR(full.p[1][0], 0.0, kTol);

    EXPECT_THROW(JointDistribution::from_correlation(0.1, 0.9, 1.0), InvalidInput);
    EXPECT_THROW(JointDistribution::from_correlation(0.5, 0.5, 1.5), InvalidInput);
}

TEST(JointDistribution, ValidateRejectsBadTables) {
    JointDistribution j;
    j.p = {{{0.5, 0.5}, {0.5, 0.0}}};
    EXPECT_THROW(j.validate(), InvalidInput);
    j.p = {{{1.1, -0.1}, {0.0, 0.0}}};
    EXPECT_THROW(j.validate(), InvalidInput);
}

TEST(ModelCovariance, ZeroForIndependentJoint) {
    JointDistribution j;
    const double pc = 0.37, pt = 0.81;
    j.p = {{{(1 - pc) * (1 - pt), (1 - pc) * pt}, {pc * (1 - pt), pc * pt}}};
    EXPECT_NEAR(model_covariance(j, kReferenceProfile, MetricModelProfile(0.7, 0.05), 50), 0.0, kTol);
}

TEST(ModelCovariance, PerfectProfileConcordantPairs) {
    const auto j = estimate_joint(to_joint({{1, 1}, {0, 0}, {1, 1}, {0, 0}}));
    EXPECT_NEAR(model_covariance(j, MetricModelProfile::perfect(), MetricModelProfile::perfect(), 4), 1.0 / 12.0,
                kTol);
}

TEST(ModelCovariance, FourCellExpansion) {
    JointDistribution j;
    j.p = {{{0.4, 0.1}, {0.1, 0.4}}};
    const MetricModelProfile profile(0.9, 0.2);
    const double expected = oracle::model_covariance_four_cells(j.p, 0.9, 0.2, 0.9, 0.2, 101);
    EXPECT_NEAR(expected, 7.35e-4, kTol);
    EXPECT_NEAR(model_covariance(j, profile, profile, 101), expected, kTol);
}

TEST(ModelCovariance, DistinctProfilesMatchOracle) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        const double s = a + b + c + d;
        JointDistribution j;
        j.p = {{{a / s, b / s}, {c / s, d / s}}};
        const double pc = u(rng), fc = u(rng), pt = u(rng), ft = u(rng);
        const std::size_t n = 2 + rng() % 1000;
        EXPECT_NEAR(model_covariance(j, MetricModelProfile(pc, fc), MetricModelProfile(pt, ft), n),
                    oracle::model_covariance_four_cells(j.p, pc, fc, pt, ft, n), kTol);
    }
}

TEST(ModelCovariance, PerfectProfileIsEmpiricalCovariance) {
    std::mt19937_64 rng(47);
    for (int i = 0; i < 200; ++i) {
        const auto raw = random_pairs(rng, 2 + rng() % 500);
        const auto j = estimate_joint(to_joint(raw));
        EXPECT_NEAR(model_covariance(j, MetricModelProfile::perfect(), MetricModelProfile::perfect(), raw.size()),
                    oracle::covariance_of_means(raw), kTol);
        EXPECT_NEAR(deterministic_covariance(j, raw.size()), oracle::covariance_of_means(raw), kTol);
    }
}

TEST(ModelCovariance, NeedsTwoSamples) {
    JointDistribution j;
    j.p = {{{0.25, 0.25}, {0.25, 0.25}}};
    EXPECT_THROW(model_covariance(j, kReferenceProfile, kReferenceProfile, 1), InsufficientSamples);
}

TEST(ComparePaired, IndependentPairsMatchUnpairedComparison) {
    for (const auto& [c0, c1, t0, t1] : {std::array{3, 1, 2, 2}, std::array{5, 2, 1, 4}, std::array{7, 3, 9, 1}}) {
        const auto pairs = to_joint(factorised_pairs(c0, c1, t0, t1));
        const auto paired = compare_paired(pairs, kReferenceProfile);
        const auto unpaired = compare_independent(pairs.control(), pairs.treatment(), kReferenceProfile);
        EXPECT_NEAR(*paired.covariance_model, 0.0, kTol);
        EXPECT_NEAR(*paired.covariance_deterministic, 0.0, kTol);
        EXPECT_NEAR(paired.ci_model.lower, unpaired.ci_model.lower, kTol);
        EXPECT_NEAR(paired.ci_model.upper, unpaired.ci_model.upper, kTol);
        EXPECT_NEAR(paired.ci_deterministic.lower, unpaired.ci_deterministic.lower, kTol);
        EXPECT_NEAR(paired.ci_deterministic.upper, unpaired.ci_deterministic.upper, kTol);
        EXPECT_EQ(paired.reject_model, unpaired.reject_model);
        EXPECT_TRUE(paired.paired);
    }
}

TEST(ComparePaired, ConcordantPairsHaveZeroDifferenceVariance) {
    const auto pairs = to_joint(repeat({{1, 1}, {0, 0}, {0, 0}, {1, 1}, {0, 0}}, 20));
    const auto r = compare_paired(pairs, MetricModelProfile::perfect());
    EXPECT_EQ(r.ate, 0.0);
    EXPECT_NEAR(r.variance_diff_model, 0.0, kTol);
    EXPECT_NEAR(r.variance_diff_deterministic, 0.0, kTol);
    EXPECT_TRUE(r.warnings.empty());
}

TEST(ComparePaired, AntiConcordantPairsMatchDirectDifferenceVariance) {
    const auto raw = repeat({{1, 0}, {0, 1}}, 50);
    const auto r = compare_paired(to_joint(raw), MetricModelProfile::perfect());
    const double direct = oracle::variance_of_paired_difference(raw);
    EXPECT_NEAR(direct, 1.0 / 99.0, kTol);
    EXPECT_NEAR(*r.covariance_model, -0.25 / 99.0, kTol);
    EXPECT_NEAR(r.variance_diff_model, direct, kTol);
    EXPECT_NEAR(r.variance_diff_deterministic, direct, kTol);
}

TEST(ComparePaired, PerfectProfileMatchesDirectDifferenceVariance) {
    std::mt19937_64 rng(53);
    for (int i = 0; i < 200; ++i) {
        const auto raw = random_pairs(rng, 2 + rng() % 1000);
        const auto r = compare_paired(to_joint(raw), MetricModelProfile::perfect());
        EXPECT_NEAR(r.variance_diff_model, oracle::variance_of_paired_difference(raw), kTol);
    }
}

TEST(ComparePaired, DifferenceVarianceIsNonNegative) {
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const auto raw = random_pairs(rng, 2 + rng() % 200);
        const auto r = compare_paired(to_joint(raw), MetricModelProfile(u(rng), u(rng)),
                                      MetricModelProfile(u(rng), u(rng)));
        EXPECT_GE(r.variance_diff_model, 0.0);
        EXPECT_GE(r.variance_diff_deterministic, 0.0);
    }
}

TEST(ComparePaired, PaperSignAddsCovariance) {
    const auto raw = repeat({{1, 1}, {0, 0}, {1, 0}, {0, 1}, {1, 1}}, 10);
    const auto standard = compare_paired(to_joint(raw), kReferenceProfile);
    const auto literal =
        compare_paired(to_joint(raw), kReferenceProfile, SignificanceConfig{}, CenterMode::observed, CovarianceSign::additive);
    const double arms = standard.control.model.value + standard.treatment.model.value;
    EXPECT_NEAR(standard.variance_diff_model, arms - 2.0 * *standard.covariance_model, kTol);
    EXPECT_NEAR(literal.variance_diff_model, arms + 2.0 * *literal.covariance_model, kTol);
    EXPECT_EQ(literal.variance_diff_deterministic, standard.variance_diff_deterministic);
    EXPECT_FALSE(literal.warnings.empty());
}

TEST(ComparePaired, PaperSignCanCancelToZeroForAntiConcordantPairs) {
    const auto raw = repeat({{1, 0}, {0, 1}}, 50);
    const auto r = compare_paired(to_joint(raw), MetricModelProfile::perfect(), SignificanceConfig{},
                                  CenterMode::observed, CovarianceSign::additive);
    EXPECT_NEAR(r.variance_diff_model, 0.0, kTol);
}

TEST(ComparePaired, CorrectedCentre) {
    const auto raw = repeat({{1, 1}, {0, 1}, {0, 0}, {0, 1}}, 25);
    const auto r = compare_paired(to_joint(raw), kReferenceProfile, SignificanceConfig{}, CenterMode::corrected);
    EXPECT_NEAR(r.model_center, r.treatment.true_rate - r.control.true_rate, kTol);
    EXPECT_EQ(r.center_mode, CenterMode::corrected);
}
