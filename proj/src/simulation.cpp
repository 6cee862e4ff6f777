#include "metricsig/simulation.hpp"

#include "metricsig/counter_rng.hpp"
#include "metricsig/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace metricsig {

namespace {

constexpr std::size_t kRecommendedTrials = 1000;

// Lanes inside one (trial, arm, sample) cell.
constexpr std::uint32_t kObservedLane = 0;
constexpr std::uint32_t kTrueLane = 1;

struct TrialOutcome {
    double true_mean_control = 0.0;
    double true_mean_treatment = 0.0;
    bool naive_covered = false;
    bool observed_center_covered = false;
    bool corrected_center_covered = false;
    bool clamped = false;
};

std::uint8_t draw_truth(const CounterRng& rng, const MetricModelProfile& profile, std::uint8_t observed,
                        std::uint64_t trial, std::uint32_t arm, std::uint64_t sample) {
    return rng.bernoulli(profile.conditional_positive(observed), trial, arm, sample, kTrueLane) ? 1 : 0;
}

// Mean then sum of squared deviations, both in index order.
std::pair<double, double> mean_and_variance(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) return {mean, std::numeric_limits<double>::quiet_NaN()};
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    return {mean, sq / static_cast<double>(values.size() - 1)};
}

TrialOutcome run_trial(const SimulationSpec& spec, std::uint64_t trial, double target_true_ate,
                       double target_observed_ate) {
    const TrialDraw draw = simulate_trial(spec, trial);
    TrialOutcome out;
    out.true_mean_control = estimate_mean(draw.control.truth);
    out.true_mean_treatment = estimate_mean(draw.treatment.truth);

    ComparisonResult result;
    if (spec.paired) {
        std::vector<JointObservationSet::Pair> pairs(spec.n);
        const auto c = draw.control.observed.verdicts();
        const auto t = draw.treatment.observed.verdicts();
        for (std::size_t i = 0; i < spec.n; ++i) pairs[i] = {c[i], t[i]};
        result = compare_paired(JointObservationSet(std::move(pairs)), spec.profile, spec.config);
    } else {
        result = compare_independent(draw.control.observed, draw.treatment.observed, spec.profile, spec.config);
    }
    const ConfidenceInterval corrected_center = confidence_interval(
        result.treatment.true_rate - result.control.true_rate, result.variance_diff_model, spec.config);

    out.naive_covered = result.ci_deterministic.contains(target_observed_ate);
    out.observed_center_covered = result.ci_model.contains(target_true_ate);
    out.corrected_center_covered = corrected_center.contains(target_true_ate);
    out.clamped = std::any_of(result.warnings.begin(), result.warnings.end(),
                              [](const std::string& w) { return w.find("clamped") != std::string::npos; });
    return out;
}

}  // namespace

void SimulationSpec::validate() const {
    if (!(rate_control >= 0.0 && rate_control <= 1.0) || !(rate_treatment >= 0.0 && rate_treatment <= 1.0)) {
        throw InvalidInput("observed rates must lie in [0, 1]");
    }
    if (n < 2) throw InvalidInput("n must be at least 2, got " + std::to_string(n));
    if (trials < 1) throw InvalidInput("trials must be at least 1");
    if (threads < 1) throw InvalidInput("threads must be at least 1");
    if (paired) {
        JointDistribution::from_correlation(rate_control, rate_treatment, rho);
    } else if (rho != 0.0) {
        throw InvalidInput("rho is only meaningful in paired mode");
    }
}

TrialDraw simulate_trial(const SimulationSpec& spec, std::uint64_t trial_index) {
    spec.validate();
    const CounterRng rng(spec.seed);
    std::vector<std::uint8_t> obs_c(spec.n), obs_t(spec.n), true_c(spec.n), true_t(spec.n);

    if (spec.paired) {
        const auto joint = JointDistribution::from_correlation(spec.rate_control, spec.rate_treatment, spec.rho);
        const double c00 = joint.p[0][0];
        const double c01 = c00 + joint.p[0][1];
        const double c10 = c01 + joint.p[1][0];
        for (std::size_t i = 0; i < spec.n; ++i) {
            const double u = rng.uniform(trial_index, 0, i, kObservedLane);
            const std::uint8_t x = u < c01 ? 0 : 1;
            const std::uint8_t y = (u < c00 || (u >= c01 && u < c10)) ? 0 : 1;
            obs_c[i] = x;
            obs_t[i] = y;
        }
    } else {
        for (std::size_t i = 0; i < spec.n; ++i) {
            obs_c[i] = rng.bernoulli(spec.rate_control, trial_index, 0, i, kObservedLane) ? 1 : 0;
            obs_t[i] = rng.bernoulli(spec.rate_treatment, trial_index, 1, i, kObservedLane) ? 1 : 0;
        }
    }
    for (std::size_t i = 0; i < spec.n; ++i) {
        true_c[i] = draw_truth(rng, spec.profile, obs_c[i], trial_index, 0, i);
        true_t[i] = draw_truth(rng, spec.profile, obs_t[i], trial_index, 1, i);
    }
    return {{ObservationSet(std::move(obs_c), "control"), ObservationSet(std::move(true_c), "control")},
            {ObservationSet(std::move(obs_t), "treatment"), ObservationSet(std::move(true_t), "treatment")}};
}

SimulationReport validate_variance(const SimulationSpec& spec) {
    spec.validate();

    SimulationReport report;
    report.seed = spec.seed;
    report.trials_used = spec.trials;
    report.control.expected_true_rate = true_positive_rate(spec.rate_control, spec.profile);
    report.treatment.expected_true_rate = true_positive_rate(spec.rate_treatment, spec.profile);
    report.control.analytic_variance = model_variance(spec.rate_control, spec.profile, spec.n).value;
    report.treatment.analytic_variance = model_variance(spec.rate_treatment, spec.profile, spec.n).value;
    report.target_true_ate = report.treatment.expected_true_rate - report.control.expected_true_rate;
    report.target_observed_ate = spec.rate_treatment - spec.rate_control;

    std::vector<TrialOutcome> outcomes(spec.trials);
    auto worker = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < spec.trials; i += stride) {
            outcomes[i] = run_trial(spec, i, report.target_true_ate, report.target_observed_ate);
        }
    };
    const std::size_t workers = std::min<std::size_t>(spec.threads, spec.trials);
    if (workers <= 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker, w, workers);
        for (auto& t : pool) t.join();
    }

    std::vector<double> means_c(spec.trials), means_t(spec.trials);
    std::size_t naive = 0, observed_center = 0, corrected_center = 0, clamped = 0;
    for (std::size_t i = 0; i < spec.trials; ++i) {
        means_c[i] = outcomes[i].true_mean_control;
        means_t[i] = outcomes[i].true_mean_treatment;
        naive += outcomes[i].naive_covered;
        observed_center += outcomes[i].observed_center_covered;
        corrected_center += outcomes[i].corrected_center_covered;
        clamped += outcomes[i].clamped;
    }
    std::tie(report.control.mean_of_true_means, report.control.empirical_variance_of_true_mean) =
        mean_and_variance(means_c);
    std::tie(report.treatment.mean_of_true_means, report.treatment.empirical_variance_of_true_mean) =
        mean_and_variance(means_t);

    const double trials = static_cast<double>(spec.trials);
    report.naive_ci_coverage = static_cast<double>(naive) / trials;
    report.ci_coverage_observed_center = static_cast<double>(observed_center) / trials;
    report.ci_coverage_corrected_center = static_cast<double>(corrected_center) / trials;

    if (spec.trials < kRecommendedTrials) {
        report.warnings.push_back("only " + std::to_string(spec.trials) + " trials; at least " +
                                  std::to_string(kRecommendedTrials) + " are recommended");
    }
    if (spec.trials < 2) {
        report.warnings.push_back("empirical variance needs at least 2 trials");
    }
    if (clamped > 0) {
        report.warnings.push_back(std::to_string(clamped) + " trials clamped a negative difference variance to 0");
    }
    if (spec.profile.pathological()) {
        report.warnings.push_back("metric model precision is below its false omission rate");
    }
    return report;
}

}  // namespace metricsig
