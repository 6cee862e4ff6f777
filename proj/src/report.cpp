#include "metricsig/report.hpp"

#include "metricsig/errors.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace metricsig {

namespace {

using nlohmann::json;

std::string sig5(double value) {
    if (std::isnan(value)) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.5g", value);
    return buf;
}

std::string interval_text(const ConfidenceInterval& ci) {
    return "(" + sig5(ci.lower) + ", " + sig5(ci.upper) + ")";
}

json interval_json(const ConfidenceInterval& ci) {
    return {{"lower", ci.lower}, {"upper", ci.upper}, {"level", ci.level}};
}

json arm_echo_json(const ArmEcho& arm) {
    json j = {{"label", arm.label}, {"n", arm.n}, {"positives", arm.positives}};
    if (!arm.class_counts.empty()) j["class_counts"] = arm.class_counts;
    return j;
}

ArmEcho arm_echo_from_json(const json& j) {
    ArmEcho arm;
    arm.label = j.at("label").get<std::string>();
    arm.n = j.at("n").get<std::size_t>();
    arm.positives = j.at("positives").get<std::size_t>();
    if (j.contains("class_counts")) arm.class_counts = j.at("class_counts").get<std::vector<std::size_t>>();
    return arm;
}

json arm_result_json(const ArmSummary& arm) {
    return {{"mean", arm.observed_rate},
            {"true_rate", arm.true_rate},
            {"variance_deterministic", arm.deterministic.value},
            {"variance_model", arm.model.value}};
}

CovarianceSign parse_covariance_sign(std::string_view text) {
    if (text == "standard") return CovarianceSign::standard;
    if (text == "additive") return CovarianceSign::additive;
    throw InvalidInput("unknown covariance sign '" + std::string(text) + "'");
}

std::vector<double> distribution_from_counts(const std::vector<std::size_t>& counts, std::size_t n) {
    std::vector<double> dist;
    dist.reserve(counts.size());
    for (std::size_t c : counts) dist.push_back(static_cast<double>(c) / static_cast<double>(n));
    return dist;
}

json simulation_arm_json(const ArmSimulationStats& arm) {
    return {{"expected_true_rate", arm.expected_true_rate},
            {"mean_of_true_means", arm.mean_of_true_means},
            {"empirical_variance_of_true_mean", arm.empirical_variance_of_true_mean},
            {"analytic_variance", arm.analytic_variance}};
}

}  // namespace

std::string_view to_string(CovarianceSign sign) {
    return sign == CovarianceSign::standard ? "standard" : "additive";
}

ComparisonResult evaluate(const ReportInputs& inputs) {
    if (inputs.joint_counts) {
        const auto* profile = std::get_if<MetricModelProfile>(&inputs.profile);
        if (!profile) throw InvalidInput("paired comparisons need a binary metric model profile");
        auto result = compare_paired(JointObservationSet::from_counts(*inputs.joint_counts), *profile,
                                     inputs.config, inputs.center_mode, inputs.covariance_sign);
        result.control.label = inputs.control.label;
        result.treatment.label = inputs.treatment.label;
        return result;
    }
    const auto control = ObservationSet::from_counts(inputs.control.n, inputs.control.positives, inputs.control.label);
    const auto treatment =
        ObservationSet::from_counts(inputs.treatment.n, inputs.treatment.positives, inputs.treatment.label);
    if (const auto* multi = std::get_if<MultiClassProfile>(&inputs.profile)) {
        const auto dist_c = distribution_from_counts(inputs.control.class_counts, inputs.control.n);
        const auto dist_t = distribution_from_counts(inputs.treatment.class_counts, inputs.treatment.n);
        return compare_independent_multiclass(control, dist_c, treatment, dist_t, *multi, inputs.config,
                                              inputs.center_mode);
    }
    return compare_independent(control, treatment, std::get<MetricModelProfile>(inputs.profile), inputs.config,
                               inputs.center_mode);
}

json to_json(const ReportDocument& report) {
    const auto& in = report.inputs;
    const auto& r = report.result;

    json inputs = {
        {"control", arm_echo_json(in.control)},
        {"treatment", arm_echo_json(in.treatment)},
        {"paired", in.joint_counts.has_value()},
        {"profile", profile_to_json(in.profile)},
        {"config",
         {{"alpha", in.config.alpha()},
          {"critical_value", in.config.critical_value()},
          {"level", in.config.level()},
          {"center_mode", to_string(in.center_mode)},
          {"covariance_sign", to_string(in.covariance_sign)}}},
    };
    if (in.joint_counts) {
        const auto& c = *in.joint_counts;
        inputs["joint_counts"] = {{"n00", c[0][0]}, {"n01", c[0][1]}, {"n10", c[1][0]}, {"n11", c[1][1]}};
    }

    json results = {
        {"control", arm_result_json(r.control)},
        {"treatment", arm_result_json(r.treatment)},
        {"ate", r.ate},
        {"model_center", r.model_center},
        {"variance_diff_deterministic", r.variance_diff_deterministic},
        {"variance_diff_model", r.variance_diff_model},
        {"ci_deterministic", interval_json(r.ci_deterministic)},
        {"ci_model", interval_json(r.ci_model)},
        {"reject_deterministic", r.reject_deterministic},
        {"reject_model", r.reject_model},
    };
    if (r.covariance_deterministic) results["covariance_deterministic"] = *r.covariance_deterministic;
    if (r.covariance_model) results["covariance_model"] = *r.covariance_model;

    return {
        {"schema_version", kReportSchemaVersion},
        {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
        {"command", "compare"},
        {"inputs", std::move(inputs)},
        {"results", std::move(results)},
        {"warnings", report.warnings},
    };
}

ReportInputs inputs_from_json(const json& report) {
    try {
        if (report.at("schema_version").get<int>() != kReportSchemaVersion) {
            throw InvalidInput("unsupported report schema_version " + report.at("schema_version").dump());
        }
        const auto& in = report.at("inputs");
        ReportInputs inputs;
        inputs.control = arm_echo_from_json(in.at("control"));
        inputs.treatment = arm_echo_from_json(in.at("treatment"));
        inputs.profile = parse_profile(in.at("profile"));
        const auto& cfg = in.at("config");
        inputs.config = SignificanceConfig::from_pair(cfg.at("alpha").get<double>(), cfg.at("critical_value").get<double>());
        inputs.center_mode = parse_center_mode(cfg.at("center_mode").get<std::string>());
        inputs.covariance_sign = parse_covariance_sign(cfg.at("covariance_sign").get<std::string>());
        if (in.value("paired", false)) {
            const auto& jc = in.at("joint_counts");
            inputs.joint_counts = std::array<std::array<std::size_t, 2>, 2>{{
                {jc.at("n00").get<std::size_t>(), jc.at("n01").get<std::size_t>()},
                {jc.at("n10").get<std::size_t>(), jc.at("n11").get<std::size_t>()},
            }};
        }
        return inputs;
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed report: ") + e.what());
    }
}

std::string render_text(const ReportDocument& report) {
    const auto& in = report.inputs;
    const auto& r = report.result;
    std::ostringstream out;
    auto row = [&out](std::string_view name, const std::string& c, const std::string& t) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "  %-22s %14s %14s\n", std::string(name).c_str(), c.c_str(), t.c_str());
        out << buf;
    };

    out << kToolName << ' ' << kToolVersion << " compare (" << (in.joint_counts ? "paired" : "independent")
        << ")\n";
    out << "control:   " << in.control.label << " (n=" << in.control.n << ", positives=" << in.control.positives
        << ")\n";
    out << "treatment: " << in.treatment.label << " (n=" << in.treatment.n
        << ", positives=" << in.treatment.positives << ")\n";
    if (const auto* p = std::get_if<MetricModelProfile>(&in.profile)) {
        out << "profile:   precision=" << sig5(p->precision()) << " FOR=" << sig5(p->false_omission_rate()) << '\n';
    } else {
        const auto& m = std::get<MultiClassProfile>(in.profile);
        out << "profile:   multi-class (" << m.size() << " classes)\n";
    }
    out << "config:    alpha=" << sig5(in.config.alpha()) << " z=" << sig5(in.config.critical_value())
        << " center=" << to_string(in.center_mode);
    if (in.joint_counts) out << " covariance=" << to_string(in.covariance_sign);
    out << "\n\n";

    row("", r.control.label.empty() ? "control" : r.control.label,
        r.treatment.label.empty() ? "treatment" : r.treatment.label);
    row("Mean", sig5(r.control.observed_rate), sig5(r.treatment.observed_rate));
    row("True rate (p^R)", sig5(r.control.true_rate), sig5(r.treatment.true_rate));
    row("Var^D", sig5(r.control.deterministic.value), sig5(r.treatment.deterministic.value));
    row("Var^M", sig5(r.control.model.value), sig5(r.treatment.model.value));
    out << '\n';
    out << "ATE:   " << sig5(r.ate) << '\n';
    if (r.covariance_deterministic) {
        out << "Cov^D: " << sig5(*r.covariance_deterministic) << "   Cov^M: " << sig5(*r.covariance_model) << '\n';
    }
    out << "CI^D:  " << interval_text(r.ci_deterministic) << "  "
        << (r.reject_deterministic ? "reject H0" : "fail to reject H0") << '\n';
    out << "CI^M:  " << interval_text(r.ci_model) << "  " << (r.reject_model ? "reject H0" : "fail to reject H0")
        << '\n';
    if (!report.warnings.empty()) {
        out << "\nwarnings:\n";
        for (const auto& w : report.warnings) out << "  - " << w << '\n';
    }
    return out.str();
}

json to_json(const SimulationReport& report, const SimulationSpec& spec) {
    json inputs = {
        {"rate_control", spec.rate_control},
        {"rate_treatment", spec.rate_treatment},
        {"profile", profile_to_json(spec.profile)},
        {"n", spec.n},
        {"trials", spec.trials},
        {"seed", spec.seed},
        {"paired", spec.paired},
        {"config", {{"alpha", spec.config.alpha()}, {"critical_value", spec.config.critical_value()}}},
    };
    if (spec.paired) inputs["rho"] = spec.rho;
    // threads is not echoed; the output must not depend on it.
    return {
        {"schema_version", kReportSchemaVersion},
        {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
        {"command", "simulate"},
        {"inputs", std::move(inputs)},
        {"results",
         {{"control", simulation_arm_json(report.control)},
          {"treatment", simulation_arm_json(report.treatment)},
          {"target_true_ate", report.target_true_ate},
          {"target_observed_ate", report.target_observed_ate},
          {"ci_coverage_observed_center", report.ci_coverage_observed_center},
          {"ci_coverage_corrected_center", report.ci_coverage_corrected_center},
          {"naive_ci_coverage", report.naive_ci_coverage},
          {"trials_used", report.trials_used},
          {"seed", report.seed}}},
        {"warnings", report.warnings},
    };
}

std::string render_text(const SimulationReport& report, const SimulationSpec& spec) {
    std::ostringstream out;
    out << kToolName << ' ' << kToolVersion << " simulate (" << (spec.paired ? "paired" : "independent") << ")\n";
    out << "rates: control=" << sig5(spec.rate_control) << " treatment=" << sig5(spec.rate_treatment)
        << "  precision=" << sig5(spec.profile.precision()) << " FOR=" << sig5(spec.profile.false_omission_rate())
        << "  n=" << spec.n << " trials=" << report.trials_used << " seed=" << report.seed << "\n\n";
    for (const auto* arm : {&report.control, &report.treatment}) {
        out << (arm == &report.control ? "control  " : "treatment") << "  p^R=" << sig5(arm->expected_true_rate)
            << "  mean(true means)=" << sig5(arm->mean_of_true_means)
            << "  empirical var=" << sig5(arm->empirical_variance_of_true_mean)
            << "  analytic var=" << sig5(arm->analytic_variance) << '\n';
    }
    out << "\ncoverage: naive=" << sig5(report.naive_ci_coverage)
        << "  corrected(observed centre)=" << sig5(report.ci_coverage_observed_center)
        << "  corrected(corrected centre)=" << sig5(report.ci_coverage_corrected_center) << '\n';
    if (!report.warnings.empty()) {
        out << "\nwarnings:\n";
        for (const auto& w : report.warnings) out << "  - " << w << '\n';
    }
    return out.str();
}

}  // namespace metricsig
