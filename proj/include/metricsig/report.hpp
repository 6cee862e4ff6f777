#pragma once

#include "metricsig/estimator.hpp"
#include "metricsig/io.hpp"
#include "metricsig/paired.hpp"
#include "metricsig/simulation.hpp"

#include <json.hpp>

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace metricsig {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::string_view kToolName = "metricsig";
inline constexpr std::string_view kToolVersion = "0.1.0";

std::string_view to_string(CovarianceSign sign);

/// Sufficient statistics for one arm, as echoed in a report.
struct ArmEcho {
    std::string label;
    std::size_t n = 0;
    std::size_t positives = 0;
    /// Per-class record counts, ordered like the multi-class profile; empty in binary mode.
    std::vector<std::size_t> class_counts;
};

/// Everything needed to recompute a comparison from scratch.
struct ReportInputs {
    ArmEcho control;
    ArmEcho treatment;
    /// Paired mode: counts[x][y] of (control, treatment) verdict pairs.
    std::optional<std::array<std::array<std::size_t, 2>, 2>> joint_counts;
    AnyProfile profile = MetricModelProfile::perfect();
    SignificanceConfig config;
    CenterMode center_mode = CenterMode::observed;
    CovarianceSign covariance_sign = CovarianceSign::standard;
};

struct ReportDocument {
    ReportInputs inputs;
    ComparisonResult result;
    /// Result warnings plus any raised while resolving inputs.
    std::vector<std::string> warnings;
};

/// Recomputes the comparison from echoed counts only.
ComparisonResult evaluate(const ReportInputs& inputs);

nlohmann::json to_json(const ReportDocument& report);
ReportInputs inputs_from_json(const nlohmann::json& report);

/// Human-readable report, numbers to 5 significant figures.
std::string render_text(const ReportDocument& report);

nlohmann::json to_json(const SimulationReport& report, const SimulationSpec& spec);
std::string render_text(const SimulationReport& report, const SimulationSpec& spec);

}  // namespace metricsig
