#pragma once

#include "metricsig/estimator.hpp"
#include "metricsig/paired.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace metricsig {

enum class InputFormat { automatic, csv, jsonl };

InputFormat parse_input_format(std::string_view text);

/// Picks csv for `.csv`, jsonl for `.jsonl`/`.ndjson`; throws InvalidInput otherwise.
InputFormat detect_format(const std::filesystem::path& path);

/// One scored output. `line` is the 1-based source line it came from.
struct EvaluationRecord {
    std::string id;
    std::uint8_t verdict = 0;
    std::optional<std::string> class_label;
    std::optional<std::string> pair_key;
    std::size_t line = 0;
};

// CSV: header naming `id` and `verdict`, optionally `class_label` and
// `pair_key`, in any order. LF or CRLF line endings; double-quoted fields.
std::vector<EvaluationRecord> parse_csv(std::istream& in);

// JSONL: one object per line with the same field names; blank lines skipped.
std::vector<EvaluationRecord> parse_jsonl(std::istream& in);

std::vector<EvaluationRecord> load_records(const std::filesystem::path& path,
                                           InputFormat format = InputFormat::automatic);

ObservationSet to_observation_set(std::span<const EvaluationRecord> records, std::string label = {});

/// Loads one arm; the label defaults to the file stem.
ObservationSet load_observations(const std::filesystem::path& path, InputFormat format = InputFormat::automatic,
                                 std::optional<std::string> label = std::nullopt);

/// Joins two arms on pair_key, keeping the control file's row order. Every
/// key must appear exactly once in each arm.
JointObservationSet join_pairs(std::span<const EvaluationRecord> control,
                               std::span<const EvaluationRecord> treatment);

JointObservationSet load_joint_observations(const std::filesystem::path& control,
                                            const std::filesystem::path& treatment,
                                            InputFormat format = InputFormat::automatic);

/// class_label of every record; throws InvalidInput if any is missing.
std::vector<std::string> class_labels(std::span<const EvaluationRecord> records);

using AnyProfile = std::variant<MetricModelProfile, MultiClassProfile>;

/// Accepts {"precision", "false_omission_rate"} or {"classes",
/// "conditional_positive"}. Both shapes at once is AmbiguousInput.
AnyProfile parse_profile(const nlohmann::json& doc);

AnyProfile load_profile(const std::filesystem::path& path);

nlohmann::json profile_to_json(const AnyProfile& profile);

}  // namespace metricsig
