#include "metricsig/io.hpp"

#include "metricsig/errors.hpp"

#include <fstream>
#include <istream>
#include <set>
#include <unordered_map>

namespace metricsig {

namespace {

using nlohmann::json;

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool is_blank(std::string_view line) {
    return line.find_first_not_of(" \t") == std::string_view::npos;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(ch);
        }
    }
    if (quoted) throw ParseError(line_no, "unterminated quoted field");
    fields.push_back(std::move(field));
    return fields;
}

std::uint8_t parse_verdict_text(std::string_view text, std::size_t line_no) {
    const auto v = trim(text);
    if (v == "0") return 0;
    if (v == "1") return 1;
    throw ParseError(line_no, "verdict '" + std::string(v) + "' is not 0 or 1");
}

std::optional<std::string> optional_text(std::string_view text) {
    const auto v = trim(text);
    if (v.empty()) return std::nullopt;
    return std::string(v);
}

std::optional<std::string> optional_json_string(const json& obj, const char* key, std::size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
    throw ParseError(line_no, std::string("field '") + key + "' must be a string");
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
    return in;
}

double probability_field(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end()) throw InvalidInput(std::string("profile is missing '") + key + "'");
    if (!it->is_number()) throw InvalidInput(std::string("profile field '") + key + "' must be a number");
    return it->get<double>();
}

}  // namespace

InputFormat parse_input_format(std::string_view text) {
    if (text == "auto") return InputFormat::automatic;
    if (text == "csv") return InputFormat::csv;
    if (text == "jsonl") return InputFormat::jsonl;
    throw InvalidInput("unknown input format '" + std::string(text) + "' (expected auto|csv|jsonl)");
}

InputFormat detect_format(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".csv") return InputFormat::csv;
    if (ext == ".jsonl" || ext == ".ndjson") return InputFormat::jsonl;
    throw InvalidInput("cannot detect the format of '" + path.string() + "' from its extension; pass a format");
}

std::vector<EvaluationRecord> parse_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;

    std::optional<std::size_t> id_col, verdict_col, class_col, pair_col;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (is_blank(line)) continue;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        const auto header = split_csv_line(line, line_no);
        columns = header.size();
        for (std::size_t i = 0; i < header.size(); ++i) {
            const auto name = trim(header[i]);
            auto assign = [&](std::optional<std::size_t>& slot) {
                if (slot) throw ParseError(line_no, "duplicate column '" + std::string(name) + "'");
                slot = i;
            };
            if (name == "id") assign(id_col);
            else if (name == "verdict") assign(verdict_col);
            else if (name == "class_label") assign(class_col);
            else if (name == "pair_key") assign(pair_col);
            else throw ParseError(line_no, "unknown column '" + std::string(name) + "'");
        }
        break;
    }
    if (columns == 0) throw ParseError(line_no == 0 ? 1 : line_no, "missing CSV header");
    if (!id_col || !verdict_col) throw ParseError(line_no, "CSV header must name 'id' and 'verdict'");

    std::vector<EvaluationRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (is_blank(line)) continue;
        const auto fields = split_csv_line(line, line_no);
        if (fields.size() != columns) {
            throw ParseError(line_no, "expected " + std::to_string(columns) + " fields, found " +
                                          std::to_string(fields.size()));
        }
        EvaluationRecord rec;
        rec.line = line_no;
        rec.id = std::string(trim(fields[*id_col]));
        rec.verdict = parse_verdict_text(fields[*verdict_col], line_no);
        if (class_col) rec.class_label = optional_text(fields[*class_col]);
        if (pair_col) rec.pair_key = optional_text(fields[*pair_col]);
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<EvaluationRecord> parse_jsonl(std::istream& in) {
    std::vector<EvaluationRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (is_blank(line)) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) throw ParseError(line_no, "expected a JSON object");

        EvaluationRecord rec;
        rec.line = line_no;
        rec.id = optional_json_string(obj, "id", line_no).value_or(std::string{});
        auto v = obj.find("verdict");
        if (v == obj.end()) throw ParseError(line_no, "missing 'verdict'");
        if (!v->is_number_integer() || (v->get<long long>() != 0 && v->get<long long>() != 1)) {
            throw ParseError(line_no, "verdict '" + v->dump() + "' is not 0 or 1");
        }
        rec.verdict = static_cast<std::uint8_t>(v->get<long long>());
        rec.class_label = optional_json_string(obj, "class_label", line_no);
        rec.pair_key = optional_json_string(obj, "pair_key", line_no);
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<EvaluationRecord> load_records(const std::filesystem::path& path, InputFormat format) {
    if (format == InputFormat::automatic) format = detect_format(path);
    auto in = open_or_throw(path);
    try {
        return format == InputFormat::csv ? parse_csv(in) : parse_jsonl(in);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), e.detail(), path.filename().string());
    }
}

ObservationSet to_observation_set(std::span<const EvaluationRecord> records, std::string label) {
    std::vector<std::uint8_t> verdicts;
    verdicts.reserve(records.size());
    for (const auto& r : records) verdicts.push_back(r.verdict);
    return ObservationSet(std::move(verdicts), std::move(label));
}

ObservationSet load_observations(const std::filesystem::path& path, InputFormat format,
                                 std::optional<std::string> label) {
    const auto records = load_records(path, format);
    return to_observation_set(records, label.value_or(path.stem().string()));
}

JointObservationSet join_pairs(std::span<const EvaluationRecord> control,
                               std::span<const EvaluationRecord> treatment) {
    auto index = [](std::span<const EvaluationRecord> records, std::string_view arm) {
        std::unordered_map<std::string, std::uint8_t> by_key;
        for (const auto& r : records) {
            if (!r.pair_key) {
                throw InvalidInput(std::string(arm) + " record on line " + std::to_string(r.line) +
                                   " has no pair_key");
            }
            if (!by_key.emplace(*r.pair_key, r.verdict).second) {
                throw InvalidInput("duplicate pair_key '" + *r.pair_key + "' in " + std::string(arm) + " (line " +
                                   std::to_string(r.line) + ")");
            }
        }
        return by_key;
    };
    index(control, "control");
    const auto treatment_by_key = index(treatment, "treatment");

    std::vector<JointObservationSet::Pair> pairs;
    pairs.reserve(control.size());
    for (const auto& r : control) {
        auto it = treatment_by_key.find(*r.pair_key);
        if (it == treatment_by_key.end()) {
            throw InvalidInput("pair_key '" + *r.pair_key + "' is missing from the treatment arm");
        }
        pairs.emplace_back(r.verdict, it->second);
    }
    if (treatment.size() != control.size()) {
        std::set<std::string_view> control_keys;
        for (const auto& r : control) control_keys.insert(*r.pair_key);
        for (const auto& r : treatment) {
            if (!control_keys.contains(*r.pair_key)) {
                throw InvalidInput("pair_key '" + *r.pair_key + "' is missing from the control arm");
            }
        }
    }
    return JointObservationSet(std::move(pairs));
}

JointObservationSet load_joint_observations(const std::filesystem::path& control,
                                            const std::filesystem::path& treatment, InputFormat format) {
    const auto c = load_records(control, format);
    const auto t = load_records(treatment, format);
    return join_pairs(c, t);
}

std::vector<std::string> class_labels(std::span<const EvaluationRecord> records) {
    std::vector<std::string> labels;
    labels.reserve(records.size());
    for (const auto& r : records) {
        if (!r.class_label) {
            throw InvalidInput("record on line " + std::to_string(r.line) + " has no class_label");
        }
        labels.push_back(*r.class_label);
    }
    return labels;
}

AnyProfile parse_profile(const json& doc) {
    if (!doc.is_object()) throw InvalidInput("profile must be a JSON object");
    const bool binary = doc.contains("precision") || doc.contains("false_omission_rate");
    const bool multi = doc.contains("classes") || doc.contains("conditional_positive");
    if (binary && multi) {
        throw AmbiguousInput("profile has both binary and multi-class fields");
    }
    if (binary) {
        return MetricModelProfile(probability_field(doc, "precision"), probability_field(doc, "false_omission_rate"));
    }
    if (multi) {
        if (!doc.contains("classes") || !doc.contains("conditional_positive")) {
            throw InvalidInput("multi-class profile needs both 'classes' and 'conditional_positive'");
        }
        try {
            std::vector<std::string> classes;
            for (const auto& c : doc.at("classes")) {
                classes.push_back(c.is_string() ? c.get<std::string>() : c.dump());
            }
            return MultiClassProfile(std::move(classes), doc.at("conditional_positive").get<std::vector<double>>());
        } catch (const json::exception& e) {
            throw InvalidInput(std::string("malformed multi-class profile: ") + e.what());
        }
    }
    throw InvalidInput("profile needs {precision, false_omission_rate} or {classes, conditional_positive}");
}

AnyProfile load_profile(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInput("profile '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_profile(doc);
}

json profile_to_json(const AnyProfile& profile) {
    if (const auto* binary = std::get_if<MetricModelProfile>(&profile)) {
        return {{"precision", binary->precision()}, {"false_omission_rate", binary->false_omission_rate()}};
    }
    const auto& multi = std::get<MultiClassProfile>(profile);
    return {{"classes", multi.classes()}, {"conditional_positive", multi.conditional_positive()}};
}

}  // namespace metricsig
