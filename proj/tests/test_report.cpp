#include "metricsig/cli.hpp"
#include "metricsig/errors.hpp"
#include "metricsig/report.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace metricsig;
using nlohmann::json;
using testing_support::TempDir;

namespace {

void expect_results_match(const json& results, const ComparisonResult& r) {
    constexpr double tol = 1e-12;
    EXPECT_NEAR(results.at("ate").get<double>(), r.ate, tol);
    EXPECT_NEAR(results.at("model_center").get<double>(), r.model_center, tol);
    EXPECT_NEAR(results.at("variance_diff_deterministic").get<double>(), r.variance_diff_deterministic, tol);
    EXPECT_NEAR(results.at("variance_diff_model").get<double>(), r.variance_diff_model, tol);
    EXPECT_NEAR(results.at("ci_deterministic").at("lower").get<double>(), r.ci_deterministic.lower, tol);
    EXPECT_NEAR(results.at("ci_deterministic").at("upper").get<double>(), r.ci_deterministic.upper, tol);
    EXPECT_NEAR(results.at("ci_model").at("lower").get<double>(), r.ci_model.lower, tol);
    EXPECT_NEAR(results.at("ci_model").at("upper").get<double>(), r.ci_model.upper, tol);
    EXPECT_EQ(results.at("reject_deterministic").get<bool>(), r.reject_deterministic);
    EXPECT_EQ(results.at("reject_model").get<bool>(), r.reject_model);
    EXPECT_NEAR(results.at("control").at("true_rate").get<double>(), r.control.true_rate, tol);
    EXPECT_NEAR(results.at("treatment").at("variance_model").get<double>(), r.treatment.model.value, tol);
    if (r.covariance_model) {
        EXPECT_NEAR(results.at("covariance_model").get<double>(), *r.covariance_model, tol);
        EXPECT_NEAR(results.at("covariance_deterministic").get<double>(), *r.covariance_deterministic, tol);
    } else {
        EXPECT_FALSE(results.contains("covariance_model"));
    }
}

json run_json(const std::vector<std::string>& extra) {
    std::vector<std::string> args{"metricsig", "compare", "--output", "json"};
    args.insert(args.end(), extra.begin(), extra.end());
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    EXPECT_EQ(code, kExitOk) << err.str();
    return json::parse(out.str());
}

void expect_round_trip(const json& doc) {
    const auto inputs = inputs_from_json(doc);
    expect_results_match(doc.at("results"), evaluate(inputs));
}

}  // namespace

TEST(Report, IndependentRoundTrip) {
    TempDir dir;
    const auto c = dir.write("c.csv", testing_support::verdict_csv(23679, 108));
    const auto t = dir.write("t.csv", testing_support::verdict_csv(23679, 56));
    const auto p = dir.write("p.json", R"({"precision":0.8897,"false_omission_rate":0.22769})");
    const auto doc = run_json({"--control", c.string(), "--treatment", t.string(), "--profile", p.string()});
    expect_round_trip(doc);

    EXPECT_EQ(doc.at("schema_version"), kReportSchemaVersion);
    EXPECT_EQ(doc.at("tool").at("name"), "metricsig");
    EXPECT_EQ(doc.at("command"), "compare");
    EXPECT_EQ(doc.at("inputs").at("control").at("n"), 23679);
    EXPECT_EQ(doc.at("inputs").at("control").at("positives"), 108);
    EXPECT_EQ(doc.at("inputs").at("control").at("label"), "c");
    EXPECT_FALSE(doc.at("inputs").at("paired").get<bool>());
    EXPECT_EQ(doc.at("inputs").at("config").at("center_mode"), "observed");
    EXPECT_TRUE(doc.at("results").at("reject_deterministic").get<bool>());
    EXPECT_FALSE(doc.at("results").at("reject_model").get<bool>());
}

TEST(Report, CorrectedCenterRoundTrip) {
    TempDir dir;
    const auto c = dir.write("c.jsonl", "{\"id\":\"a\",\"verdict\":1}\n{\"id\":\"b\",\"verdict\":0}\n{\"id\":\"c\",\"verdict\":0}\n");
    const auto t = dir.write("t.jsonl", "{\"id\":\"a\",\"verdict\":1}\n{\"id\":\"b\",\"verdict\":1}\n{\"id\":\"c\",\"verdict\":0}\n");
    const auto p = dir.write("p.json", R"({"precision":0.7,"false_omission_rate":0.1})");
    const auto doc = run_json({"--control", c.string(), "--treatment", t.string(), "--profile", p.string(), "--center",
                               "corrected", "--alpha", "0.01"});
    expect_round_trip(doc);
    EXPECT_EQ(doc.at("inputs").at("config").at("center_mode"), "corrected");
    EXPECT_NEAR(doc.at("inputs").at("config").at("critical_value").get<double>(), 2.5758293035489, 1e-12);
}

TEST(Report, PairedRoundTripBothSigns) {
    TempDir dir;
    std::string c = "id,verdict,pair_key\n", t = "id,verdict,pair_key\n";
    for (int i = 0; i < 200; ++i) {
        c += "c" + std::to_string(i) + "," + std::to_string(i % 3 == 0) + ",k" + std::to_string(i) + "\n";
        t += "t" + std::to_string(i) + "," + std::to_string(i % 3 == 0 || i % 7 == 0) + ",k" + std::to_string(i) + "\n";
    }
    const auto cp = dir.write("c.csv", c);
    const auto tp = dir.write("t.csv", t);
    const auto p = dir.write("p.json", R"({"precision":0.85,"false_omission_rate":0.15})");
    for (bool paper : {false, true}) {
        std::vector<std::string> args{"--control", cp.string(), "--treatment", tp.string(), "--profile", p.string(),
                                      "--paired"};
        if (paper) args.push_back("--paper-sign");
        const auto doc = run_json(args);
        expect_round_trip(doc);
        EXPECT_TRUE(doc.at("inputs").at("paired").get<bool>());
        EXPECT_EQ(doc.at("inputs").at("config").at("covariance_sign"), paper ? "additive" : "standard");
        const auto& jc = doc.at("inputs").at("joint_counts");
        EXPECT_EQ(jc.at("n00").get<int>() + jc.at("n01").get<int>() + jc.at("n10").get<int>() + jc.at("n11").get<int>(),
                  200);
        EXPECT_EQ(jc.at("n10"), 0);
        EXPECT_TRUE(doc.at("results").contains("covariance_model"));
    }
}

TEST(Report, MultiClassRoundTrip) {
    TempDir dir;
    std::string c = "id,verdict,class_label\n", t = "id,verdict,class_label\n";
    const char* classes[] = {"none", "mild", "severe"};
    for (int i = 0; i < 90; ++i) {
        c += "c" + std::to_string(i) + "," + std::to_string(i % 4 == 0) + "," + classes[i % 3] + "\n";
        t += "t" + std::to_string(i) + "," + std::to_string(i % 2 == 0) + "," + classes[(i % 5) % 3] + "\n";
    }
    const auto cp = dir.write("c.csv", c);
    const auto tp = dir.write("t.csv", t);
    const auto p = dir.write("p.json", R"({"classes":["none","mild","severe"],"conditional_positive":[0.05,0.5,0.9]})");
    const auto doc = run_json({"--control", cp.string(), "--treatment", tp.string(), "--profile", p.string()});
    expect_round_trip(doc);
    EXPECT_EQ(doc.at("inputs").at("control").at("class_counts"), json::array({30, 30, 30}));
    EXPECT_EQ(doc.at("inputs").at("profile").at("classes").size(), 3u);
}

TEST(Report, RejectsUnknownSchema) {
    json doc = {{"schema_version", 99}, {"inputs", json::object()}};
    EXPECT_THROW(inputs_from_json(doc), InvalidInput);
    EXPECT_THROW(inputs_from_json(json{{"schema_version", 1}}), InvalidInput);
}

TEST(Report, TextShowsBothIntervalsAndConclusions) {
    ReportDocument doc;
    doc.inputs.control = {"baseline", 23679, 108, {}};
    doc.inputs.treatment = {"candidate", 23679, 56, {}};
    doc.inputs.profile = MetricModelProfile(0.8897, 0.22769);
    doc.result = evaluate(doc.inputs);
    const auto text = render_text(doc);
    EXPECT_NE(text.find("baseline"), std::string::npos);
    EXPECT_NE(text.find("candidate"), std::string::npos);
    EXPECT_NE(text.find("-0.002196"), std::string::npos);
    EXPECT_NE(text.find("-0.0032541"), std::string::npos);
    EXPECT_NE(text.find("0.0053844"), std::string::npos);
}

TEST(Report, SimulationJsonEchoesSpec) {
    SimulationSpec spec;
    spec.rate_control = 0.1;
    spec.rate_treatment = 0.2;
    spec.profile = MetricModelProfile(0.9, 0.2);
    spec.n = 100;
    spec.trials = 10;
    spec.seed = 5;
    const auto report = validate_variance(spec);
    const auto doc = to_json(report, spec);
    EXPECT_EQ(doc.at("command"), "simulate");
    EXPECT_EQ(doc.at("inputs").at("seed"), 5);
    EXPECT_EQ(doc.at("results").at("trials_used"), 10);
    EXPECT_FALSE(doc.at("inputs").contains("threads"));
    EXPECT_FALSE(doc.at("warnings").empty());
    EXPECT_FALSE(render_text(report, spec).empty());
}
