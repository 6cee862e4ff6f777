#include "metricsig/cli.hpp"
#include "metricsig/errors.hpp"
#include "metricsig/estimator.hpp"
#include "metricsig/paired.hpp"
#include "metricsig/report.hpp"
#include "metricsig/simulation.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace metricsig;

namespace {

ObservationSet to_set(const std::vector<int>& verdicts, std::string label = {}) {
    return ObservationSet::from_ints(verdicts, std::move(label));
}

JointObservationSet to_joint(const std::vector<std::pair<int, int>>& pairs) {
    std::vector<JointObservationSet::Pair> narrowed;
    narrowed.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto [c, t] = pairs[i];
        if ((c != 0 && c != 1) || (t != 0 && t != 1)) {
            throw InvalidInput("pair at index " + std::to_string(i) + " must hold verdicts in {0, 1}");
        }
        narrowed.emplace_back(static_cast<std::uint8_t>(c), static_cast<std::uint8_t>(t));
    }
    return JointObservationSet(std::move(narrowed));
}

std::vector<int> widen(const ObservationSet& set) {
    return {set.verdicts().begin(), set.verdicts().end()};
}

}  // namespace

PYBIND11_MODULE(_metricsig, m) {
    m.doc() = "Confidence intervals for comparisons scored by an imperfect classifier";
    m.attr("__version__") = std::string(kToolVersion);

    auto base = py::register_exception<Error>(m, "MetricsigError", PyExc_RuntimeError);
    auto invalid = py::register_exception<InvalidInput>(m, "InvalidInputError", PyExc_ValueError);
    py::register_exception<InsufficientSamples>(m, "InsufficientSamplesError", invalid.ptr());
    py::register_exception<AmbiguousInput>(m, "AmbiguousInputError", invalid.ptr());
    py::register_exception<ParseError>(m, "ParseError", invalid.ptr());
    (void)base;

    py::class_<MetricModelProfile>(m, "MetricModelProfile")
        .def(py::init<double, double>(), py::arg("precision"), py::arg("false_omission_rate"))
        .def_static("perfect", &MetricModelProfile::perfect)
        .def_property_readonly("precision", &MetricModelProfile::precision)
        .def_property_readonly("false_omission_rate", &MetricModelProfile::false_omission_rate)
        .def_property_readonly("pathological", &MetricModelProfile::pathological)
        .def("__repr__", [](const MetricModelProfile& p) {
            std::ostringstream s;
            s << "MetricModelProfile(precision=" << p.precision() << ", false_omission_rate="
              << p.false_omission_rate() << ")";
            return s.str();
        });

    py::class_<MultiClassProfile>(m, "MultiClassProfile")
        .def(py::init<std::vector<std::string>, std::vector<double>>(), py::arg("classes"),
             py::arg("conditional_positive"))
        .def_property_readonly("classes", &MultiClassProfile::classes)
        .def_property_readonly("conditional_positive", &MultiClassProfile::conditional_positive);

    py::class_<SignificanceConfig>(m, "SignificanceConfig")
        .def(py::init<>())
        .def_static("from_alpha", &SignificanceConfig::from_alpha, py::arg("alpha"))
        .def_static("from_critical_value", &SignificanceConfig::from_critical_value, py::arg("critical_value"))
        .def_property_readonly("alpha", &SignificanceConfig::alpha)
        .def_property_readonly("critical_value", &SignificanceConfig::critical_value)
        .def_property_readonly("level", &SignificanceConfig::level);

    py::class_<VarianceEstimate>(m, "VarianceEstimate")
        .def_readonly("value", &VarianceEstimate::value)
        .def_property_readonly("method", [](const VarianceEstimate& v) { return std::string(to_string(v.method)); })
        .def_readonly("sample_count", &VarianceEstimate::sample_count);

    py::class_<ConfidenceInterval>(m, "ConfidenceInterval")
        .def_readonly("lower", &ConfidenceInterval::lower)
        .def_readonly("upper", &ConfidenceInterval::upper)
        .def_readonly("level", &ConfidenceInterval::level)
        .def("contains", &ConfidenceInterval::contains)
        .def("__repr__", [](const ConfidenceInterval& ci) {
            std::ostringstream s;
            s << "ConfidenceInterval(" << ci.lower << ", " << ci.upper << ")";
            return s.str();
        });

    py::class_<ArmSummary>(m, "ArmSummary")
        .def_readonly("label", &ArmSummary::label)
        .def_readonly("n", &ArmSummary::n)
        .def_readonly("observed_rate", &ArmSummary::observed_rate)
        .def_readonly("true_rate", &ArmSummary::true_rate)
        .def_readonly("deterministic", &ArmSummary::deterministic)
        .def_readonly("model", &ArmSummary::model);

    py::class_<ComparisonResult>(m, "ComparisonResult")
        .def_readonly("control", &ComparisonResult::control)
        .def_readonly("treatment", &ComparisonResult::treatment)
        .def_readonly("ate", &ComparisonResult::ate)
        .def_readonly("model_center", &ComparisonResult::model_center)
        .def_readonly("variance_diff_deterministic", &ComparisonResult::variance_diff_deterministic)
        .def_readonly("variance_diff_model", &ComparisonResult::variance_diff_model)
        .def_readonly("covariance_deterministic", &ComparisonResult::covariance_deterministic)
        .def_readonly("covariance_model", &ComparisonResult::covariance_model)
        .def_readonly("ci_deterministic", &ComparisonResult::ci_deterministic)
        .def_readonly("ci_model", &ComparisonResult::ci_model)
        .def_readonly("reject_deterministic", &ComparisonResult::reject_deterministic)
        .def_readonly("reject_model", &ComparisonResult::reject_model)
        .def_property_readonly("center_mode",
                               [](const ComparisonResult& r) { return std::string(to_string(r.center_mode)); })
        .def_readonly("paired", &ComparisonResult::paired)
        .def_readonly("warnings", &ComparisonResult::warnings);

    py::class_<JointDistribution>(m, "JointDistribution")
        .def_readonly("p", &JointDistribution::p)
        .def_property_readonly("control_rate", &JointDistribution::control_rate)
        .def_property_readonly("treatment_rate", &JointDistribution::treatment_rate)
        .def_static("from_correlation", &JointDistribution::from_correlation, py::arg("control_rate"),
                    py::arg("treatment_rate"), py::arg("rho"));

    m.def("estimate_mean", [](const std::vector<int>& v) { return estimate_mean(to_set(v)); }, py::arg("verdicts"));
    m.def("deterministic_variance", [](const std::vector<int>& v) { return deterministic_variance(to_set(v)); },
          py::arg("verdicts"));
    m.def("true_positive_rate", &true_positive_rate, py::arg("observed_rate"), py::arg("profile"));
    m.def("true_positive_rate_multiclass",
          [](const std::vector<double>& dist, const MultiClassProfile& p) {
              return true_positive_rate_multiclass(dist, p);
          },
          py::arg("observed_distribution"), py::arg("profile"));
    m.def("model_variance", &model_variance, py::arg("observed_rate"), py::arg("profile"), py::arg("n"));
    m.def("confidence_interval", &confidence_interval, py::arg("center"), py::arg("variance_sum"),
          py::arg("config") = SignificanceConfig{});

    m.def(
        "compare_independent",
        [](const std::vector<int>& control, const std::vector<int>& treatment, const MetricModelProfile& profile,
           const SignificanceConfig& config, const std::string& center_mode) {
            return compare_independent(to_set(control, "control"), to_set(treatment, "treatment"), profile, config,
                                       parse_center_mode(center_mode));
        },
        py::arg("control"), py::arg("treatment"), py::arg("profile"), py::arg("config") = SignificanceConfig{},
        py::arg("center_mode") = "observed");

    m.def("estimate_joint", [](const std::vector<std::pair<int, int>>& pairs) { return estimate_joint(to_joint(pairs)); },
          py::arg("pairs"));
    m.def("model_covariance", &model_covariance, py::arg("joint"), py::arg("profile_control"),
          py::arg("profile_treatment"), py::arg("n"));
    m.def(
        "compare_paired",
        [](const std::vector<std::pair<int, int>>& pairs, const MetricModelProfile& profile,
           const SignificanceConfig& config, const std::string& center_mode, bool paper_sign) {
            return compare_paired(to_joint(pairs), profile, config, parse_center_mode(center_mode),
                                  paper_sign ? CovarianceSign::additive : CovarianceSign::standard);
        },
        py::arg("pairs"), py::arg("profile"), py::arg("config") = SignificanceConfig{},
        py::arg("center_mode") = "observed", py::arg("paper_sign") = false);

    py::class_<SimulationSpec>(m, "SimulationSpec")
        .def(py::init([](double rate_control, double rate_treatment, const MetricModelProfile& profile,
                         std::size_t n, std::size_t trials, std::uint64_t seed, bool paired, double rho,
                         const SignificanceConfig& config, unsigned threads) {
                 SimulationSpec s;
                 s.rate_control = rate_control;
                 s.rate_treatment = rate_treatment;
                 s.profile = profile;
                 s.n = n;
                 s.trials = trials;
                 s.seed = seed;
                 s.paired = paired;
                 s.rho = rho;
                 s.config = config;
                 s.threads = threads;
                 s.validate();
                 return s;
             }),
             py::kw_only(), py::arg("rate_control"), py::arg("rate_treatment"), py::arg("profile"), py::arg("n"),
             py::arg("trials"), py::arg("seed") = 0, py::arg("paired") = false, py::arg("rho") = 0.0,
             py::arg("config") = SignificanceConfig{}, py::arg("threads") = 1)
        .def_readonly("rate_control", &SimulationSpec::rate_control)
        .def_readonly("rate_treatment", &SimulationSpec::rate_treatment)
        .def_readonly("n", &SimulationSpec::n)
        .def_readonly("trials", &SimulationSpec::trials)
        .def_readonly("seed", &SimulationSpec::seed);

    py::class_<ArmSimulationStats>(m, "ArmSimulationStats")
        .def_readonly("expected_true_rate", &ArmSimulationStats::expected_true_rate)
        .def_readonly("mean_of_true_means", &ArmSimulationStats::mean_of_true_means)
        .def_readonly("empirical_variance_of_true_mean", &ArmSimulationStats::empirical_variance_of_true_mean)
        .def_readonly("analytic_variance", &ArmSimulationStats::analytic_variance);

    py::class_<SimulationReport>(m, "SimulationReport")
        .def_readonly("control", &SimulationReport::control)
        .def_readonly("treatment", &SimulationReport::treatment)
        .def_readonly("target_true_ate", &SimulationReport::target_true_ate)
        .def_readonly("target_observed_ate", &SimulationReport::target_observed_ate)
        .def_readonly("ci_coverage_observed_center", &SimulationReport::ci_coverage_observed_center)
        .def_readonly("ci_coverage_corrected_center", &SimulationReport::ci_coverage_corrected_center)
        .def_readonly("naive_ci_coverage", &SimulationReport::naive_ci_coverage)
        .def_readonly("trials_used", &SimulationReport::trials_used)
        .def_readonly("seed", &SimulationReport::seed)
        .def_readonly("warnings", &SimulationReport::warnings);

    m.def(
        "simulate_trial",
        [](const SimulationSpec& spec, std::uint64_t trial_index) {
            const TrialDraw d = simulate_trial(spec, trial_index);
            py::dict out;
            out["control_observed"] = widen(d.control.observed);
            out["control_true"] = widen(d.control.truth);
            out["treatment_observed"] = widen(d.treatment.observed);
            out["treatment_true"] = widen(d.treatment.truth);
            return out;
        },
        py::arg("spec"), py::arg("trial_index"));
    m.def("validate_variance", &validate_variance, py::arg("spec"), py::call_guard<py::gil_scoped_release>());

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<std::string> argv{"metricsig"};
            argv.insert(argv.end(), args.begin(), args.end());
            std::ostringstream out, err;
            const int code = run_cli(argv, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line in-process; returns (exit_code, stdout, stderr).");
}
