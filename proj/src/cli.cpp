#include "metricsig/cli.hpp"

#include "metricsig/errors.hpp"
#include "metricsig/io.hpp"
#include "metricsig/report.hpp"
#include "metricsig/simulation.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <vector>

namespace metricsig {

namespace {

constexpr const char* kSeedEnv = "METRICSIG_SEED";

struct CompareOptions {
    std::string control;
    std::string treatment;
    std::string profile;
    std::string format = "auto";
    bool paired = false;
    std::optional<double> alpha;
    std::optional<double> z;
    std::string center = "observed";
    bool paper_sign = false;
    std::string output = "text";
    std::string out_path;
};

struct SimulateOptions {
    double rate_c = 0.0;
    double rate_t = 0.0;
    double precision = 1.0;
    double false_omission_rate = 0.0;
    std::size_t n = 0;
    std::size_t trials = 0;
    std::optional<std::uint64_t> seed;
    bool paired = false;
    double rho = 0.0;
    std::optional<double> alpha;
    std::optional<double> z;
    unsigned threads = 1;
    std::string output = "json";
    std::string out_path;
};

void emit(const std::string& body, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << body;
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw InvalidInput("cannot write '" + out_path + "'");
    file << body;
}

void echo_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
    for (const auto& w : warnings) err << "warning: " << w << '\n';
}

ArmEcho echo_arm(const ObservationSet& set) {
    return {set.label(), set.size(), set.positives(), {}};
}

std::vector<std::size_t> class_counts(const std::vector<double>& distribution, std::size_t n) {
    std::vector<std::size_t> counts;
    counts.reserve(distribution.size());
    for (double p : distribution) {
        counts.push_back(static_cast<std::size_t>(std::llround(p * static_cast<double>(n))));
    }
    return counts;
}

int run_compare(const CompareOptions& opt, std::ostream& out, std::ostream& err) {
    std::vector<std::string> warnings;
    const InputFormat format = parse_input_format(opt.format);
    const AnyProfile profile = load_profile(opt.profile);

    ReportDocument doc;
    auto& in = doc.inputs;
    in.profile = profile;
    in.config = SignificanceConfig::resolve(opt.alpha, opt.z, warnings);
    in.center_mode = parse_center_mode(opt.center);
    in.covariance_sign = opt.paper_sign ? CovarianceSign::additive : CovarianceSign::standard;

    const auto control_records = load_records(opt.control, format);
    const auto treatment_records = load_records(opt.treatment, format);
    const std::string control_label = std::filesystem::path(opt.control).stem().string();
    const std::string treatment_label = std::filesystem::path(opt.treatment).stem().string();

    if (opt.paired) {
        const auto* binary = std::get_if<MetricModelProfile>(&profile);
        if (!binary) throw InvalidInput("paired comparisons need a binary metric model profile");
        const auto joint = join_pairs(control_records, treatment_records);
        doc.result = compare_paired(joint, *binary, in.config, in.center_mode, in.covariance_sign);
        doc.result.control.label = control_label;
        doc.result.treatment.label = treatment_label;
        in.joint_counts = joint.counts();
        in.control = echo_arm(joint.control(control_label));
        in.treatment = echo_arm(joint.treatment(treatment_label));
    } else {
        if (opt.paper_sign) warnings.push_back("--paper-sign has no effect without --paired");
        const auto control = to_observation_set(control_records, control_label);
        const auto treatment = to_observation_set(treatment_records, treatment_label);
        in.control = echo_arm(control);
        in.treatment = echo_arm(treatment);
        if (const auto* multi = std::get_if<MultiClassProfile>(&profile)) {
            const auto dist_c = class_distribution(class_labels(control_records), *multi);
            const auto dist_t = class_distribution(class_labels(treatment_records), *multi);
            in.control.class_counts = class_counts(dist_c, control.size());
            in.treatment.class_counts = class_counts(dist_t, treatment.size());
            doc.result = compare_independent_multiclass(control, dist_c, treatment, dist_t, *multi, in.config,
                                                        in.center_mode);
        } else {
            doc.result = compare_independent(control, treatment, std::get<MetricModelProfile>(profile), in.config,
                                             in.center_mode);
        }
    }

    doc.warnings = warnings;
    doc.warnings.insert(doc.warnings.end(), doc.result.warnings.begin(), doc.result.warnings.end());
    echo_warnings(doc.warnings, err);

    const std::string body = opt.output == "json" ? to_json(doc).dump(2) + "\n" : render_text(doc);
    emit(body, opt.out_path, out);
    return kExitOk;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
        try {
            std::size_t used = 0;
            const auto value = std::stoull(env, &used, 10);
            if (used == std::string(env).size()) return value;
        } catch (const std::exception&) {
        }
        throw InvalidInput(std::string(kSeedEnv) + "='" + env + "' is not an unsigned integer");
    }
    return 0;
}

int run_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
    std::vector<std::string> warnings;
    SimulationSpec spec;
    spec.rate_control = opt.rate_c;
    spec.rate_treatment = opt.rate_t;
    spec.profile = MetricModelProfile(opt.precision, opt.false_omission_rate);
    spec.n = opt.n;
    spec.trials = opt.trials;
    spec.seed = resolve_seed(opt.seed);
    spec.paired = opt.paired;
    spec.rho = opt.rho;
    spec.config = SignificanceConfig::resolve(opt.alpha, opt.z, warnings);
    spec.threads = opt.threads;
    spec.validate();

    SimulationReport report = validate_variance(spec);
    report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
    echo_warnings(report.warnings, err);

    const std::string body =
        opt.output == "json" ? to_json(report, spec).dump(2) + "\n" : render_text(report, spec);
    emit(body, opt.out_path, out);
    return kExitOk;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Significance tests for comparisons scored by an imperfect classifier", "metricsig"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    CompareOptions cmp;
    auto* compare = app.add_subcommand("compare", "Compare two systems and report both confidence intervals");
    compare->add_option("--control", cmp.control, "Control arm verdicts (.csv or .jsonl)")->required();
    compare->add_option("--treatment", cmp.treatment, "Treatment arm verdicts (.csv or .jsonl)")->required();
    compare->add_option("--profile", cmp.profile, "Metric model profile JSON")->required();
    compare->add_option("--format", cmp.format, "Input format")->check(CLI::IsMember({"auto", "csv", "jsonl"}));
    compare->add_flag("--paired", cmp.paired, "Join arms on pair_key and include the covariance term");
    compare->add_option("--alpha", cmp.alpha, "Significance level; z from the normal quantile");
    compare->add_option("--z", cmp.z, "Explicit critical value (wins over --alpha)");
    compare->add_option("--center", cmp.center, "Centre of the corrected interval")
        ->check(CLI::IsMember({"observed", "corrected"}));
    compare->add_flag("--paper-sign", cmp.paper_sign, "Compose paired variance with +2 Cov");
    compare->add_option("--output", cmp.output, "Report format")->check(CLI::IsMember({"json", "text"}));
    compare->add_option("--out", cmp.out_path, "Write the report to a file instead of stdout");

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of the analytic variance and coverage");
    simulate->add_option("--rate-c", sim.rate_c, "Observed positive rate, control")->required();
    simulate->add_option("--rate-t", sim.rate_t, "Observed positive rate, treatment")->required();
    simulate->add_option("--precision", sim.precision, "Metric model precision")->required();
    simulate->add_option("--for", sim.false_omission_rate, "Metric model false omission rate")->required();
    simulate->add_option("--n", sim.n, "Samples per arm")->required();
    simulate->add_option("--trials", sim.trials, "Number of trials")->required();
    simulate->add_option("--seed", sim.seed, std::string("RNG seed (default: $") + kSeedEnv + ", then 0)");
    auto* paired_flag = simulate->add_flag("--paired", sim.paired, "Draw correlated verdict pairs");
    simulate->add_option("--rho", sim.rho, "Correlation of paired observed verdicts")->needs(paired_flag);
    simulate->add_option("--alpha", sim.alpha, "Significance level");
    simulate->add_option("--z", sim.z, "Explicit critical value (wins over --alpha)");
    simulate->add_option("--threads", sim.threads, "Worker threads (does not change results)");
    simulate->add_option("--output", sim.output, "Report format")->check(CLI::IsMember({"json", "text"}));
    simulate->add_option("--out", sim.out_path, "Write the report to a file instead of stdout");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
            return app.exit(e, out, err);
        }
        err << "error: " << e.what() << "\n\n";
        const CLI::App* failed = compare->parsed() ? compare : simulate->parsed() ? simulate : &app;
        err << failed->help();
        return kExitInputError;
    }

    try {
        if (compare->parsed()) return run_compare(cmp, out, err);
        return run_simulate(sim, out, err);
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternalError;
    }
}

}  // namespace metricsig
