#include "expforge/cli.hpp"

#include "expforge/config.hpp"
#include "expforge/errors.hpp"
#include "expforge/report.hpp"
#include "expforge/simulation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace expforge::cli {

namespace {

namespace fs = std::filesystem;

struct Flags {
    std::string config;
    std::optional<int> grid;
    std::optional<double> tol;
    std::string out;
    unsigned threads = 0;
    std::string path = "auto";
    // classify
    std::string sequence;
    std::string sequence_file;
    // simulate
    std::uint64_t seed = 0;
    std::vector<std::int64_t> lengths{100, 200, 400, 800};
    std::int64_t trials = 10000;
    std::size_t true_hypothesis = 1;
    // plot-data
    int plot_resolution = 100;
};

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("cannot write " + path);
    f << text;
}

SourcePath parse_path(const std::string& p) {
    if (p == "auto") return SourcePath::automatic;
    if (p == "avs") return SourcePath::arbitrarily_varying;
    if (p == "dms") return SourcePath::memoryless;
    throw InputError("--path must be one of auto, avs, dms");
}

std::size_t type_cap(const ModelConfig& cfg) {
    if (const char* env = std::getenv("EXPFORGE_TYPE_CAP"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0' || v == 0) throw ConfigError({"EXPFORGE_TYPE_CAP: expected a positive integer"});
        return static_cast<std::size_t>(v);
    }
    return cfg.numeric.type_cap;
}

std::vector<std::string> read_sequences(const Flags& f) {
    std::vector<std::string> out;
    if (!f.sequence.empty()) out.push_back(f.sequence);
    if (!f.sequence_file.empty()) {
        std::ifstream in(f.sequence_file);
        if (!in) throw InputError("cannot open " + f.sequence_file);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") != std::string::npos) out.push_back(line);
        }
    }
    if (out.empty()) throw InputError("classify needs --sequence or --sequence-file");
    return out;
}

int dispatch(const std::string& command, const Flags& f, std::ostream& out, std::ostream& err) {
    const ModelConfig cfg = parse_config(f.config);
    const HypothesisSet hs = cfg.hypothesis_set();
    EngineOptions opts;
    opts.tol = f.tol.value_or(cfg.numeric.tol);
    opts.path = parse_path(f.path);
    opts.threads = f.threads;
    opts.grid_cap = type_cap(cfg);
    if (!(opts.tol > 0.0)) throw InputError("--tol must be positive");
    const int grid = f.grid.value_or(cfg.numeric.grid_denominator);

    if (command == "classify") {
        const ExponentSpec spec = cfg.exponent_spec();
        std::string text;
        for (const auto& s : read_sequences(f))
            text += report::verdict_line(classify(hs.alphabet().parse(s), hs, spec, opts)) + "\n";
        write_text(f.out, text, out);
        return kOk;
    }
    if (command == "exponents") {
        const ExponentSpec spec = cfg.exponent_spec();
        const ExponentMatrix matrix = optimal_exponents(hs, spec, grid, opts);
        write_text(f.out, report::exponents_csv(matrix), out);
        for (const auto& d : matrix.diagnostics) err << "note: " << d << '\n';
        // The rejection entry must be the column minimum on instances that
        // meet the optimality preconditions.
        if (check_optimality_preconditions(hs, matrix, spec, opts).satisfied()) {
            const ReliabilityVector rv = reliability_vector(matrix);
            if (!rv.consistent()) {
                for (const auto& v : rv.violations) err << "consistency violation: " << v << '\n';
                return kConsistencyError;
            }
        }
        return kOk;
    }
    if (command == "check-region") {
        const ExponentSpec spec = cfg.exponent_spec();
        const RegionVerdict verdict = achievable_region_check(hs, spec, grid, opts);
        write_text(f.out, report::region_line(verdict) + "\n", out);
        for (const auto& failure : verdict.failures) err << failure.message << '\n';
        return kOk;
    }
    if (command == "check-optimality") {
        const ExponentSpec spec = cfg.exponent_spec();
        const ExponentMatrix matrix = optimal_exponents(hs, spec, grid, opts);
        write_text(f.out, report::preconditions_report(check_optimality_preconditions(hs, matrix, spec, opts)), out);
        return kOk;
    }
    if (command == "simulate") {
        TrialPlan plan;
        plan.hs = &hs;
        plan.spec = cfg.exponent_spec();
        if (f.true_hypothesis < 1 || f.true_hypothesis > hs.size()) throw InputError("--true is out of range");
        plan.true_m = f.true_hypothesis - 1;
        plan.lengths = f.lengths;
        plan.trials_per_cell = f.trials;
        plan.seed = f.seed;
        const ErrorRateEstimate est = estimate_error_rates(plan, opts);
        const fs::path dir = f.out.empty() ? fs::path(".") : fs::path(f.out);
        fs::create_directories(dir);
        write_text((dir / "rates.csv").string(), report::rates_csv(est), out);
        write_text((dir / "fit.csv").string(), report::fit_csv(fit_decay(est)), out);
        return kOk;
    }
    if (command == "plot-data") {
        const std::optional<ExponentSpec> spec =
            cfg.thresholds ? std::optional<ExponentSpec>(cfg.exponent_spec()) : std::nullopt;
        const DivergenceField field = divergence_field(hs, f.plot_resolution, opts);
        write_text(f.out, report::plot_csv(hs, field, spec ? &*spec : nullptr), out);
        return kOk;
    }
    throw InputError("unknown command " + command);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multiple hypothesis testing with rejection: error exponents, decisions and simulation"};
    app.name("expforge");
    app.require_subcommand(1, 1);
    Flags f;

    const auto common = [&](CLI::App* sub, bool with_grid) {
        sub->add_option("--config", f.config, "JSON model file")->required();
        sub->add_option("--tol", f.tol, "projection tolerance, bits");
        sub->add_option("--threads", f.threads, "worker threads (0: all cores)");
        sub->add_option("--path", f.path, "divergence path: auto, avs or dms");
        if (with_grid) sub->add_option("--grid", f.grid, "simplex grid denominator");
    };

    auto* exponents = app.add_subcommand("exponents", "optimal exponents E*_{l,m}, E*_{R,m} as CSV");
    common(exponents, true);
    exponents->add_option("--out", f.out, "output CSV (default stdout)");

    auto* classify_cmd = app.add_subcommand("classify", "decide Accept(m) or Reject for sequences");
    common(classify_cmd, false);
    classify_cmd->add_option("--sequence", f.sequence, "inline symbol sequence");
    classify_cmd->add_option("--sequence-file", f.sequence_file, "newline-delimited sequences");
    classify_cmd->add_option("--out", f.out, "output file (default stdout)");

    auto* region = app.add_subcommand("check-region", "achievable-region membership of the configured thresholds");
    common(region, true);
    region->add_option("--out", f.out, "output file (default stdout)");

    auto* optimality = app.add_subcommand("check-optimality", "optimality preconditions report");
    common(optimality, true);
    optimality->add_option("--out", f.out, "output file (default stdout)");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo error rates and decay fits");
    common(simulate, false);
    simulate->add_option("--seed", f.seed, "64-bit seed");
    simulate->add_option("--lengths", f.lengths, "sequence lengths, strictly increasing")->delimiter(',');
    simulate->add_option("--trials", f.trials, "trials per (length, strategy) cell");
    simulate->add_option("--true", f.true_hypothesis, "true hypothesis, numbered from 1");
    simulate->add_option("--out", f.out, "output directory for rates.csv and fit.csv");

    auto* plot = app.add_subcommand("plot-data", "per-grid-point divergences as CSV");
    common(plot, false);
    plot->add_option("--plot-resolution", f.plot_resolution, "grid denominator for plotting");
    plot->add_option("--out", f.out, "output CSV (default stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return dispatch(command, f, out, err);
    } catch (const ConfigError& e) {
        for (const auto& issue : e.issues()) err << "config error: " << issue << '\n';
        return kConfigError;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ResourceError& e) {
        err << "resource cap: " << e.what() << '\n';
        return kResourceError;
    } catch (const ConsistencyError& e) {
        err << "consistency violation: " << e.what() << '\n';
        return kConsistencyError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
}

}  // namespace expforge::cli
