#include "tirever/error.hpp"
#include "tirever/hp_filter.hpp"
#include "tirever/montecarlo.hpp"
#include "tirever/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tirever;

namespace {

constexpr std::uint64_t kFallbackSeed = 20240101;

std::uint64_t default_seed() {
    const char* env = std::getenv("TIREVER_SEED");
    if (!env || !*env) return kFallbackSeed;
    std::uint64_t seed = 0;
    const std::string text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw DataError("TIREVER_SEED must be a non-negative integer, got '" + text + "'");
    return seed;
}

ColumnRef column_ref(const std::string& column) {
    if (column == "-1") return -1;
    if (!column.empty() && column.find_first_not_of("0123456789") == std::string::npos)
        return std::stoi(column);
    return column;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file '" + path.string() + "'");
    out << text;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// detect

struct DetectArgs {
    std::string input;
    std::string column = "-1";
    std::string strategy = "2";
    bool detrend = false;
    std::string freq = "unspecified";
    std::optional<double> lambda;
    int exponent = 4;
    std::string ic = "bic";
    double alpha = 0.05;
    double normality_alpha = 0.05;
    bool no_normality_gate = false;
    std::optional<int> order;
    std::optional<int> max_order;
    int k = 2;
    std::string rr_variance = "block_bootstrap";
    int bootstrap_reps = 500;
    std::optional<std::uint64_t> seed;
};

json options_json(const DetectArgs& a, std::uint64_t seed) {
    json j = {{"column", a.column},
              {"strategy", to_string(parse_strategy(a.strategy))},
              {"detrend", a.detrend},
              {"frequency", a.freq},
              {"lambda_exponent", a.exponent},
              {"criterion", a.ic},
              {"alpha", a.alpha},
              {"normality_alpha", a.normality_alpha},
              {"normality_gate", !a.no_normality_gate},
              {"rr_lag", a.k},
              {"rr_variance", a.rr_variance},
              {"bootstrap_reps", a.bootstrap_reps},
              {"seed", seed}};
    j["lambda"] = a.lambda ? json(*a.lambda) : json(nullptr);
    j["known_order"] = a.order ? json(*a.order) : json(nullptr);
    j["max_order"] = a.max_order ? json(*a.max_order) : json(nullptr);
    return j;
}

DetectArgs args_from_report(const json& report) {
    const json& o = report.at("options");
    DetectArgs a;
    a.input = report.at("input").at("path").get<std::string>();
    a.column = o.at("column").get<std::string>();
    a.strategy = o.at("strategy").get<std::string>();
    a.detrend = o.at("detrend").get<bool>();
    a.freq = o.at("frequency").get<std::string>();
    if (!o.at("lambda").is_null()) a.lambda = o.at("lambda").get<double>();
    a.exponent = o.at("lambda_exponent").get<int>();
    a.ic = o.at("criterion").get<std::string>();
    a.alpha = o.at("alpha").get<double>();
    a.normality_alpha = o.at("normality_alpha").get<double>();
    a.no_normality_gate = !o.at("normality_gate").get<bool>();
    if (!o.at("known_order").is_null()) a.order = o.at("known_order").get<int>();
    if (!o.at("max_order").is_null()) a.max_order = o.at("max_order").get<int>();
    a.k = o.at("rr_lag").get<int>();
    a.rr_variance = o.at("rr_variance").get<std::string>();
    a.bootstrap_reps = o.at("bootstrap_reps").get<int>();
    a.seed = o.at("seed").get<std::uint64_t>();
    return a;
}

struct DetectRun {
    PipelineResult result;
    json report;
};

DetectRun run_detect(const DetectArgs& a) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t seed = a.seed.value_or(default_seed());
    const Frequency freq = parse_frequency(a.freq);
    const TimeSeries series = load_csv(a.input, column_ref(a.column), freq);

    PipelineOptions opts;
    opts.strategy = parse_strategy(a.strategy);
    opts.detrend = a.detrend;
    opts.lambda = a.lambda;
    opts.lambda_exponent = a.exponent;
    opts.strategy_options.criterion = parse_criterion(a.ic);
    opts.strategy_options.alpha = a.alpha;
    opts.strategy_options.normality_alpha = a.normality_alpha;
    opts.strategy_options.normality_gate = !a.no_normality_gate;
    opts.strategy_options.known_order = a.order;
    opts.strategy_options.max_order = a.max_order;
    opts.rr_lag = a.k;
    opts.rr_options.method = parse_rr_variance(a.rr_variance);
    opts.rr_options.bootstrap_reps = a.bootstrap_reps;
    opts.rr_options.seed = seed;

    DetectRun run{run_pipeline(series, opts), {}};
    run.report = {{"tool", "tirever"},
                  {"command", "detect"},
                  {"version", kVersion},
                  {"input",
                   {{"path", fs::absolute(a.input).string()},
                    {"column", a.column},
                    {"frequency", to_string(freq)},
                    {"length", series.size()}}},
                  {"options", options_json(a, seed)},
                  {"seed", seed},
                  {"result", to_json(run.result)},
                  {"duration_seconds", seconds_since(start)}};
    return run;
}

int cmd_detect(const DetectArgs& a, const std::string& out) {
    const DetectRun run = run_detect(a);
    std::cout << render(run.result, parse_criterion(a.ic));
    if (!out.empty()) {
        write_file(out, run.report.dump(2) + "\n");
        std::cout << "report written to " << out << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::optional<int> r;
    std::optional<int> s;
    std::vector<double> phi;
    std::vector<double> varphi;
    double nu = 3.0;
    double gamma = 1.0;
    double sigma = 1.0;
    long length = 0;
    long burn_in = kDefaultBurnIn;
    std::optional<std::uint64_t> seed;
    std::string trend = "none";
    double delta = TrendOverlay{}.delta;
    double noise_sd = TrendOverlay{}.noise_sd;
    std::string out;
};

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string list_string(const Eigen::VectorXd& v) {
    std::ostringstream ss;
    ss << '[';
    for (Eigen::Index i = 0; i < v.size(); ++i) ss << (i ? ", " : "") << v[i];
    ss << ']';
    return ss.str();
}

int cmd_simulate(const SimulateArgs& a) {
    if (a.r && *a.r != static_cast<int>(a.phi.size()))
        throw DataError("--r " + std::to_string(*a.r) + " needs " + std::to_string(*a.r) +
                        " value(s) in --phi, got " + std::to_string(a.phi.size()));
    if (a.s && *a.s != static_cast<int>(a.varphi.size()))
        throw DataError("--s " + std::to_string(*a.s) + " needs " + std::to_string(*a.s) +
                        " value(s) in --varphi, got " + std::to_string(a.varphi.size()));
    if (a.length < 1) throw DataError("--T must be positive");
    if (a.trend != "none" && a.trend != "rwd") throw DataError("--trend must be none or rwd");

    const MarSpec spec{to_vector(a.phi), to_vector(a.varphi), {a.nu, a.gamma, a.sigma}};
    spec.validate();
    const std::uint64_t seed = a.seed.value_or(default_seed());
    RandomStream rng(seed);
    TimeSeries series = mar_simulate(spec, a.length, a.burn_in, rng);
    if (a.trend == "rwd") series = add_random_walk_drift(series, {a.delta, a.noise_sd}, rng);

    std::ostream& echo = a.out.empty() ? std::cerr : std::cout;
    echo << "MAR(" << spec.r() << "," << spec.s() << ") phi=" << list_string(spec.phi)
         << " varphi=" << list_string(spec.varphi) << " nu=" << a.nu << " gamma=" << a.gamma
         << " sigma=" << a.sigma << " T=" << a.length << " burn-in=" << a.burn_in
         << " trend=" << a.trend << " seed=" << seed << "\n";
    if (a.out.empty()) {
        write_csv(std::cout, series);
    } else {
        write_csv(a.out, series);
        echo << "wrote " << series.size() << " rows to " << a.out << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// hpfilter

struct HpArgs {
    std::string input;
    std::string column = "-1";
    std::optional<double> lambda;
    std::string freq;
    int exponent = 4;
    std::string out;
};

int cmd_hpfilter(const HpArgs& a) {
    if (!a.lambda && a.freq.empty()) throw DataError("hpfilter needs --lambda or --freq");
    const Frequency freq = a.freq.empty() ? Frequency::unspecified : parse_frequency(a.freq);
    const TimeSeries series = load_csv(a.input, column_ref(a.column), freq);
    const double lambda = a.lambda ? *a.lambda : hp_lambda(freq, a.exponent);
    const HpDecomposition d = hp_decompose(series, lambda);
    const double gap =
        (series.values() - d.trend.values() - d.cycle.values()).cwiseAbs().maxCoeff();

    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out);
        if (!file) throw DataError("cannot write file '" + a.out + "'");
    }
    std::ostream& csv = a.out.empty() ? std::cout : file;
    std::ostream& log = a.out.empty() ? std::cerr : std::cout;
    csv << "index,value,trend,cycle\n" << std::setprecision(17);
    for (Eigen::Index t = 0; t < series.size(); ++t)
        csv << t + 1 << ',' << series[t] << ',' << d.trend[t] << ',' << d.cycle[t] << '\n';
    log << "lambda = " << lambda << "\n"
        << "max |value - trend - cycle| = " << std::setprecision(3) << gap << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// montecarlo

struct McArgs {
    std::string config;
    std::optional<int> reps;
    int jobs = 1;
    std::string out;
};

struct McRun {
    std::vector<McCell> cells;
    std::string csv;
    std::string markdown;
};

McRun run_montecarlo(const json& config_json, int jobs) {
    const McConfig config = parse_mc_config(config_json.dump());
    config.validate();
    McRun run;
    for (Eigen::Index t : config.sample_sizes) {
        for (Strategy s : config.strategies) {
            const auto start = std::chrono::steady_clock::now();
            run.cells.push_back(run_cell(config, t, s, jobs));
            const McCell& c = run.cells.back();
            std::cerr << config.dgp_name << " T=" << t << " " << to_string(s) << ": "
                      << c.detections << "/" << c.n_effective << " detected, " << c.failures
                      << " failed (" << std::fixed << std::setprecision(1)
                      << seconds_since(start) << " s)\n"
                      << std::defaultfloat;
        }
    }
    run.csv = cells_to_csv(run.cells);
    run.markdown = cells_to_markdown(config, run.cells);
    return run;
}

json load_config_json(const std::string& path, std::optional<int> reps) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw DataError("config: malformed JSON: " + std::string(e.what()));
    }
    if (reps) {
        if (!j.is_object()) throw DataError("config: expected a JSON object");
        j["n_reps"] = *reps;
    }
    return j;
}

int cmd_montecarlo(const McArgs& a) {
    if (a.jobs < 1) throw DataError("--jobs must be at least 1");
    const auto start = std::chrono::steady_clock::now();
    const json config = load_config_json(a.config, a.reps);
    const McRun run = run_montecarlo(config, a.jobs);
    const std::string prefix = a.out.empty() ? fs::path(a.config).stem().string() : a.out;
    write_file(prefix + ".csv", run.csv);
    write_file(prefix + ".md", run.markdown);
    json cells = json::array();
    for (const auto& c : run.cells) cells.push_back(to_json(c));
    const json report = {{"tool", "tirever"},
                         {"command", "montecarlo"},
                         {"version", kVersion},
                         {"input", {{"config", fs::absolute(a.config).string()}}},
                         {"options", {{"config", config}}},
                         {"seed", config.value("master_seed", json(nullptr))},
                         {"result", cells},
                         {"duration_seconds", seconds_since(start)}};
    write_file(prefix + ".json", report.dump(2) + "\n");
    std::cout << run.markdown;
    return 0;
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const std::string& path) {
    json report;
    try {
        report = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw DataError("report: malformed JSON: " + std::string(e.what()));
    }
    json recorded, fresh;
    try {
        const std::string command = report.at("command").get<std::string>();
        recorded = report.at("result");
        if (command == "detect") {
            fresh = run_detect(args_from_report(report)).report.at("result");
        } else if (command == "montecarlo") {
            const McRun run = run_montecarlo(report.at("options").at("config"), 1);
            fresh = json::array();
            for (const auto& c : run.cells) fresh.push_back(to_json(c));
        } else {
            throw DataError("report: unknown command '" + command + "'");
        }
    } catch (const json::exception& e) {
        throw DataError("report: " + std::string(e.what()));
    }
    // Round-trip through text so both sides carry the same number representation.
    if (json::parse(fresh.dump()) == recorded) {
        std::cout << "reproduced: " << path << "\n";
        return 0;
    }
    std::cout << "MISMATCH: " << path << "\nrecorded: " << recorded.dump()
              << "\nre-run:   " << fresh.dump() << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-reversibility detection with mixed causal-noncausal autoregressions"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    DetectArgs detect;
    std::string detect_out;
    auto* d = app.add_subcommand("detect", "Classify a series as time reversible or irreversible");
    d->add_option("input", detect.input, "CSV file")->required();
    d->add_option("--column", detect.column, "Column name, zero-based index, or -1 for the last")->capture_default_str();
    d->add_option("--strategy", detect.strategy, "1, 2 or rr")->capture_default_str();
    d->add_flag("--detrend", detect.detrend, "Remove an HP trend first");
    d->add_option("--freq", detect.freq, "annual, quarterly or monthly");
    d->add_option("--lambda", detect.lambda, "HP smoothing parameter (overrides --freq)");
    d->add_option("--exponent", detect.exponent, "Frequency-rule exponent, 2 or 4")->capture_default_str();
    d->add_option("--ic", detect.ic, "aic or bic")->capture_default_str();
    d->add_option("--alpha", detect.alpha, "Test level")->capture_default_str();
    d->add_option("--normality-alpha", detect.normality_alpha, "Jarque-Bera level")->capture_default_str();
    d->add_flag("--no-normality-gate", detect.no_normality_gate, "Fit the MAR grid even for Gaussian-looking residuals");
    d->add_option("--order", detect.order, "Known autoregressive order p (skips selection)");
    d->add_option("--max-order", detect.max_order, "Largest p tried by order selection");
    d->add_option("--k", detect.k, "Bicovariance lag for --strategy rr")->capture_default_str();
    d->add_option("--rr-variance", detect.rr_variance, "block_bootstrap or iid_plugin")->capture_default_str();
    d->add_option("--bootstrap-reps", detect.bootstrap_reps, "Bootstrap replications")->capture_default_str();
    d->add_option("--seed", detect.seed, "Seed (default: TIREVER_SEED)");
    d->add_option("--out", detect_out, "Write a JSON report");

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Simulate a MAR(r,s) series with skewed Student's-t errors");
    s->add_option("--r", sim.r, "Causal order");
    s->add_option("--s", sim.s, "Noncausal order");
    s->add_option("--phi", sim.phi, "Causal coefficients, comma separated")->delimiter(',');
    s->add_option("--varphi", sim.varphi, "Noncausal coefficients, comma separated")->delimiter(',');
    s->add_option("--nu", sim.nu, "Degrees of freedom")->capture_default_str();
    s->add_option("--gamma", sim.gamma, "Skewness")->capture_default_str();
    s->add_option("--sigma", sim.sigma, "Scale")->capture_default_str();
    s->add_option("--T", sim.length, "Length")->required();
    s->add_option("--burnin", sim.burn_in, "Burn-in on each side")->capture_default_str();
    s->add_option("--seed", sim.seed, "Seed (default: TIREVER_SEED)");
    s->add_option("--trend", sim.trend, "none or rwd (random walk with drift)")->capture_default_str();
    s->add_option("--delta", sim.delta, "Drift of the rwd trend")->capture_default_str();
    s->add_option("--noise-sd", sim.noise_sd, "Noise of the rwd trend")->capture_default_str();
    s->add_option("--out", sim.out, "Output CSV (default: stdout)");

    HpArgs hp;
    auto* h = app.add_subcommand("hpfilter", "Hodrick-Prescott trend/cycle decomposition");
    h->add_option("input", hp.input, "CSV file")->required();
    h->add_option("--column", hp.column, "Column name, zero-based index, or -1 for the last")->capture_default_str();
    h->add_option("--lambda", hp.lambda, "Smoothing parameter");
    h->add_option("--freq", hp.freq, "annual, quarterly or monthly");
    h->add_option("--exponent", hp.exponent, "Frequency-rule exponent, 2 or 4")->capture_default_str();
    h->add_option("--out", hp.out, "Output CSV (default: stdout)");

    McArgs mc;
    auto* m = app.add_subcommand("montecarlo", "Detection frequencies over simulated replications");
    m->add_option("--config", mc.config, "JSON experiment description")->required();
    m->add_option("--reps", mc.reps, "Override n_reps");
    m->add_option("--jobs", mc.jobs, "Worker threads")->capture_default_str();
    m->add_option("--out", mc.out, "Output prefix for .csv, .md and .json");

    std::string verify_path;
    auto* v = app.add_subcommand("verify", "Re-run a JSON report and compare the result");
    v->add_option("report", verify_path, "Report written by detect or montecarlo")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*d) return cmd_detect(detect, detect_out);
        if (*s) return cmd_simulate(sim);
        if (*h) return cmd_hpfilter(hp);
        if (*m) return cmd_montecarlo(mc);
        if (*v) return cmd_verify(verify_path);
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
