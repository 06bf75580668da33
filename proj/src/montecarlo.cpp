#include "tirever/montecarlo.hpp"
#include "tirever/error.hpp"
#include "tirever/hp_filter.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

namespace tirever {

void McConfig::validate() const {
    try {
        dgp.validate();
    } catch (const DataError& e) {
        throw DataError(std::string("config field 'dgp': ") + e.what());
    }
    if (sample_sizes.empty()) throw DataError("config field 'T_list' must be a non-empty list");
    for (const auto t : sample_sizes)
        if (t < 50) throw DataError("config field 'T_list': sample sizes must be at least 50");
    if (n_reps < 1) throw DataError("config field 'n_reps' must be at least 1");
    if (strategies.empty()) throw DataError("config field 'strategy_set' must be a non-empty list");
    if (trend && !detrend_lambda)
        throw DataError("config field 'detrend_lambda' is required when a trend overlay is present");
    if (detrend_lambda && !(*detrend_lambda > 0.0))
        throw DataError("config field 'detrend_lambda' must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DataError("config field 'alpha' must lie in (0, 1)");
    if (rr_lag < 1) throw DataError("config field 'rr_lag' must be positive");
    if (burn_in < 1) throw DataError("config field 'burn_in' must be positive");
    if (trend && !(trend->noise_sd >= 0.0))
        throw DataError("config field 'dgp.trend.noise_sd' must be non-negative");
}

double McCell::frequency() const {
    return n_effective > 0 ? static_cast<double>(detections) / n_effective
                           : std::numeric_limits<double>::quiet_NaN();
}

TimeSeries add_random_walk_drift(const TimeSeries& series, const TrendOverlay& trend,
                                 RandomStream& rng) {
    Eigen::VectorXd y = series.values();
    double level = 0.0;
    for (Eigen::Index t = 0; t < y.size(); ++t) {
        level += trend.delta + trend.noise_sd * rng.normal();
        y[t] += level;
    }
    return series.with_values(std::move(y));
}

int run_replication(const McConfig& config, Eigen::Index sample_size, Strategy strategy, int rep) {
    RandomStream rng = RandomStream::derive(
        config.master_seed, {static_cast<std::uint64_t>(sample_size),
                             static_cast<std::uint64_t>(strategy), static_cast<std::uint64_t>(rep)});
    try {
        TimeSeries series = mar_simulate(config.dgp, sample_size, config.burn_in, rng);
        if (config.trend) series = add_random_walk_drift(series, *config.trend, rng);
        if (config.detrend_lambda) series = hp_decompose(series, *config.detrend_lambda).cycle;
        series = demean(series);

        if (strategy == Strategy::rr) {
            RrOptions rr{config.rr_method, 500, rng()};
            return rr_test(series, config.rr_lag, rr).p_value < config.alpha ? 1 : 0;
        }
        StrategyOptions opts;
        opts.criterion = config.criterion;
        opts.alpha = config.alpha;
        opts.normality_gate = config.normality_gate;
        if (config.p_known) opts.known_order = config.dgp.r() + config.dgp.s();
        const TrVerdict v = strategy == Strategy::s1 ? strategy1(series, opts) : strategy2(series, opts);
        return v.verdict == Verdict::irreversible ? 1 : 0;
    } catch (const std::exception&) {
        return -1;
    }
}

McCell run_cell(const McConfig& config, Eigen::Index sample_size, Strategy strategy, int jobs) {
    config.validate();
    std::vector<int> outcomes(static_cast<std::size_t>(config.n_reps), -1);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < config.n_reps; i = next++)
            outcomes[static_cast<std::size_t>(i)] = run_replication(config, sample_size, strategy, i);
    };
    const int workers = std::clamp(jobs, 1, config.n_reps);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    McCell cell{config.dgp_name, sample_size, strategy};
    for (const int o : outcomes) {
        if (o < 0) {
            ++cell.failures;
        } else {
            ++cell.n_effective;
            cell.detections += o;
        }
    }
    return cell;
}

std::vector<McCell> run_table(const McConfig& config, int jobs) {
    config.validate();
    std::vector<McCell> cells;
    for (const auto t : config.sample_sizes)
        for (const auto s : config.strategies) cells.push_back(run_cell(config, t, s, jobs));
    return cells;
}

// ---------------------------------------------------------------------------
// JSON configuration

namespace {

using nlohmann::json;

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) throw DataError("config: missing required field '" + path + key + "'");
    return j.at(key);
}

template <typename T>
T get_as(const json& j, const std::string& field) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw DataError("config field '" + field + "' has the wrong type");
    }
}

Eigen::VectorXd coefficient_list(const json& dgp, const std::string& key) {
    if (!dgp.contains(key)) return Eigen::VectorXd(0);
    const auto v = get_as<std::vector<double>>(dgp.at(key), "dgp." + key);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

McConfig parse_mc_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw DataError("config must be a JSON object");

    McConfig c;
    const json& dgp = require(root, "dgp", "");
    if (!dgp.is_object()) throw DataError("config field 'dgp' must be an object");
    c.dgp_name = dgp.contains("name") ? get_as<std::string>(dgp.at("name"), "dgp.name") : "dgp";
    c.dgp.phi = coefficient_list(dgp, "phi");
    c.dgp.varphi = coefficient_list(dgp, "varphi");
    c.dgp.innovation.nu = get_as<double>(require(dgp, "nu", "dgp."), "dgp.nu");
    if (dgp.contains("gamma")) c.dgp.innovation.gamma = get_as<double>(dgp.at("gamma"), "dgp.gamma");
    if (dgp.contains("sigma")) c.dgp.innovation.sigma = get_as<double>(dgp.at("sigma"), "dgp.sigma");
    if (dgp.contains("trend")) {
        const json& tr = dgp.at("trend");
        const auto type = get_as<std::string>(require(tr, "type", "dgp.trend."), "dgp.trend.type");
        if (type == "random_walk_drift" || type == "rwd") {
            TrendOverlay overlay;
            if (tr.contains("delta")) overlay.delta = get_as<double>(tr.at("delta"), "dgp.trend.delta");
            if (tr.contains("noise_sd"))
                overlay.noise_sd = get_as<double>(tr.at("noise_sd"), "dgp.trend.noise_sd");
            c.trend = overlay;
        } else if (type != "none") {
            throw DataError("config field 'dgp.trend.type' must be 'none' or 'random_walk_drift'");
        }
    }

    for (const auto t : get_as<std::vector<long>>(require(root, "T_list", ""), "T_list"))
        c.sample_sizes.push_back(static_cast<Eigen::Index>(t));
    c.n_reps = get_as<int>(require(root, "n_reps", ""), "n_reps");
    for (const auto& s : get_as<std::vector<std::string>>(require(root, "strategy_set", ""), "strategy_set")) {
        try {
            c.strategies.push_back(parse_strategy(s));
        } catch (const DataError& e) {
            throw DataError(std::string("config field 'strategy_set': ") + e.what());
        }
    }
    c.p_known = get_as<bool>(require(root, "p_known", ""), "p_known");
    if (root.contains("detrend_lambda") && !root.at("detrend_lambda").is_null())
        c.detrend_lambda = get_as<double>(root.at("detrend_lambda"), "detrend_lambda");
    c.master_seed = get_as<std::uint64_t>(require(root, "master_seed", ""), "master_seed");
    c.alpha = get_as<double>(require(root, "alpha", ""), "alpha");
    if (root.contains("criterion")) {
        try {
            c.criterion = parse_criterion(get_as<std::string>(root.at("criterion"), "criterion"));
        } catch (const DataError& e) {
            throw DataError(std::string("config field 'criterion': ") + e.what());
        }
    }
    if (root.contains("rr_lag")) c.rr_lag = get_as<int>(root.at("rr_lag"), "rr_lag");
    if (root.contains("rr_variance")) {
        try {
            c.rr_method = parse_rr_variance(get_as<std::string>(root.at("rr_variance"), "rr_variance"));
        } catch (const DataError& e) {
            throw DataError(std::string("config field 'rr_variance': ") + e.what());
        }
    }
    if (root.contains("burn_in")) c.burn_in = get_as<long>(root.at("burn_in"), "burn_in");
    if (root.contains("normality_gate"))
        c.normality_gate = get_as<bool>(root.at("normality_gate"), "normality_gate");
    c.validate();
    return c;
}

std::string cells_to_csv(const std::vector<McCell>& cells) {
    std::ostringstream out;
    out << "dgp,T,strategy,frequency,n_effective,failures\n";
    for (const auto& c : cells) {
        out << c.dgp << ',' << c.sample_size << ',' << to_string(c.strategy) << ',';
        if (c.n_effective > 0)
            out << std::fixed << std::setprecision(6) << c.frequency() << std::defaultfloat;
        else
            out << "NA";
        out << ',' << c.n_effective << ',' << c.failures << '\n';
    }
    return out.str();
}

std::string cells_to_markdown(const McConfig& config, const std::vector<McCell>& cells) {
    auto header = [](Strategy s) {
        switch (s) {
            case Strategy::s1: return "Strategy 1";
            case Strategy::s2: return "Strategy 2";
            case Strategy::rr: return "RR bicovariance";
        }
        return "?";
    };
    std::ostringstream out;
    out << "### " << config.dgp_name << ": MAR(" << config.dgp.r() << "," << config.dgp.s() << ")";
    for (int i = 0; i < config.dgp.r(); ++i) out << ", phi_" << i + 1 << " = " << config.dgp.phi[i];
    for (int i = 0; i < config.dgp.s(); ++i) out << ", varphi_" << i + 1 << " = " << config.dgp.varphi[i];
    out << ", nu = " << config.dgp.innovation.nu << ", gamma = " << config.dgp.innovation.gamma << "\n\n";
    out << "|   |";
    for (const auto s : config.strategies) out << ' ' << header(s) << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < config.strategies.size(); ++i) out << "---:|";
    out << '\n';
    std::map<std::pair<Eigen::Index, Strategy>, const McCell*> index;
    for (const auto& c : cells) index[{c.sample_size, c.strategy}] = &c;
    for (const auto t : config.sample_sizes) {
        out << "| T=" << t << " |";
        for (const auto s : config.strategies) {
            const auto it = index.find({t, s});
            if (it == index.end() || it->second->n_effective == 0) {
                out << " NA |";
                continue;
            }
            out << ' ' << std::fixed << std::setprecision(1) << 100.0 * it->second->frequency()
                << std::defaultfloat << "%";
            if (it->second->failures > 0) out << " (" << it->second->failures << " failed)";
            out << " |";
        }
        out << '\n';
    }
    out << "\nFrequencies with which time irreversibility is detected; " << config.n_reps
        << " replications, " << (config.p_known ? "p known" : "p unknown");
    if (config.detrend_lambda)
        out << ", HP detrending with lambda = " << std::setprecision(10) << *config.detrend_lambda;
    out << ".\n";
    return out.str();
}

}  // namespace tirever
