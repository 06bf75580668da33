#pragma once

#include "tirever/mar_model.hpp"
#include "tirever/strategies.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tirever {

/// Random walk with drift added to the simulated cycle:
/// X_t = X_{t-1} + delta + eta_t, eta_t ~ N(0, noise_sd^2), X_0 = 0.
struct TrendOverlay {
    double delta = 0.05;
    double noise_sd = 1.0;
};

/// Adds X_t = X_{t-1} + delta + noise_sd * eta_t, X_0 = 0, to the series.
TimeSeries add_random_walk_drift(const TimeSeries& series, const TrendOverlay& trend,
                                 RandomStream& rng);

struct McConfig {
    std::string dgp_name;
    MarSpec dgp;
    std::optional<TrendOverlay> trend;
    std::vector<Eigen::Index> sample_sizes;
    int n_reps = 200;
    std::vector<Strategy> strategies;
    bool p_known = true;
    std::optional<double> detrend_lambda;
    std::uint64_t master_seed = 1;
    double alpha = 0.05;
    Criterion criterion = Criterion::bic;
    int rr_lag = 2;
    RrVariance rr_method = RrVariance::block_bootstrap;
    Eigen::Index burn_in = kDefaultBurnIn;
    /// Simulated innovations are Student's-t by construction, so replications
    /// skip the Jarque-Bera screen unless asked.
    bool normality_gate = false;

    /// Throws DataError naming the offending field.
    void validate() const;
};

struct McCell {
    std::string dgp;
    Eigen::Index sample_size = 0;
    Strategy strategy = Strategy::s2;
    int detections = 0;
    int n_effective = 0;  ///< replications that completed
    int failures = 0;     ///< replications that raised an error
    /// detections / n_effective; NaN when nothing completed.
    double frequency() const;
};

/// Outcome of one replication: 1 detected, 0 not detected, -1 failed.
int run_replication(const McConfig& config, Eigen::Index sample_size, Strategy strategy, int rep);

/// Replications are distributed over `jobs` workers; each replication owns a
/// stream derived from (master_seed, T, strategy, rep), so the result does not
/// depend on the worker count.
McCell run_cell(const McConfig& config, Eigen::Index sample_size, Strategy strategy, int jobs = 1);

/// Cells for sample_sizes x strategies, in that order.
std::vector<McCell> run_table(const McConfig& config, int jobs = 1);

/// Parses the JSON experiment description; errors name the field.
McConfig parse_mc_config(const std::string& json_text);

std::string cells_to_csv(const std::vector<McCell>& cells);
std::string cells_to_markdown(const McConfig& config, const std::vector<McCell>& cells);

}  // namespace tirever
