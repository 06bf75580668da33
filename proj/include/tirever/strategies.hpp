#pragma once

#include "tirever/distributions.hpp"
#include "tirever/mar_model.hpp"
#include "tirever/rng.hpp"
#include "tirever/series.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tirever {

enum class Verdict { reversible_gaussian, reversible, irreversible };
enum class Strategy { s1, s2, rr };
enum class RrVariance { iid_plugin, block_bootstrap };

std::string to_string(Verdict v);
std::string to_string(Strategy s);
std::string to_string(Criterion c);
std::string to_string(RrVariance m);
Verdict parse_verdict(const std::string& s);
Strategy parse_strategy(const std::string& s);  ///< "1"/"s1", "2"/"s2", "rr"
Criterion parse_criterion(const std::string& s);
RrVariance parse_rr_variance(const std::string& s);

/// min(floor(12 (T/100)^(1/4)), floor(T/10)), at least 1.
int default_max_order(Eigen::Index length);

struct PseudoCausalOrder {
    int p = 1;
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residuals;
    Eigen::VectorXd criterion_values;  ///< entry p-1 holds the criterion of AR(p)
};

/// OLS AR(p) for p = 1..p_max on the demeaned series over a common sample
/// starting at t = p_max + 1; returns the criterion minimiser.
PseudoCausalOrder select_pseudo_causal_order(const TimeSeries& series, int p_max, Criterion criterion);

struct StrategyOptions {
    Criterion criterion = Criterion::bic;
    double alpha = 0.05;             ///< level of the likelihood-ratio test
    double normality_alpha = 0.05;   ///< level of the Jarque-Bera gate
    bool normality_gate = true;      ///< false fits the MAR grid unconditionally
    std::optional<int> known_order;  ///< skip pseudo-causal order selection
    std::optional<int> max_order;    ///< p_max for order selection
};

struct TrVerdict {
    Verdict verdict = Verdict::reversible_gaussian;
    Strategy strategy = Strategy::s1;
    int p_selected = 0;  ///< pseudo-causal order
    int p_grid = 0;      ///< MAR grid order (p_selected rounded up to even); 0 when gated
    NormalityReport normality;
    std::vector<MarFit> fits;  ///< sorted by the criterion; empty when Gaussian
    std::optional<std::size_t> selected;  ///< index into fits
    std::optional<double> decisive_statistic;
    std::optional<double> decisive_p_value;
    std::optional<int> decisive_df;
};

/// Steps shared by both strategies: order selection, normality gate, and
/// the MAR grid. `fits` is empty when the normality gate is not rejected.
TrVerdict screen_and_fit(const TimeSeries& series, const StrategyOptions& options);

/// Strategy 1 decision on a screened verdict: reversible iff the restricted
/// model minimises the criterion. decisive_statistic is the best unrestricted
/// criterion minus the restricted one.
TrVerdict decide_strategy1(TrVerdict screened, Criterion criterion);

/// Strategy 2 decision: the max-likelihood unrestricted model; if r != s the
/// series is irreversible, otherwise an LR test of phi == varphi with s df.
TrVerdict decide_strategy2(TrVerdict screened, double alpha);

TrVerdict strategy1(const TimeSeries& series, const StrategyOptions& options = {});
TrVerdict strategy2(const TimeSeries& series, const StrategyOptions& options = {});

struct RrReport {
    int k = 2;
    double gamma_hat = 0.0;
    double b21 = 0.0;
    double b12 = 0.0;
    double variance_hat = 0.0;  ///< variance of gamma_hat
    double z_statistic = 0.0;
    double p_value = 1.0;
    RrVariance method = RrVariance::block_bootstrap;
};

/// (T-k)^-1 sum_{t=k+1}^{T} x_t x_{t-k} (x_t - x_{t-k}) on the raw values.
/// Summed in pairs from both ends, so a palindrome gives exactly zero and
/// reversal flips the sign exactly.
double symmetric_bicovariance(const Eigen::Ref<const Eigen::VectorXd>& x, int k);

struct RrOptions {
    RrVariance method = RrVariance::block_bootstrap;
    int bootstrap_reps = 500;
    std::uint64_t seed = 0;
};

/// Symmetric-bicovariance test of time reversibility at lag k on the
/// demeaned, unit-variance series; two-sided normal p-value.
RrReport rr_test(const TimeSeries& series, int k, const RrOptions& options = {});

struct PipelineOptions {
    Strategy strategy = Strategy::s2;
    bool detrend = false;
    std::optional<double> lambda;  ///< overrides the frequency rule
    int lambda_exponent = 4;
    StrategyOptions strategy_options;
    int rr_lag = 2;
    RrOptions rr_options;
};

struct PipelineResult {
    std::variant<TrVerdict, RrReport> outcome;
    bool detrended = false;
    std::optional<double> lambda;
};

/// Optional HP detrending, demeaning, then the chosen strategy. A cycle that
/// is numerically zero raises DataError (degenerate variance).
PipelineResult run_pipeline(const TimeSeries& series, const PipelineOptions& options);

}  // namespace tirever
