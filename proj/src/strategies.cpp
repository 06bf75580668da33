#include "tirever/strategies.hpp"
#include "tirever/error.hpp"
#include "tirever/hp_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tirever {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::reversible_gaussian: return "reversible_gaussian";
        case Verdict::reversible: return "reversible";
        case Verdict::irreversible: return "irreversible";
    }
    return "?";
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::s1: return "s1";
        case Strategy::s2: return "s2";
        case Strategy::rr: return "rr";
    }
    return "?";
}

std::string to_string(Criterion c) { return c == Criterion::aic ? "aic" : "bic"; }

std::string to_string(RrVariance m) {
    return m == RrVariance::iid_plugin ? "iid_plugin" : "block_bootstrap";
}

Verdict parse_verdict(const std::string& s) {
    if (s == "reversible_gaussian") return Verdict::reversible_gaussian;
    if (s == "reversible") return Verdict::reversible;
    if (s == "irreversible") return Verdict::irreversible;
    throw DataError("unknown verdict '" + s + "'");
}

Strategy parse_strategy(const std::string& s) {
    if (s == "1" || s == "s1") return Strategy::s1;
    if (s == "2" || s == "s2") return Strategy::s2;
    if (s == "rr") return Strategy::rr;
    throw DataError("unknown strategy '" + s + "' (expected 1, 2 or rr)");
}

Criterion parse_criterion(const std::string& s) {
    if (s == "aic") return Criterion::aic;
    if (s == "bic") return Criterion::bic;
    throw DataError("unknown information criterion '" + s + "' (expected aic or bic)");
}

RrVariance parse_rr_variance(const std::string& s) {
    if (s == "iid_plugin" || s == "iid") return RrVariance::iid_plugin;
    if (s == "block_bootstrap" || s == "bootstrap") return RrVariance::block_bootstrap;
    throw DataError("unknown RR variance method '" + s + "'");
}

int default_max_order(Eigen::Index length) {
    const double t = static_cast<double>(length);
    const int rule = static_cast<int>(std::floor(12.0 * std::pow(t / 100.0, 0.25)));
    const int tenth = static_cast<int>(length / 10);
    return std::max(1, std::min(rule, tenth));
}

PseudoCausalOrder select_pseudo_causal_order(const TimeSeries& series, int p_max, Criterion criterion) {
    if (p_max < 1) throw DataError("maximum pseudo-causal order must be at least 1");
    if (series.size() < p_max + 20)
        throw DataError("series of length " + std::to_string(series.size()) +
                        " too short for order search up to " + std::to_string(p_max));
    const Eigen::VectorXd y = demean(series).values();
    const double n = static_cast<double>(y.size() - p_max);
    const double penalty = criterion == Criterion::aic ? 2.0 : std::log(n);

    PseudoCausalOrder best;
    best.criterion_values.resize(p_max);
    double best_value = std::numeric_limits<double>::infinity();
    for (int p = 1; p <= p_max; ++p) {
        OlsAr fit = fit_ols_ar(y, p, p_max);
        if (!(fit.residual_variance > 0.0)) throw NumericError("zero residual variance in AR fit");
        const double value = n * std::log(fit.residual_variance) + penalty * p;
        best.criterion_values[p - 1] = value;
        if (value < best_value) {
            best_value = value;
            best.p = p;
            best.coefficients = std::move(fit.coefficients);
            best.residuals = std::move(fit.residuals);
        }
    }
    return best;
}

TrVerdict screen_and_fit(const TimeSeries& series, const StrategyOptions& options) {
    const TimeSeries y = demean(series);
    TrVerdict out;
    Eigen::VectorXd residuals;
    if (options.known_order) {
        const int p = *options.known_order;
        if (p < 1) throw DataError("known order must be at least 1");
        out.p_selected = p;
        residuals = fit_ols_ar(y.values(), p, p).residuals;
    } else {
        const int p_max = options.max_order.value_or(default_max_order(y.size()));
        auto order = select_pseudo_causal_order(y, p_max, options.criterion);
        out.p_selected = order.p;
        residuals = std::move(order.residuals);
    }
    out.normality = jarque_bera(residuals);
    if (options.normality_gate && out.normality.p_value >= options.normality_alpha) {
        out.verdict = Verdict::reversible_gaussian;
        return out;
    }
    // An odd order cannot split into r == s; widen by one so the restricted model is available.
    out.p_grid = out.p_selected + (out.p_selected % 2);
    out.fits = mar_grid(y, out.p_grid, options.criterion);
    return out;
}

TrVerdict decide_strategy1(TrVerdict v, Criterion criterion) {
    v.strategy = Strategy::s1;
    if (v.fits.empty()) return v;
    std::size_t best = 0;
    std::optional<std::size_t> restricted, best_unrestricted;
    for (std::size_t i = 0; i < v.fits.size(); ++i) {
        const double c = v.fits[i].criterion(criterion);
        if (c < v.fits[best].criterion(criterion)) best = i;
        if (v.fits[i].restricted) {
            restricted = i;
        } else if (!best_unrestricted || c < v.fits[*best_unrestricted].criterion(criterion)) {
            best_unrestricted = i;
        }
    }
    v.selected = best;
    v.verdict = v.fits[best].restricted ? Verdict::reversible : Verdict::irreversible;
    if (restricted && best_unrestricted)
        v.decisive_statistic = v.fits[*best_unrestricted].criterion(criterion) -
                               v.fits[*restricted].criterion(criterion);
    return v;
}

TrVerdict decide_strategy2(TrVerdict v, double alpha) {
    v.strategy = Strategy::s2;
    if (v.fits.empty()) return v;
    std::optional<std::size_t> best, restricted;
    for (std::size_t i = 0; i < v.fits.size(); ++i) {
        const MarFit& f = v.fits[i];
        if (f.restricted) {
            restricted = i;
            continue;
        }
        if (!best || f.loglik > v.fits[*best].loglik ||
            (f.loglik == v.fits[*best].loglik && f.s() > v.fits[*best].s()))
            best = i;
    }
    v.selected = best;
    const MarFit& chosen = v.fits[*best];
    if (chosen.r() != chosen.s() || !restricted) {
        v.verdict = Verdict::irreversible;
        return v;
    }
    // LR test of phi == varphi: s restrictions. Clamped at zero against rounding.
    const double lr = std::max(0.0, 2.0 * (chosen.loglik - v.fits[*restricted].loglik));
    v.decisive_statistic = lr;
    v.decisive_df = chosen.s();
    v.decisive_p_value = chisq_sf(lr, chosen.s());
    v.verdict = *v.decisive_p_value < alpha ? Verdict::irreversible : Verdict::reversible;
    return v;
}

TrVerdict strategy1(const TimeSeries& series, const StrategyOptions& options) {
    if (series.size() < 50) throw DataError("strategy 1 needs at least 50 observations");
    return decide_strategy1(screen_and_fit(series, options), options.criterion);
}

TrVerdict strategy2(const TimeSeries& series, const StrategyOptions& options) {
    if (series.size() < 50) throw DataError("strategy 2 needs at least 50 observations");
    if (!(options.alpha > 0.0 && options.alpha < 1.0))
        throw DataError("significance level must lie in (0, 1)");
    return decide_strategy2(screen_and_fit(series, options), options.alpha);
}

// ---------------------------------------------------------------------------
// Symmetric bicovariance test

namespace {

// Sum of v in pairs (v[i] + v[n-1-i]); invariant to reversing v exactly.
double mirrored_sum(const Eigen::Ref<const Eigen::VectorXd>& v) {
    const Eigen::Index n = v.size();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n / 2; ++i) sum += v[i] + v[n - 1 - i];
    if (n % 2 == 1) sum += v[n / 2];
    return sum;
}

Eigen::VectorXd bicovariance_terms(const Eigen::Ref<const Eigen::VectorXd>& x, int k) {
    const Eigen::Index m = x.size() - k;
    const auto lead = x.tail(m).array();
    const auto lag = x.head(m).array();
    return (lead * lag * (lead - lag)).matrix();
}

}  // namespace

double symmetric_bicovariance(const Eigen::Ref<const Eigen::VectorXd>& x, int k) {
    if (k < 1 || k >= x.size()) throw DataError("bicovariance lag out of range");
    return mirrored_sum(bicovariance_terms(x, k)) / static_cast<double>(x.size() - k);
}

RrReport rr_test(const TimeSeries& series, int k, const RrOptions& options) {
    const Eigen::Index t_len = series.size();
    if (k < 1) throw DataError("RR lag k must be positive");
    if (t_len <= k + 10)
        throw DataError("RR test needs more than k + 10 observations");

    const Eigen::VectorXd& raw = series.values();
    const double n = static_cast<double>(t_len);
    const double mean = mirrored_sum(raw) / n;
    const Eigen::VectorXd centered = raw.array() - mean;
    const double var = mirrored_sum(centered.array().square().matrix()) / n;
    if (!(var > 1e-24 * (raw.squaredNorm() / n + std::numeric_limits<double>::min())))
        throw DataError("RR test: degenerate (zero) variance");
    const Eigen::VectorXd y = centered / std::sqrt(var);

    RrReport rep;
    rep.k = k;
    rep.method = options.method;
    const Eigen::Index m = t_len - k;
    const double inv = 1.0 / static_cast<double>(m);
    rep.b21 = (y.tail(m).array().square() * y.head(m).array()).sum() * inv;
    rep.b12 = (y.tail(m).array() * y.head(m).array().square()).sum() * inv;
    const Eigen::VectorXd terms = bicovariance_terms(y, k);
    rep.gamma_hat = mirrored_sum(terms) * inv;

    if (options.method == RrVariance::iid_plugin) {
        // Var of the mean of x_t = y_t y_{t-k}(y_t - y_{t-k}) for i.i.d. y,
        // including the lag-k autocovariance -m2^3 of the products.
        const double m2 = y.array().square().mean();
        const double m3 = y.array().cube().mean();
        const double m4 = y.array().square().square().mean();
        rep.variance_hat = 2.0 * inv * (m4 * m2 - m3 * m3 - m2 * m2 * m2);
    } else {
        if (options.bootstrap_reps < 2) throw DataError("bootstrap needs at least 2 resamples");
        const auto block = static_cast<Eigen::Index>(std::ceil(std::cbrt(n)));
        RandomStream rng = RandomStream::derive(options.seed, {0x5252ull, static_cast<std::uint64_t>(k)});
        std::uniform_int_distribution<Eigen::Index> start(0, m - 1);
        Eigen::VectorXd means(options.bootstrap_reps);
        for (int b = 0; b < options.bootstrap_reps; ++b) {
            double sum = 0.0;
            Eigen::Index filled = 0;
            while (filled < m) {
                Eigen::Index pos = start(rng);
                for (Eigen::Index j = 0; j < block && filled < m; ++j, ++filled) {
                    sum += terms[pos];
                    if (++pos == m) pos = 0;
                }
            }
            means[b] = sum * inv;
        }
        const double centre = means.mean();
        rep.variance_hat = (means.array() - centre).square().sum() / (options.bootstrap_reps - 1);
    }
    if (!(rep.variance_hat > 0.0)) throw DataError("RR test: degenerate variance estimate");
    rep.z_statistic = rep.gamma_hat / std::sqrt(rep.variance_hat);
    rep.p_value = 2.0 * normal_sf(std::abs(rep.z_statistic));
    return rep;
}

// ---------------------------------------------------------------------------

PipelineResult run_pipeline(const TimeSeries& series, const PipelineOptions& options) {
    PipelineResult result;
    TimeSeries work = series;
    if (options.detrend) {
        const double lambda = options.lambda ? *options.lambda
                                             : hp_lambda(series.frequency(), options.lambda_exponent);
        const HpDecomposition dec = hp_decompose(series, lambda);
        const double input_scale =
            (series.values().array() - series.values().mean()).matrix().norm() + series.values().norm();
        if (dec.cycle.values().norm() <= 1e-9 * input_scale)
            throw DataError("degenerate variance: the HP cycle of this series is numerically zero");
        work = dec.cycle;
        result.detrended = true;
        result.lambda = lambda;
    }
    work = demean(work);
    switch (options.strategy) {
        case Strategy::s1: result.outcome = strategy1(work, options.strategy_options); break;
        case Strategy::s2: result.outcome = strategy2(work, options.strategy_options); break;
        case Strategy::rr: result.outcome = rr_test(work, options.rr_lag, options.rr_options); break;
    }
    return result;
}

}  // namespace tirever
