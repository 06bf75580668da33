#include "tirever/distributions.hpp"
#include "tirever/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace tirever {

void SkewedTParams::validate() const {
    if (!(std::isfinite(nu) && nu > 2.0))
        throw DataError("degrees of freedom must exceed 2 (got " + std::to_string(nu) + ")");
    if (!(std::isfinite(gamma) && gamma > 0.0))
        throw DataError("skewness parameter gamma must be positive");
    if (!(std::isfinite(sigma) && sigma > 0.0)) throw DataError("scale sigma must be positive");
}

double log_gamma(double x) { return std::lgamma(x); }

double digamma(double x) {
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv -
              inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132)))));
    return result;
}

namespace {

constexpr int kMaxIter = 1000;
constexpr double kEps = 1e-16;

// P(a, x) by its power series; converges fast for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Q(a, x) by modified Lentz continued fraction; used for x >= a + 1.
double gamma_q_fraction(double a, double x) {
    constexpr double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (x <= 0.0) return 0.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
    if (x <= 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_fraction(a, x);
}

double chisq_sf(double x, int df) {
    if (df < 1) throw DataError("chi-square degrees of freedom must be positive");
    if (!(x >= 0.0)) throw DataError("chi-square statistic must be non-negative");
    if (std::isinf(x)) return 0.0;
    return regularized_gamma_q(0.5 * df, 0.5 * x);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double student_t_log_normaliser(double nu) {
    return log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) - 0.5 * std::log(nu * std::numbers::pi);
}

double student_t_logpdf(double x, double nu) {
    return student_t_log_normaliser(nu) - 0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

double skewt_logpdf(double x, const SkewedTParams& params) {
    params.validate();
    if (!std::isfinite(x)) throw DataError("skewt_logpdf: argument must be finite");
    const double z = x / params.sigma;
    const double g = params.gamma;
    const double arg = z >= 0.0 ? z / g : z * g;
    return std::log(2.0 / (g + 1.0 / g)) + student_t_logpdf(arg, params.nu) - std::log(params.sigma);
}

Eigen::VectorXd skewt_sample(const SkewedTParams& params, Eigen::Index n, RandomStream& rng) {
    params.validate();
    if (n < 1) throw DataError("sample size must be at least 1");
    std::student_t_distribution<double> t(params.nu);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double g = params.gamma;
    const double p_positive = g * g / (1.0 + g * g);
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double magnitude = std::abs(t(rng));
        out[i] = u(rng) < p_positive ? g * magnitude : -magnitude / g;
    }
    return out * params.sigma;
}

NormalityReport jarque_bera(const Eigen::Ref<const Eigen::VectorXd>& x) {
    const auto n = x.size();
    if (n < 8) throw DataError("Jarque-Bera test needs at least 8 observations");
    const Eigen::ArrayXd d = x.array() - x.mean();
    const double m2 = d.square().mean();
    if (!(m2 > 0.0) || m2 <= 1e-28 * (x.array().square().mean() + 1e-300))
        throw DataError("Jarque-Bera test: zero variance");
    const double m3 = d.cube().mean();
    const double m4 = d.square().square().mean();
    NormalityReport r;
    r.sample_size = n;
    r.skewness = m3 / std::pow(m2, 1.5);
    const double kurtosis = m4 / (m2 * m2);
    r.excess_kurtosis = kurtosis - 3.0;
    r.statistic = static_cast<double>(n) / 6.0 *
                  (r.skewness * r.skewness + 0.25 * r.excess_kurtosis * r.excess_kurtosis);
    r.p_value = chisq_sf(r.statistic, 2);
    return r;
}

}  // namespace tirever
