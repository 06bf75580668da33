#pragma once

#include "tirever/rng.hpp"

#include <Eigen/Core>

namespace tirever {

/// Two-piece skewed Student's-t law: degrees of freedom, skewness and scale.
/// gamma == 1 gives the symmetric Student's-t(nu) scaled by sigma.
struct SkewedTParams {
    double nu = 6.0;
    double gamma = 1.0;
    double sigma = 1.0;

    /// Throws DataError unless nu > 2, gamma > 0 and sigma > 0 (all finite).
    void validate() const;
};

/// Upper bound of the degrees-of-freedom range used in estimation; fits at
/// the bound are reported as effectively Gaussian.
inline constexpr double kMaxDegreesOfFreedom = 200.0;

/// log Gamma(nu/2 + 1/2) - log Gamma(nu/2) - log(nu*pi)/2, the log density of
/// the unit-scale Student's-t at zero.
double student_t_log_normaliser(double nu);

/// Unit-scale Student's-t(nu) log density.
double student_t_logpdf(double x, double nu);

/// log of (1/sigma) f(x/sigma), f the two-piece density built from halves of
/// Student's-t(nu): the positive half stretched by gamma, the negative half by 1/gamma.
double skewt_logpdf(double x, const SkewedTParams& params);

/// n i.i.d. draws by the two-piece construction: |t| from Student's-t(nu),
/// positive with probability gamma^2 / (1 + gamma^2), stretched by gamma on the
/// positive side and by 1/gamma on the negative side, then scaled by sigma.
Eigen::VectorXd skewt_sample(const SkewedTParams& params, Eigen::Index n, RandomStream& rng);

// Special functions.
double log_gamma(double x);
double digamma(double x);
/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed directly
/// in the tail to keep relative accuracy.
double regularized_gamma_q(double a, double x);

/// Upper tail of the chi-square(df) distribution. Throws DataError for x < 0.
double chisq_sf(double x, int df);
/// Standard normal upper tail.
double normal_sf(double z);

struct NormalityReport {
    double statistic = 0.0;
    double p_value = 1.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    Eigen::Index sample_size = 0;
};

/// Jarque-Bera normality test with 1/n moment estimators:
/// JB = n/6 (S^2 + (K-3)^2/4), p-value from chi-square(2).
/// Requires at least 8 observations and non-zero variance.
NormalityReport jarque_bera(const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace tirever
