#include "tirever/distributions.hpp"
#include "tirever/error.hpp"
#include "tirever/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

using namespace tirever;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-11) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 60);
}

double density(double x, const SkewedTParams& p) { return std::exp(skewt_logpdf(x, p)); }

}  // namespace

TEST(SkewedT, LogDensityAtZeroStudentT3) {
    const double expected = std::log(2.0 / (std::numbers::pi * std::sqrt(3.0)));
    EXPECT_NEAR(skewt_logpdf(0.0, {3.0, 1.0, 1.0}), expected, 1e-12);
    EXPECT_NEAR(expected, -1.0008888496235, 1e-12);
}

TEST(SkewedT, SymmetricWhenGammaIsOne) {
    for (double x : {0.1, 0.7, 2.5, 13.0, 400.0})
        EXPECT_EQ(skewt_logpdf(x, {4.5, 1.0, 2.0}), skewt_logpdf(-x, {4.5, 1.0, 2.0}));
}

TEST(SkewedT, NormalisesToOne) {
    for (double nu : {3.0, 10.0}) {
        for (double gamma : {0.5, 1.0, 2.0}) {
            const SkewedTParams p{nu, gamma, 1.0};
            const double edge = 50.0 * p.sigma;
            auto f = [&](double x) { return density(x, p); };
            double total = integrate(f, -edge, 0.0) + integrate(f, 0.0, edge);
            auto tail = [&](double sign) {
                return integrate(
                    [&](double u) { return u <= 0.0 ? 0.0 : f(sign * edge / u) * edge / (u * u); },
                    0.0, 1.0);
            };
            total += tail(1.0) + tail(-1.0);
            EXPECT_NEAR(total, 1.0, 1e-6) << "nu=" << nu << " gamma=" << gamma;
        }
    }
}

TEST(SkewedT, ContinuousAtZeroAndSkewDuality) {
    for (double gamma : {0.3, 1.0, 2.0, 3.0}) {
        const SkewedTParams p{5.0, gamma, 1.3};
        EXPECT_NEAR(density(-1e-300, p), density(1e-300, p), 1e-12);
        for (double x : {-3.0, -0.4, 0.2, 1.7, 8.0}) {
            const SkewedTParams dual{5.0, 1.0 / gamma, 1.3};
            EXPECT_NEAR(skewt_logpdf(x, p), skewt_logpdf(-x, dual), 1e-13);
        }
    }
}

TEST(SkewedT, InvalidParameters) {
    EXPECT_THROW(skewt_logpdf(0.0, {2.0, 1.0, 1.0}), DataError);
    EXPECT_THROW(skewt_logpdf(0.0, {3.0, 0.0, 1.0}), DataError);
    EXPECT_THROW(skewt_logpdf(0.0, {3.0, 1.0, -1.0}), DataError);
    RandomStream rng(1);
    EXPECT_THROW(skewt_sample({1.5, 1.0, 1.0}, 10, rng), DataError);
}

TEST(SkewedTSample, SymmetricSkewnessNearZero) {
    RandomStream rng(2024);
    const Eigen::VectorXd x = skewt_sample({5.0, 1.0, 1.0}, 100000, rng);
    const Eigen::ArrayXd c = x.array() - x.mean();
    const double skew = c.cube().mean() / std::pow(c.square().mean(), 1.5);
    EXPECT_NEAR(skew, 0.0, 0.1);
}

TEST(SkewedTSample, PositiveMassIsGammaSquaredOverOnePlusGammaSquared) {
    RandomStream rng(99);
    const Eigen::VectorXd x = skewt_sample({4.0, 2.0, 1.0}, 100000, rng);
    const double frac = (x.array() > 0.0).cast<double>().mean();
    EXPECT_NEAR(frac, 0.8, 0.01);
}

TEST(SkewedTSample, DeterministicGivenSeed) {
    RandomStream a(42), b(42);
    EXPECT_EQ(skewt_sample({3.0, 1.5, 2.0}, 500, a), skewt_sample({3.0, 1.5, 2.0}, 500, b));
}

TEST(SpecialFunctions, GammaFamily) {
    EXPECT_NEAR(log_gamma(0.5), 0.5 * std::log(std::numbers::pi), 1e-13);
    EXPECT_NEAR(digamma(1.0), -0.57721566490153286, 1e-12);
    EXPECT_NEAR(digamma(0.5), -0.57721566490153286 - 2.0 * std::log(2.0), 1e-12);
    EXPECT_NEAR(digamma(10.3) - digamma(9.3), 1.0 / 9.3, 1e-12);
    for (double a : {0.5, 1.0, 3.5, 20.0})
        for (double x : {0.01, 0.7, 4.0, 30.0})
            EXPECT_NEAR(regularized_gamma_p(a, x) + regularized_gamma_q(a, x), 1.0, 1e-12);
    for (double x : {0.1, 1.0, 5.0}) EXPECT_NEAR(regularized_gamma_p(1.0, x), -std::expm1(-x), 1e-13);
}

TEST(ChiSquare, ClosedFormsAndExamples) {
    for (int df : {1, 2, 5, 17}) EXPECT_EQ(chisq_sf(0.0, df), 1.0);
    for (double x = 0.0; x <= 80.0; x += 0.37) EXPECT_NEAR(chisq_sf(x, 2), std::exp(-0.5 * x), 1e-12);
    EXPECT_NEAR(chisq_sf(5.991, 2), 0.05, 1e-3);
    EXPECT_NEAR(chisq_sf(3.841, 1), 0.05, 1e-3);
    for (double x : {0.2, 1.0, 3.841, 12.0})
        EXPECT_NEAR(chisq_sf(x, 1), 2.0 * normal_sf(std::sqrt(x)), 1e-12);
    EXPECT_THROW(chisq_sf(-0.1, 2), DataError);
}

TEST(ChiSquare, MonotoneDecreasing) {
    for (int df : {1, 3, 8}) {
        double prev = 1.0;
        for (double x = 0.05; x < 60.0; x += 0.05) {
            const double v = chisq_sf(x, df);
            EXPECT_LE(v, prev);
            prev = v;
        }
    }
}

TEST(JarqueBera, ExactGaussianMoments) {
    // Symmetric, and c^2 = 6 + sqrt(50) makes the kurtosis exactly 3.
    const double c = std::sqrt(6.0 + std::sqrt(50.0));
    Eigen::VectorXd x(10);
    x << 1, 1, 1, 1, c, -1, -1, -1, -1, -c;
    const NormalityReport r = jarque_bera(x);
    EXPECT_NEAR(r.skewness, 0.0, 1e-14);
    EXPECT_NEAR(r.excess_kurtosis, 0.0, 1e-12);
    EXPECT_NEAR(r.statistic, 0.0, 1e-11);
    EXPECT_NEAR(r.p_value, 1.0, 1e-11);
}

TEST(JarqueBera, WorkedStatistic) {
    const double stat = 100.0 / 6.0 * (0.25 + 0.25);
    EXPECT_NEAR(stat, 8.333, 1e-3);
    EXPECT_NEAR(chisq_sf(stat, 2), 0.0155, 1e-4);
}

TEST(JarqueBera, MatchesDirectFormula) {
    RandomStream rng(8);
    Eigen::VectorXd x(333);
    for (auto& v : x) v = std::exp(0.5 * rng.normal());
    const double n = static_cast<double>(x.size());
    const Eigen::ArrayXd c = x.array() - x.mean();
    const double m2 = c.square().sum() / n, m3 = c.cube().sum() / n, m4 = c.square().square().sum() / n;
    const double s = m3 / std::pow(m2, 1.5), k = m4 / (m2 * m2);
    const NormalityReport r = jarque_bera(x);
    EXPECT_NEAR(r.statistic, n / 6.0 * (s * s + (k - 3.0) * (k - 3.0) / 4.0), 1e-9);
    EXPECT_NEAR(r.p_value, std::exp(-0.5 * r.statistic), 1e-14);
    EXPECT_EQ(r.sample_size, 333);
}

TEST(JarqueBera, AffineInvariant) {
    RandomStream rng(12);
    Eigen::VectorXd x(400);
    for (auto& v : x) v = rng.normal() + 0.3 * rng.normal() * rng.normal();
    const double base = jarque_bera(x).statistic;
    const Eigen::VectorXd y = (x.array() * 37.0 - 1234.5).matrix();
    EXPECT_NEAR(jarque_bera(y).statistic, base, 1e-8);
}

TEST(JarqueBera, SizeOnGaussianSamples) {
    int rejections = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        RandomStream rng(seed);
        Eigen::VectorXd x(10000);
        for (auto& v : x) v = rng.normal();
        if (jarque_bera(x).p_value < 0.05) ++rejections;
    }
    EXPECT_GE(rejections, 30);
    EXPECT_LE(rejections, 70);
}

TEST(JarqueBera, Errors) {
    EXPECT_THROW(jarque_bera(Eigen::VectorXd::Ones(7)), DataError);
    EXPECT_THROW(jarque_bera(Eigen::VectorXd::Constant(20, 3.0)), DataError);
}
