#include "tirever/mar_model.hpp"
#include "tirever/error.hpp"
#include "tirever/optimizer.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

namespace tirever {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd companion(const Eigen::Ref<const Eigen::VectorXd>& c) {
    const Eigen::Index k = c.size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
    m.row(0) = c.transpose();
    for (Eigen::Index i = 1; i < k; ++i) m(i, i - 1) = 1.0;
    return m;
}

}  // namespace

Eigen::VectorXcd reciprocal_roots(const Eigen::Ref<const Eigen::VectorXd>& coeffs) {
    if (coeffs.size() == 0) return {};
    return Eigen::EigenSolver<Eigen::MatrixXd>(companion(coeffs), false).eigenvalues();
}

double max_reciprocal_root(const Eigen::Ref<const Eigen::VectorXd>& coeffs) {
    switch (coeffs.size()) {
        case 0: return 0.0;
        case 1: return std::abs(coeffs[0]);
        case 2: {
            // lambda^2 - c1 lambda - c2 = 0
            const double c1 = coeffs[0], c2 = coeffs[1];
            const double disc = c1 * c1 + 4.0 * c2;
            if (disc < 0.0) return std::sqrt(-c2);
            const double sq = std::sqrt(disc);
            return std::max(std::abs(0.5 * (c1 + sq)), std::abs(0.5 * (c1 - sq)));
        }
        default: return reciprocal_roots(coeffs).cwiseAbs().maxCoeff();
    }
}

Eigen::VectorXd coefficients_from_roots(const Eigen::Ref<const Eigen::VectorXcd>& roots) {
    // prod (1 - rho z) = sum a_k z^k, a_0 = 1
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(roots.size() + 1);
    a[0] = 1.0;
    for (Eigen::Index i = 0; i < roots.size(); ++i)
        for (Eigen::Index k = i + 1; k >= 1; --k) a[k] -= roots[i] * a[k - 1];
    return -a.tail(roots.size()).real();
}

void MarSpec::validate() const {
    innovation.validate();
    if (!phi.allFinite() || !varphi.allFinite()) throw DataError("MAR coefficients must be finite");
    const double causal = max_reciprocal_root(phi);
    const double noncausal = max_reciprocal_root(varphi);
    if (causal > kRootMargin || noncausal > kRootMargin) {
        throw DataError(
            "MAR polynomials must have all roots outside the unit circle (phi(z) != 0 and "
            "varphi(z) != 0 for |z| <= 1, reciprocal-root modulus <= " +
            std::to_string(kRootMargin) + "); got causal " + std::to_string(causal) +
            ", noncausal " + std::to_string(noncausal));
    }
}

bool is_reversible_spec(const MarSpec& spec, double tolerance) {
    if (spec.r() != spec.s()) return false;
    if (spec.r() == 0) return true;
    return (spec.phi - spec.varphi).cwiseAbs().maxCoeff() <= tolerance;
}

Eigen::VectorXd mar_residuals(const TimeSeries& series, const MarSpec& spec) {
    if (series.size() <= spec.r() + spec.s())
        throw DataError("series of length " + std::to_string(series.size()) +
                        " too short for MAR(" + std::to_string(spec.r()) + "," +
                        std::to_string(spec.s()) + ")");
    return mar_filter(series.values(), spec.phi, spec.varphi);
}

Eigen::VectorXd mar_from_innovations(const MarSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& eps) {
    const Eigen::Index n = eps.size();
    const Eigen::Index r = spec.r(), s = spec.s();
    Eigen::VectorXd v(n);
    for (Eigen::Index t = n - 1; t >= 0; --t) {
        double acc = eps[t];
        for (Eigen::Index j = 1; j <= s && t + j < n; ++j) acc += spec.varphi[j - 1] * v[t + j];
        v[t] = acc;
    }
    Eigen::VectorXd y(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        double acc = v[t];
        for (Eigen::Index i = 1; i <= r && t - i >= 0; ++i) acc += spec.phi[i - 1] * y[t - i];
        y[t] = acc;
    }
    return y;
}

MarSimulation mar_simulate_detailed(const MarSpec& spec, Eigen::Index length, Eigen::Index burn_in,
                                    RandomStream& rng) {
    spec.validate();
    if (length < 1) throw DataError("simulation length must be at least 1");
    if (burn_in < 1) throw DataError("burn-in must be at least 1");
    const Eigen::VectorXd eps = skewt_sample(spec.innovation, length + 2 * burn_in, rng);
    const Eigen::VectorXd path = mar_from_innovations(spec, eps);
    return {TimeSeries(path.segment(burn_in, length)), eps.segment(burn_in, length)};
}

TimeSeries mar_simulate(const MarSpec& spec, Eigen::Index length, Eigen::Index burn_in,
                        RandomStream& rng) {
    return mar_simulate_detailed(spec, length, burn_in, rng).series;
}

double mar_loglik(const Eigen::Ref<const Eigen::VectorXd>& y, const MarSpec& spec) {
    if (y.size() <= spec.r() + spec.s()) throw DataError("series too short for MAR likelihood");
    if (max_reciprocal_root(spec.phi) > kRootMargin || max_reciprocal_root(spec.varphi) > kRootMargin)
        return kNegInf;
    const Eigen::VectorXd eps = mar_filter(y, spec.phi, spec.varphi);
    double ll = 0.0;
    for (Eigen::Index t = 0; t < eps.size(); ++t) ll += skewt_logpdf(eps[t], spec.innovation);
    return ll;
}

// ---------------------------------------------------------------------------
// Likelihood with analytic gradient

MarLikelihood::MarLikelihood(Eigen::VectorXd y, int r, int s, bool restricted)
    : y_(std::move(y)), r_(r), s_(s), restricted_(restricted) {
    if (r < 0 || s < 0) throw DataError("MAR orders must be non-negative");
    if (restricted && r != s) throw DataError("restricted MAR requires r == s");
    if (y_.size() <= r + s) throw DataError("series too short for MAR likelihood");
}

Eigen::VectorXd MarLikelihood::phi(const Eigen::Ref<const Eigen::VectorXd>& theta) const {
    return theta.head(r_);
}

Eigen::VectorXd MarLikelihood::varphi(const Eigen::Ref<const Eigen::VectorXd>& theta) const {
    return restricted_ ? Eigen::VectorXd(theta.head(s_)) : Eigen::VectorXd(theta.segment(r_, s_));
}

bool MarLikelihood::feasible(const Eigen::Ref<const Eigen::VectorXd>& theta) const {
    const Eigen::Index k = coefficient_count();
    const double nu = theta[k], sigma = theta[k + 1];
    return nu > 2.0 && sigma > 0.0 && std::isfinite(nu) && std::isfinite(sigma) &&
           max_reciprocal_root(phi(theta)) <= kRootMargin &&
           max_reciprocal_root(varphi(theta)) <= kRootMargin;
}

double MarLikelihood::operator()(const Eigen::Ref<const Eigen::VectorXd>& theta,
                                 Eigen::VectorXd* gradient) const {
    const Eigen::Index k = coefficient_count();
    if (theta.size() != k + 2) throw DataError("likelihood parameter vector has wrong length");
    if (!feasible(theta)) return kNegInf;

    const Eigen::VectorXd ph = phi(theta);
    const Eigen::VectorXd vp = varphi(theta);
    const double nu = theta[k];
    const double sigma = theta[k + 1];
    const Eigen::Index n = y_.size();
    const Eigen::Index m = n - r_ - s_;

    // u = varphi(L^-1) y on t = 0..n-s-1; eps = phi(L) u on t = r..n-s-1
    Eigen::VectorXd u = y_.head(n - s_);
    for (Eigen::Index j = 1; j <= s_; ++j) u -= vp[j - 1] * y_.segment(j, n - s_);
    Eigen::VectorXd eps = u.tail(m);
    for (Eigen::Index i = 1; i <= r_; ++i) eps -= ph[i - 1] * u.segment(r_ - i, m);

    const double scale2 = nu * sigma * sigma;
    double sum_log = 0.0;
    for (Eigen::Index t = 0; t < m; ++t) sum_log += std::log1p(eps[t] * eps[t] / scale2);
    const double ll = static_cast<double>(m) * (student_t_log_normaliser(nu) - std::log(sigma)) -
                      0.5 * (nu + 1.0) * sum_log;
    if (!gradient) return ll;

    // d ll / d eps_t
    Eigen::VectorXd score(m);
    double sum_ratio = 0.0;  // sum eps^2 / (nu sigma^2 + eps^2)
    for (Eigen::Index t = 0; t < m; ++t) {
        const double e2 = eps[t] * eps[t];
        score[t] = -(nu + 1.0) * eps[t] / (scale2 + e2);
        sum_ratio += e2 / (scale2 + e2);
    }

    Eigen::VectorXd g = Eigen::VectorXd::Zero(k + 2);
    // d eps_t / d phi_i = -u_{t-i}
    for (Eigen::Index i = 1; i <= r_; ++i) g[i - 1] = -score.dot(u.segment(r_ - i, m));
    if (s_ > 0) {
        // d eps_t / d varphi_j = -w_{t+j}, w = phi(L) y on t = r..n-1
        Eigen::VectorXd w = y_.tail(n - r_);
        for (Eigen::Index i = 1; i <= r_; ++i) w -= ph[i - 1] * y_.segment(r_ - i, n - r_);
        const Eigen::Index offset = restricted_ ? 0 : r_;
        for (Eigen::Index j = 1; j <= s_; ++j) g[offset + j - 1] += -score.dot(w.segment(j, m));
    }
    g[k] = static_cast<double>(m) * 0.5 * (digamma(0.5 * (nu + 1.0)) - digamma(0.5 * nu) - 1.0 / nu) -
           0.5 * sum_log + 0.5 * (nu + 1.0) * sum_ratio / nu;
    g[k + 1] = -static_cast<double>(m) / sigma + (nu + 1.0) * sum_ratio / sigma;
    *gradient = std::move(g);
    return ll;
}

// ---------------------------------------------------------------------------
// OLS autoregression

OlsAr fit_ols_ar(const Eigen::Ref<const Eigen::VectorXd>& y, int p, Eigen::Index first) {
    if (p < 0 || first < p) throw DataError("invalid AR regression window");
    const Eigen::Index m = y.size() - first;
    if (m <= p) throw DataError("too few observations for AR(" + std::to_string(p) + ")");
    OlsAr out;
    const Eigen::VectorXd target = y.tail(m);
    if (p == 0) {
        out.coefficients.resize(0);
        out.residuals = target;
    } else {
        Eigen::MatrixXd x(m, p);
        for (int i = 1; i <= p; ++i) x.col(i - 1) = y.segment(first - i, m);
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
        if (qr.rank() < p) throw NumericError("singular regressor matrix in AR(" + std::to_string(p) + ") fit");
        out.coefficients = qr.solve(target);
        out.residuals = target - x * out.coefficients;
    }
    out.residual_variance = out.residuals.squaredNorm() / static_cast<double>(m);
    return out;
}

// ---------------------------------------------------------------------------
// Estimation

namespace {

constexpr double kStartMargin = 0.95;
constexpr double kNuStart = 6.0;

// Scale coefficients so every reciprocal root shrinks into the start margin.
Eigen::VectorXd shrink_into_margin(Eigen::VectorXd c) {
    const double m = max_reciprocal_root(c);
    if (m > kStartMargin) {
        const double f = kStartMargin / m;
        double scale = 1.0;
        for (Eigen::Index i = 0; i < c.size(); ++i) {
            scale *= f;
            c[i] *= scale;
        }
    }
    return c;
}

// Reciprocal roots grouped into real singletons and conjugate pairs.
std::vector<std::vector<std::complex<double>>> root_units(const Eigen::VectorXcd& roots) {
    std::vector<std::vector<std::complex<double>>> units;
    std::vector<bool> used(roots.size(), false);
    for (Eigen::Index i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        if (std::abs(roots[i].imag()) < 1e-10 * (1.0 + std::abs(roots[i]))) {
            units.push_back({{roots[i].real(), 0.0}});
            continue;
        }
        Eigen::Index partner = -1;
        for (Eigen::Index j = i + 1; j < roots.size(); ++j) {
            if (!used[j] && std::abs(roots[j] - std::conj(roots[i])) < 1e-8 * (1.0 + std::abs(roots[i]))) {
                partner = j;
                break;
            }
        }
        if (partner < 0) {
            units.push_back({{roots[i].real(), 0.0}});
        } else {
            used[partner] = true;
            units.push_back({roots[i], std::conj(roots[i])});
        }
    }
    return units;
}

Eigen::VectorXd poly_from_units(const std::vector<std::vector<std::complex<double>>>& units,
                                unsigned mask, bool selected) {
    std::vector<std::complex<double>> chosen;
    for (std::size_t u = 0; u < units.size(); ++u)
        if (((mask >> u) & 1u) == static_cast<unsigned>(selected))
            chosen.insert(chosen.end(), units[u].begin(), units[u].end());
    Eigen::VectorXcd rv(static_cast<Eigen::Index>(chosen.size()));
    for (std::size_t i = 0; i < chosen.size(); ++i) rv[static_cast<Eigen::Index>(i)] = chosen[i];
    return coefficients_from_roots(rv);
}

std::vector<Eigen::VectorXd> start_points(const Eigen::VectorXd& y, int r, int s, bool restricted,
                                          const std::optional<Eigen::VectorXd>& init) {
    const int k = restricted ? s : r + s;
    std::vector<Eigen::VectorXd> starts;
    auto add = [&](Eigen::VectorXd c) {
        if (c.size() != k || !c.allFinite()) return;
        if (restricted) {
            c = shrink_into_margin(std::move(c));
        } else {
            c.head(r) = shrink_into_margin(c.head(r));
            c.tail(s) = shrink_into_margin(c.tail(s));
        }
        for (const auto& existing : starts)
            if ((existing - c).cwiseAbs().maxCoeff() < 1e-3) return;
        starts.push_back(std::move(c));
    };

    if (init) add(*init);
    if (k == 0) {
        starts.emplace_back(0);
        return starts;
    }
    const Eigen::VectorXd reversed = y.reverse();

    // Pseudo-causal coefficients on the causal side, then the mirror allocation.
    if (restricted) {
        add(fit_ols_ar(y, s, s).coefficients);
    } else {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(k);
        if (r > 0) c.head(r) = fit_ols_ar(y, r, r).coefficients;
        add(c);
        c.setZero();
        if (s > 0) c.tail(s) = fit_ols_ar(reversed, s, s).coefficients;
        add(c);
    }

    // Allocations of the pseudo-causal AR(r + s) roots between the two sides.
    const int p = r + s;
    const Eigen::VectorXcd roots = reciprocal_roots(fit_ols_ar(y, p, p).coefficients);
    const auto units = root_units(roots);
    if (units.size() <= 8) {
        for (unsigned mask = 0; mask < (1u << units.size()); ++mask) {
            int count = 0;
            for (std::size_t u = 0; u < units.size(); ++u)
                if ((mask >> u) & 1u) count += static_cast<int>(units[u].size());
            if (restricted) {
                if (count != s) continue;
                add(poly_from_units(units, mask, true));
            } else {
                if (count != r) continue;
                Eigen::VectorXd c(k);
                c << poly_from_units(units, mask, true), poly_from_units(units, mask, false);
                add(c);
            }
        }
    }

    // Small sign patterns for low orders.
    if (r <= 2 && s <= 2) {
        for (unsigned mask = 0; mask < (1u << k); ++mask) {
            Eigen::VectorXd c(k);
            for (int i = 0; i < k; ++i) c[i] = ((mask >> i) & 1u) ? -0.1 : 0.1;
            add(c);
        }
    }
    return starts;
}

// Optimisation runs on x = [coefficients, log(nu - 2), log(sigma)], nu capped at the bound.
struct Transform {
    Eigen::Index k;

    double nu_excess(double a) const { return std::min(std::exp(a), kMaxDegreesOfFreedom - 2.0); }

    Eigen::VectorXd natural(const Eigen::VectorXd& x) const {
        Eigen::VectorXd theta = x;
        theta[k] = 2.0 + nu_excess(x[k]);
        theta[k + 1] = std::exp(x[k + 1]);
        return theta;
    }

    Eigen::VectorXd unconstrained(const Eigen::VectorXd& theta) const {
        Eigen::VectorXd x = theta;
        x[k] = std::log(theta[k] - 2.0);
        x[k + 1] = std::log(theta[k + 1]);
        return x;
    }
};

}  // namespace

MarFit mar_fit(const TimeSeries& series, int r, int s, bool restricted,
               const std::optional<Eigen::VectorXd>& init) {
    if (r < 0 || s < 0) throw DataError("MAR orders must be non-negative");
    if (restricted && r != s) throw DataError("restricted MAR fit requires r == s");
    if (series.size() < r + s + 20)
        throw DataError("series of length " + std::to_string(series.size()) + " too short for MAR(" +
                        std::to_string(r) + "," + std::to_string(s) + ") fit (needs >= " +
                        std::to_string(r + s + 20) + ")");

    const Eigen::VectorXd& y = series.values();
    const MarLikelihood lik(y, r, s, restricted);
    const Eigen::Index k = lik.coefficient_count();
    const Transform tf{k};

    const optim::Objective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
        const Eigen::VectorXd theta = tf.natural(x);
        Eigen::VectorXd g;
        const double ll = lik(theta, grad ? &g : nullptr);
        if (!std::isfinite(ll)) return kInf;
        if (grad) {
            *grad = -g;
            const double excess = std::exp(x[k]);
            (*grad)[k] = excess < kMaxDegreesOfFreedom - 2.0 ? -g[k] * excess : 0.0;
            (*grad)[k + 1] = -g[k + 1] * theta[k + 1];
        }
        return -ll;
    };

    optim::Options nm_opts;
    nm_opts.max_iterations = 40 * static_cast<int>(k + 2);
    nm_opts.function_tolerance = 1e-8;
    optim::Options bfgs_opts;
    bfgs_opts.max_iterations = 300;
    bfgs_opts.gradient_tolerance = 1e-5;

    optim::Result best;
    best.value = kInf;
    auto polish = [&](const Eigen::VectorXd& x0) {
        const optim::Result simplex = optim::nelder_mead(objective, x0, nm_opts);
        optim::Result refined = optim::bfgs(objective, simplex.x, bfgs_opts);
        if (!(refined.value <= simplex.value)) refined = {simplex.x, simplex.value, 0, false};
        if (refined.value < best.value) best = refined;
    };

    // A full start point (coefficients, nu, sigma) is polished as given.
    std::optional<Eigen::VectorXd> init_coefficients = init;
    if (init && init->size() == k + 2) {
        const Eigen::VectorXd x0 = tf.unconstrained(*init);
        if (std::isfinite(objective(x0, nullptr))) polish(x0);
        init_coefficients = Eigen::VectorXd(init->head(k));
    }

    for (const auto& c : start_points(y, r, s, restricted, init_coefficients)) {
        Eigen::VectorXd theta(k + 2);
        theta.head(k) = c;
        theta[k] = kNuStart;
        MarSpec probe{lik.phi(theta), lik.varphi(theta), {}};
        const Eigen::VectorXd eps = mar_filter(y, probe.phi, probe.varphi);
        const double sd = std::sqrt(eps.squaredNorm() / static_cast<double>(eps.size()));
        theta[k + 1] = sd > 0.0 ? sd : 1.0;
        const Eigen::VectorXd x0 = tf.unconstrained(theta);
        if (!std::isfinite(objective(x0, nullptr))) continue;
        polish(x0);
    }
    if (!std::isfinite(best.value))
        throw NumericError("MAR(" + std::to_string(r) + "," + std::to_string(s) +
                           ") fit: no feasible start converged");

    const Eigen::VectorXd theta = tf.natural(best.x);
    MarFit fit;
    fit.restricted = restricted;
    fit.spec = MarSpec{lik.phi(theta), lik.varphi(theta), SkewedTParams{theta[k], 1.0, theta[k + 1]}};
    fit.loglik = -best.value;
    fit.n_effective = lik.effective_size();
    const double kpar = static_cast<double>(fit.parameter_count());
    fit.aic = -2.0 * fit.loglik + 2.0 * kpar;
    fit.bic = -2.0 * fit.loglik + kpar * std::log(static_cast<double>(fit.n_effective));

    // Standard errors from the inverse negative Hessian in natural parameters;
    // nu is held fixed when it sits on its upper bound.
    const bool nu_free = !fit.effectively_gaussian();
    const Eigen::Index dim = k + (nu_free ? 2 : 1);
    auto embed = [&](const Eigen::VectorXd& z) {
        Eigen::VectorXd full = theta;
        full.head(k) = z.head(k);
        if (nu_free) full[k] = z[k];
        full[k + 1] = z[dim - 1];
        return full;
    };
    const optim::Objective negll = [&](const Eigen::VectorXd& z, Eigen::VectorXd* grad) {
        Eigen::VectorXd g;
        const double ll = lik(embed(z), grad ? &g : nullptr);
        if (!std::isfinite(ll)) return kInf;
        if (grad) {
            grad->resize(dim);
            grad->head(k) = -g.head(k);
            if (nu_free) (*grad)[k] = -g[k];
            (*grad)[dim - 1] = -g[k + 1];
        }
        return -ll;
    };
    Eigen::VectorXd z(dim);
    z.head(k) = theta.head(k);
    if (nu_free) z[k] = theta[k];
    z[dim - 1] = theta[k + 1];

    const Eigen::MatrixXd hess = optim::hessian_from_gradient(negll, z);
    bool hessian_ok = hess.allFinite();
    Eigen::VectorXd variances = Eigen::VectorXd::Constant(dim, std::numeric_limits<double>::quiet_NaN());
    if (hessian_ok) {
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
        hessian_ok = eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() > 0.0;
        if (hessian_ok) variances = hess.inverse().diagonal();
    }
    fit.std_errors = variances.head(k).cwiseSqrt();
    fit.nu_std_error = nu_free ? std::sqrt(variances[k]) : std::numeric_limits<double>::quiet_NaN();
    fit.sigma_std_error = std::sqrt(variances[dim - 1]);
    fit.converged = best.converged && hessian_ok;
    return fit;
}

std::vector<MarFit> mar_grid(const TimeSeries& series, int p, Criterion criterion) {
    if (p < 1) throw DataError("MAR grid order p must be at least 1");
    std::vector<MarFit> fits;
    std::optional<Eigen::VectorXd> nested_start;
    auto annotate = [](const std::exception& e, int r, int s, bool restricted) {
        return std::string("MAR(") + std::to_string(r) + "," + std::to_string(s) + ")" +
               (restricted ? " restricted" : "") + ": " + e.what();
    };
    if (p % 2 == 0) {
        const int h = p / 2;
        try {
            fits.push_back(mar_fit(series, h, h, true));
        } catch (const NumericError& e) {
            throw NumericError(annotate(e, h, h, true));
        } catch (const DataError& e) {
            throw DataError(annotate(e, h, h, true));
        }
        const MarSpec& rs = fits.back().spec;
        Eigen::VectorXd start(p + 2);
        start << rs.phi, rs.varphi, rs.innovation.nu, rs.innovation.sigma;
        nested_start = start;
    }
    for (int r = p; r >= 0; --r) {
        const int s = p - r;
        try {
            fits.push_back(mar_fit(series, r, s, false, r == s ? nested_start : std::nullopt));
        } catch (const NumericError& e) {
            throw NumericError(annotate(e, r, s, false));
        } catch (const DataError& e) {
            throw DataError(annotate(e, r, s, false));
        }
    }
    std::stable_sort(fits.begin(), fits.end(), [criterion](const MarFit& a, const MarFit& b) {
        const double ca = a.criterion(criterion), cb = b.criterion(criterion);
        if (ca != cb) return ca < cb;
        if (a.s() != b.s()) return a.s() > b.s();
        return a.restricted && !b.restricted;
    });
    return fits;
}

}  // namespace tirever
