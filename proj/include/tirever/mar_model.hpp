#pragma once

#include "tirever/distributions.hpp"
#include "tirever/rng.hpp"
#include "tirever/series.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace tirever {

/// Both lag polynomials must keep every reciprocal root at or below this modulus.
inline constexpr double kRootMargin = 0.99;

/// Mixed causal-noncausal autoregression phi(L) varphi(L^-1) y_t = eps_t with
/// phi(z) = 1 - phi_1 z - ... - phi_r z^r and varphi(z) = 1 - varphi_1 z - ... - varphi_s z^s.
struct MarSpec {
    Eigen::VectorXd phi;     ///< causal (lag) coefficients, r entries
    Eigen::VectorXd varphi;  ///< noncausal (lead) coefficients, s entries
    SkewedTParams innovation;

    int r() const { return static_cast<int>(phi.size()); }
    int s() const { return static_cast<int>(varphi.size()); }

    /// Throws DataError when either polynomial has a root within the margin
    /// of the unit circle, or the innovation law is invalid.
    void validate() const;
};

/// Largest modulus among the reciprocal roots of 1 - c_1 z - ... - c_k z^k
/// (the eigenvalues of its companion matrix); 0 for an empty polynomial.
double max_reciprocal_root(const Eigen::Ref<const Eigen::VectorXd>& coeffs);

/// Reciprocal roots of 1 - c_1 z - ... - c_k z^k.
Eigen::VectorXcd reciprocal_roots(const Eigen::Ref<const Eigen::VectorXd>& coeffs);

/// Coefficients c of 1 - c_1 z - ... for the polynomial with the given
/// reciprocal roots; imaginary parts must come in conjugate pairs.
Eigen::VectorXd coefficients_from_roots(const Eigen::Ref<const Eigen::VectorXcd>& roots);

/// r == s and max |phi_i - varphi_i| <= tolerance.
bool is_reversible_spec(const MarSpec& spec, double tolerance);

/// Two-sided filter: u_t = y_t - sum_j varphi_j y_{t+j}, then
/// eps_t = u_t - sum_i phi_i u_{t-i}. Returns T - r - s values (t = r+1 .. T-s).
template <typename Derived, typename PhiDerived, typename VarphiDerived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> mar_filter(
    const Eigen::MatrixBase<Derived>& y, const Eigen::MatrixBase<PhiDerived>& phi,
    const Eigen::MatrixBase<VarphiDerived>& varphi) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = y.size();
    const Eigen::Index r = phi.size();
    const Eigen::Index s = varphi.size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> u = y.head(n - s);
    for (Eigen::Index j = 1; j <= s; ++j) u -= varphi[j - 1] * y.segment(j, n - s);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eps = u.tail(n - s - r);
    for (Eigen::Index i = 1; i <= r; ++i) eps -= phi[i - 1] * u.segment(r - i, n - s - r);
    return eps;
}

/// Residuals of `series` under `spec`; needs T > r + s.
Eigen::VectorXd mar_residuals(const TimeSeries& series, const MarSpec& spec);

/// Runs the two recursions on a given innovation sequence: v backward from
/// zero terminal values (v_t = sum varphi_j v_{t+j} + eps_t), then y forward
/// from zero initial values (y_t = sum phi_i y_{t-i} + v_t). Same length as eps.
Eigen::VectorXd mar_from_innovations(const MarSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& eps);

struct MarSimulation {
    TimeSeries series;
    Eigen::VectorXd innovations;  ///< the T innovations aligned with `series`
};

/// Draws T + 2 * burn_in innovations, builds the path and keeps the central T values.
MarSimulation mar_simulate_detailed(const MarSpec& spec, Eigen::Index length, Eigen::Index burn_in,
                                    RandomStream& rng);
TimeSeries mar_simulate(const MarSpec& spec, Eigen::Index length, Eigen::Index burn_in,
                        RandomStream& rng);

inline constexpr Eigen::Index kDefaultBurnIn = 200;

/// Approximate log-likelihood of `y` under `spec`: the sum of innovation log
/// densities over t = r+1 .. T-s. Returns -inf when a polynomial violates the
/// root margin.
double mar_loglik(const Eigen::Ref<const Eigen::VectorXd>& y, const MarSpec& spec);

/// Approximate symmetric Student's-t log-likelihood as a function of the
/// natural parameter vector [coefficients..., nu, sigma]. Coefficients are
/// phi then varphi, or the shared vector when restricted (phi == varphi).
class MarLikelihood {
public:
    MarLikelihood(Eigen::VectorXd y, int r, int s, bool restricted);

    int r() const { return r_; }
    int s() const { return s_; }
    bool restricted() const { return restricted_; }
    /// Number of free autoregressive coefficients (s when restricted).
    int coefficient_count() const { return restricted_ ? s_ : r_ + s_; }
    Eigen::Index effective_size() const { return y_.size() - r_ - s_; }

    Eigen::VectorXd phi(const Eigen::Ref<const Eigen::VectorXd>& theta) const;
    Eigen::VectorXd varphi(const Eigen::Ref<const Eigen::VectorXd>& theta) const;
    bool feasible(const Eigen::Ref<const Eigen::VectorXd>& theta) const;

    /// Log-likelihood; fills `gradient` (same layout as theta) when non-null.
    /// Returns -inf outside the feasible region.
    double operator()(const Eigen::Ref<const Eigen::VectorXd>& theta,
                      Eigen::VectorXd* gradient = nullptr) const;

private:
    Eigen::VectorXd y_;
    int r_, s_;
    bool restricted_;
};

enum class Criterion { aic, bic };

struct MarFit {
    MarSpec spec;
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    /// Standard errors of the free coefficients (phi then varphi, or the shared
    /// vector when restricted).
    Eigen::VectorXd std_errors;
    double nu_std_error = 0.0;     ///< NaN when nu sits at its upper bound
    double sigma_std_error = 0.0;
    Eigen::Index n_effective = 0;
    bool converged = false;
    bool restricted = false;

    int r() const { return spec.r(); }
    int s() const { return spec.s(); }
    int free_coefficients() const { return restricted ? spec.s() : spec.r() + spec.s(); }
    int parameter_count() const { return free_coefficients() + 2; }
    bool effectively_gaussian() const { return spec.innovation.nu >= kMaxDegreesOfFreedom - 1e-3; }
    double criterion(Criterion c) const { return c == Criterion::aic ? aic : bic; }
};

/// Ordinary least squares AR(p) without intercept using observations from
/// zero-based index `first` onwards as responses (first >= p).
struct OlsAr {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residuals;
    double residual_variance = 0.0;  ///< mean squared residual
};
OlsAr fit_ols_ar(const Eigen::Ref<const Eigen::VectorXd>& y, int p, Eigen::Index first);

/// Approximate maximum likelihood fit of MAR(r, s) with symmetric Student's-t
/// innovations. `init`, when given, is a start point in the MarLikelihood
/// layout: either the coefficients alone or the full [coefficients, nu, sigma].
/// The result is never worse than a full start point.
MarFit mar_fit(const TimeSeries& series, int r, int s, bool restricted,
               const std::optional<Eigen::VectorXd>& init = std::nullopt);

/// All MAR(r, s) with r + s = p, plus the restricted MAR(p/2, p/2) when p is
/// even, sorted by the criterion (ties go to larger s, then to the restricted fit).
std::vector<MarFit> mar_grid(const TimeSeries& series, int p, Criterion criterion);

}  // namespace tirever
