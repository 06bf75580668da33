#pragma once

#include "tirever/series.hpp"

#include <Eigen/Core>

namespace tirever {

/// LDL^T factorisation of a symmetric positive-definite pentadiagonal matrix
/// stored by its three lower bands. O(n) factor and solve.
template <typename Scalar>
class PentadiagonalLdlt {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    /// diag has n entries, sub1 n-1, sub2 n-2.
    PentadiagonalLdlt(const Vector& diag, const Vector& sub1, const Vector& sub2)
        : d_(diag.size()), l1_(sub1.size()), l2_(sub2.size()) {
        const Eigen::Index n = diag.size();
        for (Eigen::Index i = 0; i < n; ++i) {
            Scalar di = diag[i];
            if (i >= 2) {
                l2_[i - 2] = sub2[i - 2] / d_[i - 2];
                di -= l2_[i - 2] * l2_[i - 2] * d_[i - 2];
            }
            if (i >= 1) {
                Scalar a = sub1[i - 1];
                if (i >= 2) a -= l2_[i - 2] * d_[i - 2] * l1_[i - 2];
                l1_[i - 1] = a / d_[i - 1];
                di -= l1_[i - 1] * l1_[i - 1] * d_[i - 1];
            }
            d_[i] = di;
        }
    }

    template <typename Rhs>
    Vector solve(const Eigen::MatrixBase<Rhs>& b) const {
        const Eigen::Index n = d_.size();
        Vector x = b;
        for (Eigen::Index i = 1; i < n; ++i) {
            x[i] -= l1_[i - 1] * x[i - 1];
            if (i >= 2) x[i] -= l2_[i - 2] * x[i - 2];
        }
        x.array() /= d_.array();
        for (Eigen::Index i = n - 2; i >= 0; --i) {
            x[i] -= l1_[i] * x[i + 1];
            if (i + 2 < n) x[i] -= l2_[i] * x[i + 2];
        }
        return x;
    }

    const Vector& pivots() const { return d_; }

private:
    Vector d_, l1_, l2_;
};

/// Bands of I + lambda * D'D with D the (n-2) x n second-difference operator.
template <typename Scalar>
struct HpSystem {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Vector diag, sub1, sub2;

    HpSystem(Eigen::Index n, Scalar lambda)
        : diag(Vector::Ones(n)), sub1(Vector::Zero(n - 1)), sub2(Vector::Zero(n - 2)) {
        const Scalar c[3] = {Scalar(1), Scalar(-2), Scalar(1)};
        for (Eigen::Index k = 0; k + 2 < n; ++k) {
            for (int i = 0; i < 3; ++i) {
                diag[k + i] += lambda * c[i] * c[i];
                if (i < 2) sub1[k + i] += lambda * c[i] * c[i + 1];
            }
            sub2[k] += lambda * c[0] * c[2];
        }
    }

    PentadiagonalLdlt<Scalar> factor() const { return {diag, sub1, sub2}; }
};

/// HP trend of y for penalty lambda; y.size() must be at least 3.
template <typename Derived>
auto hp_trend(const Eigen::MatrixBase<Derived>& y, typename Derived::Scalar lambda) {
    using Scalar = typename Derived::Scalar;
    return HpSystem<Scalar>(y.size(), lambda).factor().solve(y);
}

struct HpDecomposition {
    TimeSeries trend;
    TimeSeries cycle;
    double lambda;
};

/// Weights of one row of the HP smoother: trend[row] = sum_j weights[j] * y[row + first_offset + j].
struct HpWeights {
    Eigen::Index center_index;  ///< 1-based row
    Eigen::Index first_offset;  ///< offset of weights[0] relative to the row (1 - row)
    Eigen::VectorXd weights;
    /// max |w(j) - w(-j)| over offsets present on both sides.
    double max_asymmetry;

    /// Weight at offset j from the row; zero outside the sample.
    double at(Eigen::Index j) const {
        const Eigen::Index k = j - first_offset;
        return (k >= 0 && k < weights.size()) ? weights[k] : 0.0;
    }
};

/// lambda = (obs_per_year / 4)^exponent * 1600; exponent must be 2 or 4.
double hp_lambda(Frequency frequency, int exponent);

/// Exact finite-sample HP decomposition; needs length >= 5 and lambda > 0.
HpDecomposition hp_decompose(const TimeSeries& series, double lambda);

/// Row `row` (1-based) of (I + lambda D'D)^{-1}.
HpWeights hp_weights(Eigen::Index length, double lambda, Eigen::Index row);

/// Coefficients of the lag/lead factorisation of the HP symbol.
inline double hp_psi1(double lambda) { return 4.0 * lambda / (lambda + 1.0); }
inline double hp_psi2(double lambda) { return -lambda; }

/// psi1^2 + psi2^2 + 6 psi2: the constant separating the product of the
/// lag and lead quadratics from the HP symbol.
double hp_factorization_check(double lambda);

}  // namespace tirever
