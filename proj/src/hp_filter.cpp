#include "tirever/hp_filter.hpp"
#include "tirever/error.hpp"

#include <cmath>
#include <string>

namespace tirever {

double hp_lambda(Frequency frequency, int exponent) {
    if (exponent != 2 && exponent != 4)
        throw DataError("HP lambda exponent must be 2 or 4 (got " + std::to_string(exponent) + ")");
    const int per_year = observations_per_year(frequency);
    if (per_year == 0) throw DataError("HP lambda rule needs a named frequency");
    return std::pow(per_year / 4.0, exponent) * 1600.0;
}

HpDecomposition hp_decompose(const TimeSeries& series, double lambda) {
    if (series.size() < 5) throw DataError("HP filter needs at least 5 observations");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw DataError("HP smoothing parameter lambda must be positive");
    Eigen::VectorXd trend = hp_trend(series.values(), lambda);
    Eigen::VectorXd cycle = series.values() - trend;
    return {series.with_values(std::move(trend)), series.with_values(std::move(cycle)), lambda};
}

HpWeights hp_weights(Eigen::Index length, double lambda, Eigen::Index row) {
    if (length < 3) throw DataError("HP weights need length >= 3");
    if (row < 1 || row > length)
        throw DataError("HP weight row " + std::to_string(row) + " outside 1.." +
                        std::to_string(length));
    if (!(lambda > 0.0)) throw DataError("HP smoothing parameter lambda must be positive");
    // The smoother matrix is symmetric, so its row equals the solve against a unit vector.
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(length);
    unit[row - 1] = 1.0;
    HpWeights w{row, 1 - row, HpSystem<double>(length, lambda).factor().solve(unit), 0.0};
    // Offsets present on one side only compare against an implicit zero.
    const Eigen::Index reach = std::max(row - 1, length - row);
    for (Eigen::Index j = 1; j <= reach; ++j)
        w.max_asymmetry = std::max(w.max_asymmetry, std::abs(w.at(j) - w.at(-j)));
    return w;
}

double hp_factorization_check(double lambda) {
    if (!(lambda > 0.0)) throw DataError("HP smoothing parameter lambda must be positive");
    const double p1 = hp_psi1(lambda);
    const double p2 = hp_psi2(lambda);
    return p1 * p1 + p2 * p2 + 6.0 * p2;
}

}  // namespace tirever
