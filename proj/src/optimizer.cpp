#include "tirever/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace tirever::optim {

Result nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const Options& options) {
    const Eigen::Index n = x0.size();
    std::vector<Eigen::VectorXd> simplex(n + 1, x0);
    std::vector<double> values(n + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double step = options.initial_simplex_step * std::max(1.0, std::abs(x0[i]));
        simplex[i + 1][i] += step;
    }
    for (Eigen::Index i = 0; i <= n; ++i) values[i] = f(simplex[i], nullptr);

    std::vector<Eigen::Index> order(n + 1);
    Result r;
    for (r.iterations = 0; r.iterations < options.max_iterations; ++r.iterations) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](Eigen::Index a, Eigen::Index b) { return values[a] < values[b]; });
        const Eigen::Index best = order.front();
        const Eigen::Index worst = order.back();
        const Eigen::Index second = order[n - 1];
        if (std::isfinite(values[worst]) &&
            std::abs(values[worst] - values[best]) <=
                options.function_tolerance * (std::abs(values[best]) + 1e-10)) {
            r.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (Eigen::Index i = 0; i <= n; ++i)
            if (i != worst) centroid += simplex[i];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
        const double fr = f(reflected, nullptr);
        if (fr < values[best]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
            const double fe = f(expanded, nullptr);
            if (fe < fr) {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
            continue;
        }
        if (fr < values[second]) {
            simplex[worst] = reflected;
            values[worst] = fr;
            continue;
        }
        const bool outside = fr < values[worst];
        const Eigen::VectorXd contracted =
            outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                    : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
        const double fc = f(contracted, nullptr);
        if (fc < std::min(fr, values[worst])) {
            simplex[worst] = contracted;
            values[worst] = fc;
            continue;
        }
        // Shrink towards the best vertex.
        for (Eigen::Index i = 0; i <= n; ++i) {
            if (i == best) continue;
            simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
            values[i] = f(simplex[i], nullptr);
        }
    }
    const auto best = static_cast<Eigen::Index>(
        std::min_element(values.begin(), values.end()) - values.begin());
    r.x = simplex[best];
    r.value = values[best];
    return r;
}

Result bfgs(const Objective& f, const Eigen::VectorXd& x0, const Options& options) {
    const Eigen::Index n = x0.size();
    Result r;
    r.x = x0;
    Eigen::VectorXd g(n);
    r.value = f(r.x, &g);
    if (!std::isfinite(r.value) || !g.allFinite()) return r;

    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd g_new(n);
    int stalled = 0;
    for (r.iterations = 0; r.iterations < options.max_iterations; ++r.iterations) {
        if (g.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
            r.converged = true;
            break;
        }
        Eigen::VectorXd direction = -h * g;
        double slope = g.dot(direction);
        if (!(slope < 0.0)) {
            h.setIdentity();
            direction = -g;
            slope = -g.squaredNorm();
        }

        double step = 1.0;
        double f_new = std::numeric_limits<double>::infinity();
        Eigen::VectorXd x_new;
        bool accepted = false;
        for (int k = 0; k < 60; ++k) {
            x_new = r.x + step * direction;
            f_new = f(x_new, &g_new);
            if (std::isfinite(f_new) && g_new.allFinite() && f_new <= r.value + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (h.isIdentity()) break;
            h.setIdentity();
            continue;
        }

        const Eigen::VectorXd s = x_new - r.x;
        const Eigen::VectorXd y = g_new - g;
        const double improvement = r.value - f_new;
        r.x = x_new;
        g = g_new;
        r.value = f_new;

        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (r.iterations == 0) h *= sy / y.squaredNorm();
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
            h = left * h * left.transpose() + rho * s * s.transpose();
        }

        if (improvement <= options.function_tolerance * (std::abs(r.value) + 1.0)) {
            if (++stalled >= 3) {
                r.converged = true;
                break;
            }
        } else {
            stalled = 0;
        }
    }
    return r;
}

Eigen::MatrixXd hessian_from_gradient(const Objective& f, const Eigen::VectorXd& x, double rel_step) {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd hess(n, n);
    Eigen::VectorXd g_plus(n), g_minus(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = std::max(rel_step, rel_step * std::abs(x[i]));
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fp = f(xp, &g_plus);
        const double fm = f(xm, &g_minus);
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
            hess.col(i).setConstant(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        hess.col(i) = (g_plus - g_minus) / (2.0 * h);
    }
    return 0.5 * (hess + hess.transpose());
}

}  // namespace tirever::optim
