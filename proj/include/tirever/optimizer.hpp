#pragma once

#include <Eigen/Core>

#include <functional>

namespace tirever::optim {

/// Objective to minimise. When `gradient` is non-null the callee fills it.
/// Infeasible points return +infinity.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* gradient)>;

struct Options {
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;
    double function_tolerance = 1e-12;
    double initial_simplex_step = 0.1;
};

struct Result {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Derivative-free downhill simplex. Only function values are requested.
Result nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const Options& options = {});

/// BFGS on the inverse Hessian with a backtracking Armijo line search.
/// Steps into infeasible (+inf) regions are shrunk until feasible.
Result bfgs(const Objective& f, const Eigen::VectorXd& x0, const Options& options = {});

/// Central finite-difference Jacobian of the gradient, symmetrised.
/// step_i = max(rel_step, rel_step * |x_i|).
Eigen::MatrixXd hessian_from_gradient(const Objective& f, const Eigen::VectorXd& x,
                                      double rel_step = 1e-4);

}  // namespace tirever::optim
