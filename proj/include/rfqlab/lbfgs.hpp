#pragma once

// Small L-BFGS minimizer with backtracking Armijo line search. The objective
// callback fills the gradient and returns the value.

#include <functional>
#include <vector>

namespace rfq {

struct LbfgsOptions {
    int history = 10;
    int max_iterations = 400;
    double grad_tol = 1e-6;   // max-norm of the gradient
    double f_rel_tol = 1e-10; // relative objective change
};

struct LbfgsResult {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
    bool converged = false;
};

using ObjectiveFn = std::function<double(const std::vector<double>&, std::vector<double>&)>;

LbfgsResult lbfgs_minimize(const ObjectiveFn& fg, std::vector<double> x0,
                           const LbfgsOptions& options = {});

} // namespace rfq
