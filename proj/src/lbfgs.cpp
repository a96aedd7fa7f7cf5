#include "rfqlab/lbfgs.hpp"

#include <cmath>
#include <deque>

namespace rfq {

namespace {

double dotv(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double max_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

} // namespace

LbfgsResult lbfgs_minimize(const ObjectiveFn& fg, std::vector<double> x0,
                           const LbfgsOptions& opt) {
    const std::size_t n = x0.size();
    LbfgsResult res;
    res.x = std::move(x0);
    std::vector<double> g(n);
    double f = fg(res.x, g);

    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;

    std::vector<double> d(n), x_new(n), g_new(n);
    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        res.iterations = iter;
        if (max_norm(g) <= opt.grad_tol) {
            res.converged = true;
            break;
        }

        // two-loop recursion
        d = g;
        std::vector<double> alpha(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            alpha[i] = rho_hist[i] * dotv(s_hist[i], d);
            for (std::size_t j = 0; j < n; ++j) d[j] -= alpha[i] * y_hist[i][j];
        }
        if (!s_hist.empty()) {
            const double gamma =
                dotv(s_hist.back(), y_hist.back()) / dotv(y_hist.back(), y_hist.back());
            for (auto& v : d) v *= gamma;
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * dotv(y_hist[i], d);
            for (std::size_t j = 0; j < n; ++j) d[j] += (alpha[i] - beta) * s_hist[i][j];
        }
        for (auto& v : d) v = -v;

        double dg = dotv(d, g);
        if (!(dg < 0.0)) { // not a descent direction: reset to steepest descent
            for (std::size_t j = 0; j < n; ++j) d[j] = -g[j];
            dg = -dotv(g, g);
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        // backtracking Armijo
        double step = 1.0;
        double f_new = f;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t j = 0; j < n; ++j) x_new[j] = res.x[j] + step * d[j];
            f_new = fg(x_new, g_new);
            if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * dg) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break; // line search stalled; report best point

        std::vector<double> s(n), y(n);
        for (std::size_t j = 0; j < n; ++j) {
            s[j] = x_new[j] - res.x[j];
            y[j] = g_new[j] - g[j];
        }
        const double sy = dotv(s, y);
        if (sy > 1e-12 * std::sqrt(dotv(s, s) * dotv(y, y) + 1e-300)) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > opt.history) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }

        const double f_change = std::fabs(f - f_new);
        res.x.swap(x_new);
        g.swap(g_new);
        f = f_new;
        if (f_change <= opt.f_rel_tol * (std::fabs(f) + 1.0)) {
            res.converged = true;
            res.iterations = iter + 1;
            break;
        }
    }
    res.f = f;
    return res;
}

} // namespace rfq
