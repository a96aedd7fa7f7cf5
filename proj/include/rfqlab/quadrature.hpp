#pragma once

// 1-D adaptive panel Gauss-Legendre quadrature for smooth integrands.
// Relative tolerance 1e-8 by default, hard cap 4096 panels (subdivision
// stops there and the current estimate is returned).

#include <cmath>
#include <functional>
#include <vector>

#include "rfqlab/errors.hpp"

namespace rfq {

// Nodes/weights on [-1,1] computed by Newton iteration on the Legendre
// recurrence; weights are strictly positive.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int order);

    // Panel-mapped evaluation of f over [a,b].
    template <typename F>
    auto panel(F&& f, double a, double b) const {
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        auto acc = f(mid + half * nodes[0]) * weights[0];
        for (std::size_t i = 1; i < nodes.size(); ++i)
            acc += f(mid + half * nodes[i]) * weights[i];
        return acc * half;
    }
};

const GaussLegendre& gl20();

class Quadrature {
public:
    explicit Quadrature(double rel_tol = 1e-8, int max_panels = 4096)
        : rel_tol_(rel_tol), max_panels_(max_panels) {}

    double integrate(const std::function<double(double)>& f, double a, double b) const;

    double rel_tol() const { return rel_tol_; }
    int max_panels() const { return max_panels_; }

private:
    double refine(const std::function<double(double)>& f, double a, double b, double whole,
                  int depth, int& budget) const;

    double rel_tol_;
    int max_panels_;
};

} // namespace rfq
