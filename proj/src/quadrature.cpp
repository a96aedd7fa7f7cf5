#include "rfqlab/quadrature.hpp"

#include <cmath>

namespace rfq {

GaussLegendre::GaussLegendre(int order) {
    nodes.resize(order);
    weights.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev initial guess, then Newton on the Legendre recurrence.
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
}

const GaussLegendre& gl20() {
    static const GaussLegendre g(20);
    return g;
}

double Quadrature::integrate(const std::function<double(double)>& f, double a, double b) const {
    if (a == b) return 0.0;
    int budget = max_panels_;
    const double whole = gl20().panel(f, a, b);
    --budget;
    return refine(f, a, b, whole, 0, budget);
}

double Quadrature::refine(const std::function<double(double)>& f, double a, double b, double whole,
                          int depth, int& budget) const {
    const double m = 0.5 * (a + b);
    if (budget < 2 || depth > 60) return whole;
    const double left = gl20().panel(f, a, m);
    const double right = gl20().panel(f, m, b);
    budget -= 2;
    const double sum = left + right;
    const double err = std::fabs(sum - whole);
    if (err <= rel_tol_ * std::max(std::fabs(sum), 1e-300) || err < 1e-305) return sum;
    return refine(f, a, m, left, depth + 1, budget) + refine(f, m, b, right, depth + 1, budget);
}

} // namespace rfq
