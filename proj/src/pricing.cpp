#include "rfqlab/pricing.hpp"

#include <cmath>
#include <functional>

namespace rfq {

void PricingProblem::validate() const {
    if (objective != PricingObjective::InstantaneousFlow && !(gamma > 0.0))
        throw InvalidParams("pricing: gamma must be positive");
    if (!(volume > 0.0)) throw InvalidParams("pricing: volume must be positive");
    if (!(p_ia >= 0.0 && p_ia <= 1.0)) throw InvalidProbability("pricing: p_ia must be in [0,1]");
    if (horizon < 0.0) throw InvalidParams("pricing: horizon must be >= 0");
    if (hit_multiplier < 0.0) throw InvalidParams("pricing: H must be >= 0");
}

namespace {

struct ModelSlice {
    const HitModel& model;
    const FeatureBundle& ctx;
    mutable bool saw_nonneg_derivative = false;

    double f(double d) const { return model.predict(d, ctx); }
    double df(double d) const {
        double v;
        if (model.has_analytic_derivative()) {
            v = model.predict_ddelta(d, ctx);
        } else {
            const double h = 1e-5 * std::max(1.0, std::fabs(d));
            v = (f(d + h) - f(d - h)) / (2.0 * h);
        }
        if (v >= 0.0) saw_nonneg_derivative = true;
        return v;
    }
    // -f/f', the flow-value fixed point quantity
    double markup(double d) const {
        const double fd = f(d);
        const double dfd = df(d);
        if (dfd >= 0.0) return std::numeric_limits<double>::quiet_NaN();
        return -fd / dfd;
    }
};

using Residual = std::function<double(double)>;

PricingSolution solve_residual(const ModelSlice& slice, const Residual& r,
                               const char* what) {
    // bracket a sign change of the residual, expanding from [0, 4]
    double lo = 0.0, hi = 4.0;
    double rlo = r(lo), rhi = r(hi);
    int guard = 0;
    while (std::isnan(rlo) && guard++ < 60) { // walk off non-monotone patches
        lo -= 0.25;
        rlo = r(lo);
    }
    guard = 0;
    while ((std::isnan(rhi) || rhi < 0.0) && guard++ < 60) {
        hi = hi * 2.0;
        rhi = r(hi);
    }
    guard = 0;
    while (rlo > 0.0 && guard++ < 60) {
        lo = lo - (hi - lo);
        rlo = r(lo);
        if (std::isnan(rlo)) break;
    }
    if (std::isnan(rlo) || std::isnan(rhi) || rlo > 0.0 || rhi < 0.0) {
        if (slice.saw_nonneg_derivative)
            throw NoBracket(std::string(what) + ": f' >= 0 on the sampled bracket; "
                                                "the model violates spread monotonicity");
        throw NonConvergence(std::string(what) + ": no residual sign change found");
    }

    PricingSolution sol;
    sol.bracket_lo = lo;
    sol.bracket_hi = hi;
    int it = 0;
    for (; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::fabs(lo) + std::fabs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double rm = r(mid);
        if (std::isnan(rm)) break;
        (rm < 0.0 ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    // Newton polish on the residual
    for (int k = 0; k < 4; ++k) {
        const double rx = r(x);
        const double h = 1e-6 * std::max(1.0, std::fabs(x));
        const double drx = (r(x + h) - r(x - h)) / (2.0 * h);
        if (!std::isfinite(rx) || !std::isfinite(drx) || drx == 0.0) break;
        const double step = rx / drx;
        const double xn = x - step;
        if (xn < sol.bracket_lo || xn > sol.bracket_hi) break;
        x = xn;
        if (std::fabs(step) < 1e-14 * std::max(1.0, std::fabs(x))) break;
    }
    sol.delta_opt = x;
    sol.residual = std::fabs(r(x));
    sol.iterations = it;
    sol.monotonicity_warning = slice.saw_nonneg_derivative;
    if (!(sol.residual <= 1e-8))
        throw NonConvergence(std::string(what) + ": residual above tolerance");
    return sol;
}

double exp_utility_markup(const ModelSlice& slice, double gamma_v, double d) {
    const double m = slice.markup(d); // -f/f'
    if (std::isnan(m)) return m;
    return std::log1p(gamma_v * m) / gamma_v;
}

} // namespace

PricingSolution optimal_spread_flow(const HitModel& model, const PricingProblem& problem) {
    problem.validate();
    ModelSlice slice{model, problem.context};
    auto residual = [&](double d) { return d - slice.markup(d); };
    PricingSolution sol = solve_residual(slice, residual, "optimal_spread_flow");
    sol.objective_value = problem.volume * sol.delta_opt * slice.f(sol.delta_opt);
    return sol;
}

PricingSolution optimal_spread_exp_utility(const HitModel& model, const PricingProblem& problem) {
    problem.validate();
    ModelSlice slice{model, problem.context};
    const double gv = problem.gamma * problem.volume;
    auto residual = [&](double d) { return d - exp_utility_markup(slice, gv, d); };
    PricingSolution sol = solve_residual(slice, residual, "optimal_spread_exp_utility");
    const double f = slice.f(sol.delta_opt);
    sol.objective_value =
        (1.0 - std::exp(-gv * sol.delta_opt)) * f; // E[U], U(0) = 0
    return sol;
}

PricingSolution optimal_spread_eod(const HitModel& model, const PricingProblem& problem) {
    problem.validate();
    ModelSlice slice{model, problem.context};
    const double gv = problem.gamma * problem.volume;
    const double inventory_term =
        problem.gamma * problem.sigma * problem.sigma * problem.horizon *
        (side_sign(problem.side) * problem.inventory + problem.volume / 2.0);
    auto residual = [&](double d) {
        return d - inventory_term - exp_utility_markup(slice, gv, d);
    };
    PricingSolution sol = solve_residual(slice, residual, "optimal_spread_eod");
    sol.objective_value = slice.f(sol.delta_opt);
    return sol;
}

double ia_spread_correction(const PricingProblem& problem) {
    problem.validate();
    const double p = problem.p_ia;
    const double h = problem.hit_multiplier;
    if (p == 0.0) return 0.0;
    const double gv = problem.gamma * problem.volume;
    const double mu_t = problem.drift * problem.horizon;
    const double q = problem.inventory;
    const double sv = side_sign(problem.side) * problem.volume;
    // log of (p e^{a}) + (1-p) H in a stable log-sum-exp form
    auto log_mix = [&](double expo) {
        const double la = std::log(p) + expo;
        if (p == 1.0 || h == 0.0) return la;
        const double lb = std::log((1.0 - p) * h);
        const double m = std::max(la, lb);
        return m + std::log(std::exp(la - m) + std::exp(lb - m));
    };
    const double num = log_mix(-problem.gamma * (q + sv) * mu_t);
    const double den = log_mix(-problem.gamma * q * mu_t);
    return (num - den) / gv;
}

} // namespace rfq
