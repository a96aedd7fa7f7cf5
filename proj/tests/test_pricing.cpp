#include "doctest.h"

#include <cmath>

#include "rfqlab/generative_fit.hpp"
#include "rfqlab/pricing.hpp"
#include "rfqlab/revenue.hpp"
#include "rfqlab/rng.hpp"
#include "scenario_fixtures.hpp"

using namespace rfq;

namespace {

// grid + golden-section argmax oracle over a bracket
template <typename F>
double argmax_oracle(F objective, double lo, double hi) {
    double best_x = lo, best_v = -1e300;
    const int n = 10000;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double v = objective(x);
        if (v > best_v) {
            best_v = v;
            best_x = x;
        }
    }
    double a = std::max(lo, best_x - (hi - lo) / n);
    double b = std::min(hi, best_x + (hi - lo) / n);
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
        if (objective(c) < objective(d)) {
            a = c;
        } else {
            b = d;
        }
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    return 0.5 * (a + b);
}

PricingProblem base_problem() {
    PricingProblem p;
    p.gamma = 1.0;
    p.volume = 1.0;
    p.context = fixtures::context_at(0.5, 3);
    return p;
}

} // namespace

TEST_CASE("flow-value spread: exponential closed form and grid oracle") {
    const ExponentialSpreadModel model(0.8, 2.0);
    auto prob = base_problem();
    const auto sol = optimal_spread_flow(model, prob);
    CHECK(std::fabs(sol.delta_opt - 0.5) <= 1e-8); // 1/alpha
    CHECK(sol.residual <= 1e-8);

    const double oracle = argmax_oracle(
        [&](double d) { return d * model.predict(d, prob.context); }, 0.0, 4.0);
    CHECK(std::fabs(sol.delta_opt - oracle) <= 1e-6);
}

TEST_CASE("flow-value spread is invariant to rescaling f") {
    auto prob = base_problem();
    for (double p0 : {0.05, 0.3, 0.9}) {
        const ExponentialSpreadModel model(p0, 1.7);
        CHECK(optimal_spread_flow(model, prob).delta_opt ==
              doctest::Approx(1.0 / 1.7).epsilon(1e-8));
    }
}

TEST_CASE("a flat hit curve raises NoBracket") {
    const MajorityClassModel flat(0.4);
    CHECK_THROWS_AS(optimal_spread_flow(flat, base_problem()), NoBracket);
}

TEST_CASE("exp-utility spread: closed form, gamma->0 limit, risk-averse ordering") {
    const ExponentialSpreadModel model(0.8, 2.0);
    auto prob = base_problem();
    prob.gamma = 1.0;
    const auto sol = optimal_spread_exp_utility(model, prob);
    CHECK(std::fabs(sol.delta_opt - std::log(1.5)) <= 1e-8); // (1/gv) log(1+gv/alpha)

    // numeric argmax of expected utility: (1 - e^{-gv d}) f(d)
    const double oracle = argmax_oracle(
        [&](double d) { return (1.0 - std::exp(-d)) * model.predict(d, prob.context); }, 0.0,
        4.0);
    CHECK(std::fabs(sol.delta_opt - oracle) <= 1e-6);

    prob.gamma = 1e-6;
    const auto flow = optimal_spread_flow(model, prob);
    CHECK(std::fabs(optimal_spread_exp_utility(model, prob).delta_opt - flow.delta_opt) <= 1e-4);

    prob.gamma = 1e3;
    CHECK(optimal_spread_exp_utility(model, prob).delta_opt < flow.delta_opt);
}

TEST_CASE("end-of-day spread: worked example and reductions") {
    const ExponentialSpreadModel model(0.8, 2.0);
    PricingProblem prob = base_problem();
    prob.objective = PricingObjective::EndOfDayUtility;
    prob.gamma = 0.1;
    prob.sigma = 0.2;
    prob.horizon = 1.0;
    prob.side = Side::Sell;
    prob.inventory = 10.0;
    prob.volume = 2.0;

    const auto sol = optimal_spread_eod(model, prob);
    // inventory term 0.1*0.04*1*11 = 0.044 plus 5 log(1.1)
    const double expected = 0.044 + 5.0 * std::log(1.1);
    CHECK(std::fabs(sol.delta_opt - expected) <= 1e-8);

    // numeric maximization of the end-of-day expected utility
    const double gv = prob.gamma * prob.volume;
    const double var = prob.sigma * prob.sigma * prob.horizon;
    const double q = prob.inventory, v = prob.volume;
    auto eu = [&](double d) {
        const double f = model.predict(d, prob.context);
        const double hit = -std::exp(-gv * d + 0.5 * prob.gamma * prob.gamma * (q + v) * (q + v) * var);
        const double miss = -std::exp(0.5 * prob.gamma * prob.gamma * q * q * var);
        return f * hit + (1.0 - f) * miss;
    };
    const double oracle = argmax_oracle(eu, 0.0, 4.0);
    CHECK(std::fabs(sol.delta_opt - oracle) <= 1e-6);

    // inventory cancellation and sigma = 0 both reduce to exp utility
    auto cancel = prob;
    cancel.inventory = -prob.volume / 2.0 * side_sign(prob.side);
    CHECK(optimal_spread_eod(model, cancel).delta_opt ==
          doctest::Approx(optimal_spread_exp_utility(model, cancel).delta_opt).epsilon(1e-10));
    auto calm = prob;
    calm.sigma = 0.0;
    CHECK(optimal_spread_eod(model, calm).delta_opt ==
          doctest::Approx(optimal_spread_exp_utility(model, calm).delta_opt).epsilon(1e-10));
}

TEST_CASE("solvers match the grid oracle on random generative scenarios") {
    const auto cfg = fixtures::benchmark_scenario(81, 1);
    const GenerativePredictor gen(cfg.params);
    RngStream rng(81, 0);
    for (int t = 0; t < 6; ++t) {
        FeatureBundle ctx;
        ctx.client = {rng.normal(), rng.normal()};
        ctx.bond = {rng.normal(), rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        ctx.rfq = {static_cast<double>(rng.uniform_int(1, 5)), rng.normal()};
        ctx.volatility = std::exp(-0.3 + 0.3 * rng.normal());
        PricingProblem prob;
        prob.volume = 1.0 + rng.uniform01();
        prob.context = ctx;
        const auto sol = optimal_spread_flow(gen, prob);
        const double oracle = argmax_oracle(
            [&](double d) { return prob.volume * d * gen.predict(d, ctx); }, sol.bracket_lo,
            sol.bracket_hi);
        CHECK(std::fabs(sol.delta_opt - oracle) <= 1e-6);
        // local-max certificate
        const double at = prob.volume * sol.delta_opt * gen.predict(sol.delta_opt, ctx);
        for (double eps : {-1e-3, 1e-3})
            CHECK(at >= prob.volume * (sol.delta_opt + eps) *
                            gen.predict(sol.delta_opt + eps, ctx) -
                        1e-12);
    }
}

TEST_CASE("ia spread correction: limits and H-monotonicity") {
    PricingProblem prob = base_problem();
    prob.gamma = 1.0;
    prob.volume = 1.0;
    prob.inventory = 0.0;
    prob.side = Side::Buy;
    prob.drift = 0.5;
    prob.horizon = 1.0;
    prob.hit_multiplier = 1.0;

    prob.p_ia = 0.0;
    CHECK(ia_spread_correction(prob) == 0.0);

    prob.p_ia = 1.0;
    // dealer buys, mu tau = 0.5: client pays the full expected drift
    CHECK(ia_spread_correction(prob) == doctest::Approx(0.5).epsilon(1e-12));

    prob.p_ia = 0.4;
    double prev = std::fabs(ia_spread_correction(prob));
    for (double h : {1.2, 1.6, 2.4, 4.0}) {
        prob.hit_multiplier = h;
        const double cur = std::fabs(ia_spread_correction(prob));
        CHECK(cur < prev);
        prev = cur;
    }

    // correction vanishes with the drift
    prob.hit_multiplier = 1.0;
    for (double pia : {0.2, 0.7, 1.0}) {
        prob.p_ia = pia;
        prob.drift = 0.0;
        CHECK(std::fabs(ia_spread_correction(prob)) < 1e-15);
    }
    prob.p_ia = 1.5;
    CHECK_THROWS_AS(ia_spread_correction(prob), InvalidProbability);
}
