#include "doctest.h"

#include <cmath>

#include "rfqlab/causal.hpp"
#include "rfqlab/generative_fit.hpp"
#include "scenario_fixtures.hpp"

using namespace rfq;

TEST_CASE("conditioning-set registry matches the graph analysis") {
    const auto hit = conditioning_set(CausalTarget::HitProb);
    CHECK(hit.conditioning == std::vector<std::string>{"sigma", "RF", "BF", "CF"});
    CHECK(hit.marginalize.empty());

    const auto rev = conditioning_set(CausalTarget::RevenuesOnHit);
    CHECK(rev.conditioning == std::vector<std::string>{"sigma", "RF"});
    CHECK(rev.marginalize == std::vector<std::string>{"IA"});

    const auto up = conditioning_set(CausalTarget::Uplift);
    CHECK(up.conditioning == std::vector<std::string>{"axe"});
    CHECK(up.marginalize.empty());

    CHECK_THROWS_AS(conditioning_set(static_cast<CausalTarget>(99)), UnknownTarget);
}

TEST_CASE("marginalized hit probability: point mass, enumeration, Monte Carlo") {
    const auto cfg = fixtures::benchmark_scenario(101, 1);
    const GenerativePredictor gen(cfg.params);
    const auto ctx = fixtures::context_at(0.5, 3);

    // point mass reproduces the plain prediction exactly
    ExcludedFeature point{"sigma", {0.5}, {1.0}, false, 0, 1};
    const auto pm = marginalized_hit_prob(gen, 1.0, ctx, {point}, 10);
    CHECK(pm.exact);
    CHECK(pm.value == gen.predict(1.0, ctx));

    // two-point mixture equals the weighted average of the two predictions
    ExcludedFeature two{"sigma", {0.3, 0.9}, {0.3, 0.7}, false, 0, 1};
    const auto tp = marginalized_hit_prob(gen, 1.0, ctx, {two}, 10);
    CHECK(tp.exact);
    auto at_sigma = [&](double s) {
        auto c = ctx;
        c.volatility = s;
        return gen.predict(1.0, c);
    };
    CHECK(std::fabs(tp.value - (0.3 * at_sigma(0.3) + 0.7 * at_sigma(0.9))) <= 1e-12);

    // continuous feature: two Monte Carlo runs agree within combined error
    ExcludedFeature gauss{"dv01", {}, {}, true, 0.0, 1.0};
    const auto a = marginalized_hit_prob(gen, 1.0, ctx, {gauss}, 10000, 5);
    const auto b = marginalized_hit_prob(gen, 1.0, ctx, {gauss}, 100000, 6);
    CHECK(!a.exact);
    const double combined = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
    CHECK(std::fabs(a.value - b.value) <= 3.0 * combined);

    ExcludedFeature bogus{"nope", {1.0}, {1.0}, false, 0, 1};
    CHECK_THROWS_AS(marginalized_hit_prob(gen, 1.0, ctx, {bogus}, 10), LayoutMismatch);
}

TEST_CASE("audit: without confounding both estimators track the truth") {
    auto cfg = fixtures::benchmark_scenario(103, 1);
    // spread policy independent of everything
    cfg.policy.g1_sigma = 0.0;
    cfg.policy.bond_weights = {};
    cfg.policy.g3_axe = 0.0;
    cfg.policy.g0 = 1.1;
    cfg.policy.noise_sd = 0.45;

    const GenerativePredictor truth_model(cfg.params);
    AuditOptions opt;
    opt.n_observational = 40000;
    opt.n_interventional = 40000;
    const auto report =
        causal_audit(cfg, {0.7, 1.1, 1.5}, {{"generative", &truth_model}}, opt);
    for (const auto& pt : report.points) {
        CHECK(std::fabs(pt.naive - pt.truth) <=
              4.0 * std::sqrt(pt.naive_se * pt.naive_se + pt.truth_se * pt.truth_se) + 0.01);
        CHECK(std::fabs(pt.adjusted[0] - pt.truth) <= 4.0 * pt.truth_se + 0.01);
    }
}

TEST_CASE("audit: confounding bends the naive estimator, adjustment straightens it") {
    auto cfg = fixtures::benchmark_scenario(104, 1);
    cfg.policy.g1_sigma = 1.3; // dealers quote wide when vol is high...
    cfg.params.reservation.sigma_coef = 1.6; // ...and clients accept wide then
    cfg.policy.noise_sd = 0.35;

    const GenerativePredictor truth_model(cfg.params);
    AuditOptions opt;
    opt.n_observational = 50000;
    opt.n_interventional = 50000;
    const auto report = causal_audit(cfg, {0.8, 1.4, 2.0}, {{"generative", &truth_model}}, opt);
    double worst_naive = 0.0, worst_adjusted = 0.0;
    for (const auto& pt : report.points) {
        worst_naive = std::max(worst_naive, std::fabs(pt.naive - pt.truth));
        worst_adjusted = std::max(worst_adjusted, std::fabs(pt.adjusted[0] - pt.truth));
    }
    CHECK(worst_naive > 0.04);
    CHECK(worst_adjusted < 0.015);
    CHECK_THROWS_AS(causal_audit(cfg, {}, {}, opt), InvalidConfig);
}
