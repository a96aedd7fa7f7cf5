#include "doctest.h"

#include <cmath>

#include "rfqlab/axe.hpp"
#include "rfqlab/generative_fit.hpp"
#include "scenario_fixtures.hpp"

using namespace rfq;

namespace {

std::vector<CandidateRow> hand_rows(int n_call, int k_call, int n_nocall, int k_nocall) {
    std::vector<CandidateRow> rows;
    std::uint64_t id = 0;
    auto push = [&](bool call, bool occurred) {
        rows.push_back({id++, 0, 0, true, call, occurred});
    };
    for (int i = 0; i < n_call; ++i) push(true, i < k_call);
    for (int i = 0; i < n_nocall; ++i) push(false, i < k_nocall);
    return rows;
}

} // namespace

TEST_CASE("uplift: equal frequencies, empty cell, smoothing") {
    const auto equal = uplift(hand_rows(400, 100, 400, 100), 0, 0, {});
    CHECK(equal.uplift == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(!equal.insufficient_data);

    UpliftOptions opt;
    opt.smoothing = 1.0;
    const auto empty = uplift({}, 0, 0, opt);
    CHECK(empty.p_rfq_given_call == doctest::Approx(0.5));
    CHECK(empty.p_rfq_given_nocall == doctest::Approx(0.5));
    CHECK(empty.uplift == 0.0);
    CHECK(empty.insufficient_data);
    CHECK(empty.se_call == doctest::Approx(std::sqrt(0.25 / 2.0))); // wide
}

TEST_CASE("uplift recovers the simulated call effect within 3 standard errors") {
    auto cfg = fixtures::benchmark_scenario(111, 60000);
    cfg.candidate_mode = true;
    cfg.dt = 0.25;
    cfg.cells = {2, 2};
    cfg.sampler.axe_prob = 1.0; // axe-on world for the uplift arm
    cfg.params.call_prob[0] = cfg.params.call_prob[1] = 0.5; // randomized calls
    cfg.params.intensity.base = 1.6;
    cfg.params.intensity.call = 0.9;
    cfg.params.intensity.client = {0, 0};
    cfg.params.intensity.bond = {0, 0, 0, 0, 0};
    cfg.params.intensity.rfq = {0, 0};
    const auto ds = simulate(cfg);

    // ground truth: P(RfQ | do(call=c)) = clamp(lambda(c) dt)
    const double truth = std::min(1.0, (1.6 + 0.9) * 0.25) - std::min(1.0, 1.6 * 0.25);
    for (int c = 0; c < 2; ++c)
        for (int b = 0; b < 2; ++b) {
            const auto est = uplift(ds.candidates, c, b, {});
            CHECK(!est.insufficient_data);
            CHECK(std::fabs(est.uplift - truth) <= 3.0 * est.se_uplift);
        }
}

TEST_CASE("ace degenerates correctly and keeps the uplift sign") {
    const auto rows = hand_rows(300, 90, 300, 30); // uplift 0.2
    AxeQuery q;
    q.client_cell = 0;
    q.bond_cell = 0;
    q.delta_star = 1.0;
    q.rf_samples = {fixtures::context_at(0.5, 3)};

    const MajorityClassModel certain(1.0);
    const auto est = axe_ace(rows, q, certain, {});
    CHECK(est.hit_term_set);
    CHECK(est.on_call_hit_prob == 1.0);
    CHECK(est.ace == doctest::Approx(est.uplift)); // hit term 1 -> ace = uplift

    const auto flat = uplift(hand_rows(400, 100, 400, 100), 0, 0, {});
    AxeQuery q2 = q;
    const MajorityClassModel half(0.5);
    const auto est2 = axe_ace(hand_rows(400, 100, 400, 100), q2, half, {});
    CHECK(est2.ace == doctest::Approx(0.0).epsilon(1e-12)); // uplift 0 -> ace 0
    CHECK(flat.uplift == doctest::Approx(0.0).epsilon(1e-12));

    // sign agreement
    CHECK(est.ace * est.uplift >= 0.0);
}

TEST_CASE("rfq preference: single cell and uniform cells") {
    auto cfg = fixtures::benchmark_scenario(112, 40000);
    cfg.candidate_mode = true;
    cfg.dt = 0.3;
    cfg.cells = {3, 2};
    cfg.params.intensity = {};
    cfg.params.intensity.base = 1.5;
    const auto ds = simulate(cfg);
    const double expected = std::min(1.0, 1.5 * 0.3);
    for (int c = 0; c < 3; ++c)
        for (int b = 0; b < 2; ++b) {
            const double p = rfq_preference(ds.candidates, c, b, 1.0);
            CHECK(std::fabs(p - expected) < 0.02); // cells are exchangeable here
        }
}

TEST_CASE("bayes factorization reproduces the direct conditional") {
    auto cfg = fixtures::benchmark_scenario(113, 80000);
    cfg.candidate_mode = true;
    cfg.dt = 0.2;
    cfg.cells = {1, 1}; // one dense cell
    cfg.sampler.axe_prob = 0.5;
    cfg.params.call_prob[0] = 0.25;
    cfg.params.call_prob[1] = 0.7;
    cfg.params.intensity = {};
    cfg.params.intensity.base = 1.4;
    cfg.params.intensity.call = 0.8;
    cfg.params.intensity.axe = 0.6;
    const auto ds = simulate(cfg);
    const auto f = bayes_factors(ds.candidates, 1.0);
    const double p_rfq = rfq_preference(ds.candidates, 0, 0, 1.0);

    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) {
            // direct smoothed estimate of P(RfQ | call=c, axe=a, cell)
            double n = 0.0, k = 0.0;
            for (const auto& row : ds.candidates) {
                if (static_cast<int>(row.axe) != a || static_cast<int>(row.call) != c) continue;
                n += 1.0;
                k += row.occurred ? 1.0 : 0.0;
            }
            const double direct = (k + 1.0) / (n + 2.0);

            auto call_factor = [&](int rfq) {
                const double pc = f.p_call_given_axe_rfq[a][rfq];
                return c == 1 ? pc : 1.0 - pc;
            };
            auto axe_factor = [&](int rfq) {
                const double pa = f.p_axe_given_rfq[rfq];
                return a == 1 ? pa : 1.0 - pa;
            };
            const double num = call_factor(1) * axe_factor(1) * p_rfq;
            const double den = num + call_factor(0) * axe_factor(0) * (1.0 - p_rfq);
            CHECK(std::fabs(num / den - direct) < 0.02);
        }
}

TEST_CASE("ranked axe matches sort lexicographically") {
    auto rows = hand_rows(400, 200, 400, 100); // cell (0,0): uplift 0.25
    for (auto& r : hand_rows(400, 100, 400, 100)) {
        r.client_cell = 1; // cell (1,0): uplift 0
        rows.push_back(r);
    }
    AxeQuery q0{0, 0, 1.0, {fixtures::context_at(0.5, 3)}};
    AxeQuery q1{1, 0, 1.0, {fixtures::context_at(0.5, 3)}};
    const MajorityClassModel half(0.5);
    const auto ranked = rank_axe_matches(rows, {q1, q0}, half, {});
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0].client_cell == 0); // larger ace first
    CHECK(ranked[0].ace > ranked[1].ace);
}
