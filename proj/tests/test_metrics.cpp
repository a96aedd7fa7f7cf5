#include "doctest.h"

#include <cmath>

#include "rfqlab/discriminative.hpp"
#include "rfqlab/generative_fit.hpp"
#include "rfqlab/metrics.hpp"
#include "rfqlab/rng.hpp"
#include "scenario_fixtures.hpp"

using namespace rfq;

namespace {

double auc_pairwise_oracle(const std::vector<double>& s, const std::vector<int>& y) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (!(y[i] == 1 && y[j] == 0)) continue;
            den += 1.0;
            if (s[i] > s[j]) num += 1.0;
            else if (s[i] == s[j]) num += 0.5;
        }
    return num / den;
}

} // namespace

TEST_CASE("auc: exact separation, constants, and the pairwise oracle") {
    CHECK(auc_roc({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1}) == 1.0);
    CHECK(auc_roc({0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 1}) == 0.5);

    RngStream rng(11, 0);
    std::vector<double> s(1000);
    std::vector<int> y(1000);
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = std::round(rng.uniform01() * 50.0) / 50.0; // force ties
        y[i] = rng.bernoulli(0.3) ? 1 : 0;
    }
    CHECK(auc_roc(s, y) == auc_pairwise_oracle(s, y));
    CHECK_THROWS_AS(auc_roc({0.1, 0.2}, {1, 1}), SingleClass);
}

TEST_CASE("balanced brier: benchmark identities") {
    for (double w_m : {0.6, 0.75, 0.943986}) {
        const std::size_t n = 4000;
        std::vector<int> y(n);
        const std::size_t n_lost = static_cast<std::size_t>(std::llround(w_m * n));
        for (std::size_t i = 0; i < n; ++i) y[i] = i < n_lost ? 0 : 1;
        const double wm_exact = static_cast<double>(n_lost) / n;
        std::vector<double> bench(n, wm_exact);
        const auto bs = balanced_brier(bench, y, wm_exact);
        CHECK(std::fabs(bs.bbs - bbs_benchmark(wm_exact)) < 1e-12);
        CHECK(std::fabs(bs.bbss) < 1e-12);
        // the complementary constant scores identically
        std::vector<double> bench2(n, 1.0 - wm_exact);
        CHECK(std::fabs(balanced_brier(bench2, y, wm_exact).bbss) < 1e-12);
    }
    std::vector<int> y = {0, 0, 0, 1};
    std::vector<double> perfect = {0.0, 0.0, 0.0, 1.0};
    const auto bs = balanced_brier(perfect, y, 0.75);
    CHECK(bs.bbs == 0.0);
    CHECK(bs.bbss == 1.0);
    CHECK_THROWS_AS(balanced_brier(perfect, y, 1.0), DegenerateWeight);
}

TEST_CASE("bbs benchmark at the published counts") {
    const double w_m = 0.943986; // 102,437 RfQs of which 5,738 hits
    CHECK(std::fabs(bbs_benchmark(w_m) - 0.447124) < 1e-6);
    CHECK(1.0 - 5738.0 / 102437.0 == doctest::Approx(w_m).epsilon(2e-6));
}

TEST_CASE("calibration bins: hand-enumerated example and edge cases") {
    const std::vector<double> s = {0.1, 0.1, 0.1, 0.1, 0.9, 0.9, 0.9, 0.9};
    const std::vector<int> y = {0, 0, 0, 1, 1, 1, 1, 0};
    const auto bins = calibration_bins(s, y, 2);
    REQUIRE(bins.size() == 2);
    CHECK(bins[0].mean_pred == doctest::Approx(0.1));
    CHECK(bins[0].empirical == doctest::Approx(0.25));
    CHECK(bins[0].count == 4);
    CHECK(bins[1].mean_pred == doctest::Approx(0.9));
    CHECK(bins[1].empirical == doctest::Approx(0.75));
    CHECK(bins[1].count == 4);

    const auto constant = calibration_bins({0.5, 0.5, 0.5}, {1, 0, 0}, 10);
    std::size_t populated = 0;
    for (const auto& b : constant)
        if (b.count) {
            ++populated;
            CHECK(b.empirical == doctest::Approx(1.0 / 3.0));
        }
    CHECK(populated == 1);
}

TEST_CASE("calibrated synthetic scores stay within binomial error per bin") {
    RngStream rng(13, 0);
    const std::size_t n = 60000;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = rng.uniform01();
        y[i] = rng.bernoulli(s[i]) ? 1 : 0;
    }
    for (const auto& b : calibration_bins(s, y, 10)) {
        if (b.count < 50) continue;
        const double se = std::sqrt(b.mean_pred * (1.0 - b.mean_pred) /
                                    static_cast<double>(b.count));
        CHECK(std::fabs(b.mean_pred - b.empirical) <= 3.5 * se + 1e-9);
    }
}

TEST_CASE("monotonicity audit: generative and logistic clean, gbdt dirty") {
    const auto cfg = fixtures::benchmark_scenario(71, 20000);
    const auto data = simulate(cfg).records;

    std::vector<FeatureBundle> contexts;
    for (std::size_t i = 0; i < data.size(); i += 40) contexts.push_back(data[i].features);
    std::vector<double> grid(64);
    for (int i = 0; i < 64; ++i) grid[i] = -0.5 + 3.0 * i / 63.0;

    const GenerativePredictor gen(cfg.params);
    CHECK(monotonicity_audit(gen, contexts, grid).violations == 0);

    const auto lr = fit_logistic(data, LogisticOptions{});
    CHECK(lr.spread_weight() < 0.0);
    CHECK(monotonicity_audit(lr, contexts, grid).violations == 0);

    GbdtHyperparams hp;
    hp.n_estimators = 120;
    const auto gb = fit_gbdt(data, hp, 21);
    const auto rep = monotonicity_audit(gb, contexts, grid);
    CHECK(rep.violations >= 1); // trees have no structural monotonicity
    CHECK(rep.worst_jump > 1e-9);

    std::vector<double> bad_grid = {1.0, 0.5};
    CHECK_THROWS_AS(monotonicity_audit(gen, contexts, bad_grid), InvalidParams);
}

TEST_CASE("feature importance: noise feature ranks last, spread ranks first") {
    const auto cfg = fixtures::benchmark_scenario(72, 15000);
    const auto data = simulate(cfg).records; // client_f2 has tiny true effect
    const auto lr = fit_logistic(data, LogisticOptions{});

    const auto perm = feature_importance(lr, data, ImportanceMethod::Permutation, 7, 8);
    CHECK(perm.rank[0] == 1); // spread drives everything

    const auto coef = feature_importance(lr, data, ImportanceMethod::StdCoefficients);
    CHECK(coef.rank[0] == 1);
    CHECK_THROWS_AS(feature_importance(lr, data, ImportanceMethod::Gain), IncompatibleMethod);

    GbdtHyperparams hp;
    hp.n_estimators = 80;
    const auto gb = fit_gbdt(data, hp, 3);
    const auto gain = feature_importance(gb, data, ImportanceMethod::Gain);
    CHECK(gain.rank[0] <= 3); // gain ranks are data-dependent; spread stays near the top
    CHECK(gain.values[0] > 0.0);
    CHECK_THROWS_AS(feature_importance(gb, data, ImportanceMethod::StdCoefficients),
                    IncompatibleMethod);
}

TEST_CASE("logistic importance of a dead feature is exactly zero") {
    auto lr = LogisticModel{};
    lr.layout = FeatureLayout{1};
    lr.standardizer.mean.assign(lr.layout.size(), 0.0);
    lr.standardizer.sd.assign(lr.layout.size(), 1.0);
    lr.weights.assign(lr.layout.size(), 0.5);
    lr.weights[3] = 0.0; // maturity unused
    Dataset probe = simulate(fixtures::benchmark_scenario(73, 50)).records;
    for (auto& r : probe) r.features.client.resize(1);
    const auto imp = feature_importance(lr, probe, ImportanceMethod::StdCoefficients);
    CHECK(imp.values[3] == 0.0);
    CHECK(imp.rank[3] == static_cast<int>(lr.layout.size()));
}

TEST_CASE("duplicated feature splits its gain but keeps the sum") {
    // a world where client features carry no signal, then copy dv01 into one
    auto cfg = fixtures::benchmark_scenario(74, 30000);
    cfg.params.reservation.client = {0.0, 0.0};
    cfg.params.dealer_shift.client = {0.0, 0.0};
    auto base_data = simulate(cfg).records;
    Dataset dup_data = base_data;
    for (auto& r : dup_data) r.features.client[1] = r.features.bond[0];
    GbdtHyperparams hp;
    hp.n_estimators = 150;
    hp.subsample = 1.0;
    const auto base_model = fit_gbdt(base_data, hp, 4);
    const auto dup_model = fit_gbdt(dup_data, hp, 4);
    const auto base_gain = feature_importance(base_model, base_data, ImportanceMethod::Gain);
    const auto dup_gain = feature_importance(dup_model, dup_data, ImportanceMethod::Gain);
    const double single = base_gain.values[2]; // dv01 column
    const double twins = dup_gain.values[2] + dup_gain.values[10]; // dv01 + client_f2 copy
    CHECK(std::fabs(twins - single) / std::max(single, 1e-12) < 0.10);
}

TEST_CASE("ks statistic against a known cdf") {
    RngStream rng(14, 0);
    std::vector<double> xs(20000);
    for (auto& x : xs) x = rng.normal();
    const double ks = ks_statistic(xs, [](double x) { return std_normal_cdf(x); });
    CHECK(ks < 0.012);
    CHECK(ks > 0.0);
}

TEST_CASE("evaluate bundles the report") {
    const auto cfg = fixtures::benchmark_scenario(75, 8000);
    const auto data = simulate(cfg).records;
    const GenerativePredictor gen(cfg.params);
    const double w_m = majority_frequency(data);
    const auto rep = evaluate(gen, data, w_m);
    CHECK(rep.auc > 0.65);
    CHECK(rep.bbss > 0.0);
    CHECK(rep.monotonicity_violations == 0);
    CHECK(rep.n == data.size());
}
