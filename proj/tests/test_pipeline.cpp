#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rfqlab/model_io.hpp"
#include "rfqlab/pipeline.hpp"

#include "scenario_fixtures.hpp"

using namespace rfq;

namespace {

ExperimentSpec quick_spec(std::uint64_t seed) {
    ExperimentSpec spec;
    spec.seed = seed;
    RosterEntry majority{.kind = "majority"};
    RosterEntry logistic{.kind = "logistic"};
    logistic.c_grid = {1.0, 100.0};
    RosterEntry gbdt{.kind = "gbdt"};
    GbdtHyperparams hp;
    hp.n_estimators = 60;
    gbdt.gbdt_grid = {hp};
    spec.roster = {majority, logistic, gbdt};
    return spec;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("split: sizes, time ordering, shuffled determinism") {
    Dataset ten;
    for (int i = 0; i < 10; ++i) {
        RfqRecord r;
        r.timestamp = i;
        r.features.bond = {0, 0, 0, 0, 0};
        r.features.rfq = {1, 0};
        ten.push_back(r);
    }
    const auto parts = split(ten, SplitFractions{0.6, 0.2, 0.2}, 1);
    CHECK(parts.train.size() == 6);
    CHECK(parts.validation.size() == 2);
    CHECK(parts.test.size() == 2);
    CHECK(parts.train.back().timestamp <= parts.validation.front().timestamp);
    CHECK(parts.validation.back().timestamp <= parts.test.front().timestamp);

    // timestamp-free records fall back to a seeded shuffle
    for (auto& r : ten) r.timestamp = 0.0;
    const auto a = split(ten, SplitFractions{0.6, 0.2, 0.2}, 5);
    const auto b = split(ten, SplitFractions{0.6, 0.2, 0.2}, 5);
    for (std::size_t i = 0; i < a.train.size(); ++i)
        CHECK(a.train[i].delta_norm == b.train[i].delta_norm);

    CHECK_THROWS_AS(split(Dataset{}, SplitFractions{}, 1), TooFewRecords);
    SplitFractions bad{0.5, 0.2, 0.2};
    CHECK_THROWS_AS(split(ten, bad, 1), InvalidConfig);
}

TEST_CASE("winsorizer clamps to train percentiles, leaves the spread alone") {
    auto data = simulate(fixtures::benchmark_scenario(121, 4000)).records;
    data[0].features.bond[0] = 1e9; // absurd outlier
    const auto w = Winsorizer::fit(data, 0.005, 0.995);
    const auto clean = w.apply(data);
    CHECK(clean[0].features.bond[0] < 1e6);
    CHECK(clean[0].delta_norm == data[0].delta_norm);
    // dealer count untouched
    CHECK(clean[0].features.rfq[0] == data[0].features.rfq[0]);
}

TEST_CASE("experiment: majority baseline scores AUC 1/2 and near-zero BBSS") {
    const auto data = simulate(fixtures::benchmark_scenario(122, 12000)).records;
    ExperimentSpec spec;
    spec.seed = 3;
    spec.roster = {RosterEntry{.kind = "majority"}};
    const auto report = run_experiment(data, spec);
    REQUIRE(report.outcomes.size() == 1);
    CHECK(!report.outcomes[0].failed);
    CHECK(report.outcomes[0].test_report.auc == 0.5);
    CHECK(std::fabs(report.outcomes[0].test_report.bbss) < 0.02);
}

TEST_CASE("experiment runs the roster, selects on validation, and is reproducible") {
    namespace fs = std::filesystem;
    const auto data = simulate(fixtures::benchmark_scenario(123, 15000)).records;
    const auto spec = quick_spec(11);

    const auto rep1 = run_experiment(data, spec);
    REQUIRE(rep1.outcomes.size() == 3);
    for (const auto& o : rep1.outcomes) CHECK(!o.failed);
    CHECK(rep1.outcomes[1].test_report.auc > 0.6); // logistic beats coin flips here
    CHECK(rep1.outcomes[2].test_report.auc > 0.6);

    const fs::path dir1 = "pipe_out_a", dir2 = "pipe_out_b";
    write_experiment_report(rep1, spec, dir1.string());
    const auto rep2 = run_experiment(data, spec);
    write_experiment_report(rep2, spec, dir2.string());
    CHECK(slurp(dir1 / "reports" / "comparison.csv") == slurp(dir2 / "reports" / "comparison.csv"));
    CHECK(slurp(dir1 / "reports" / "summary.txt") == slurp(dir2 / "reports" / "summary.txt"));
    CHECK(!slurp(dir1 / "reports" / "importance_gbdt.csv").empty());
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("test rows never taint fitted parameters or model cards") {
    namespace fs = std::filesystem;
    auto data = simulate(fixtures::benchmark_scenario(124, 6000)).records;
    // sentinel values planted in the (time-ordered) test tail
    const double sentinel = 133713371337.25;
    for (std::size_t i = static_cast<std::size_t>(0.8 * data.size()); i < data.size(); ++i) {
        data[i].features.client[0] = sentinel;
        data[i].features.bond[2] = sentinel;
    }
    ExperimentSpec spec = quick_spec(9);
    spec.winsorize = false; // winsorization would clip the sentinels anyway
    const auto report = run_experiment(data, spec);
    const fs::path dir = "pipe_taint";
    write_experiment_report(report, spec, dir.string());
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string text = slurp(entry.path());
        CHECK(text.find("133713371337") == std::string::npos);
    }
    fs::remove_all(dir);
}

TEST_CASE("model cards round-trip through load_model") {
    namespace fs = std::filesystem;
    const auto cfg = fixtures::benchmark_scenario(125, 8000);
    const auto data = simulate(cfg).records;

    const auto lr = fit_logistic(data, LogisticOptions{});
    save_logistic(lr, 1, dataset_hash(data), "lr_card.json");
    const auto lr2 = load_model("lr_card.json");
    CHECK(lr2.kind == "logistic");

    GbdtHyperparams hp;
    hp.n_estimators = 30;
    const auto gb = fit_gbdt(data, hp, 2);
    save_gbdt(gb, 2, dataset_hash(data), "gb_card.json");
    const auto gb2 = load_model("gb_card.json");
    CHECK(gb2.kind == "gbdt");

    GenerativeFitReport rep;
    rep.params = cfg.params;
    save_generative(rep, true, true, 3, dataset_hash(data), "gen_card.json");
    const auto gen2 = load_model("gen_card.json");
    CHECK(gen2.kind == "generative");

    for (std::size_t i = 0; i < data.size(); i += 977) {
        const auto& r = data[i];
        CHECK(lr2.model->predict(r.delta_norm, r.features) ==
              doctest::Approx(lr.predict(r.delta_norm, r.features)).epsilon(1e-14));
        CHECK(gb2.model->predict(r.delta_norm, r.features) ==
              doctest::Approx(gb.predict(r.delta_norm, r.features)).epsilon(1e-14));
        const GenerativePredictor gen(cfg.params);
        CHECK(gen2.model->predict(r.delta_norm, r.features) ==
              doctest::Approx(gen.predict(r.delta_norm, r.features)).epsilon(1e-12));
    }
    fs::remove("lr_card.json");
    fs::remove("gb_card.json");
    fs::remove("gen_card.json");
}
