#pragma once

// Experiment orchestration: split, winsorize, train the roster, select
// hyperparameters on validation AUC, evaluate finalists once on test, and
// write the comparison and importance tables. Fitting interfaces never see
// the test split.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rfqlab/discriminative.hpp"
#include "rfqlab/generative_fit.hpp"
#include "rfqlab/metrics.hpp"

namespace rfq {

struct SplitFractions {
    double train = 0.6, validation = 0.2, test = 0.2;
    void validate() const;
};

struct SplitResult {
    Dataset train, validation, test;
};

// Time-ordered when timestamps vary (no leakage), seeded shuffle otherwise.
SplitResult split(const Dataset& records, const SplitFractions& fractions, std::uint64_t seed);

struct RosterEntry {
    std::string kind; // "majority" | "generative" | "logistic" | "gbdt"
    std::vector<double> c_grid = {100.0};          // logistic
    std::vector<GbdtHyperparams> gbdt_grid = {{}}; // gbdt
    FitOptions generative_options;                 // generative
    GenerativeParams generative_init;              // starting point for the MLE
    bool class_weight = true;
};

struct ExperimentSpec {
    SplitFractions fractions;
    std::vector<RosterEntry> roster;
    std::string selection_metric = "auc";
    std::uint64_t seed = 1;
    bool winsorize = true;
    double winsor_lo = 0.005, winsor_hi = 0.995; // train percentiles
    int calibration_bins = 10;

    void validate() const;
};

struct ModelOutcome {
    std::string kind;
    std::string selected; // human-readable hyperparameter choice
    double validation_auc = 0.0;
    EvalReport test_report;
    FeatureImportance importance;
    std::shared_ptr<HitModel> model;
    bool failed = false;
    std::string error;
};

struct ExperimentReport {
    double w_m = 0.5; // train majority frequency
    std::size_t n_train = 0, n_validation = 0, n_test = 0;
    std::uint64_t train_hash = 0;
    std::vector<ModelOutcome> outcomes;

    bool any_failed() const {
        for (const auto& o : outcomes)
            if (o.failed) return true;
        return false;
    }
};

ExperimentReport run_experiment(const Dataset& records, const ExperimentSpec& spec);

// reports/, models/ and figures/ under out_dir; byte-stable for fixed inputs.
void write_experiment_report(const ExperimentReport& report, const ExperimentSpec& spec,
                             const std::string& out_dir);

// Plot-ready ROC points (CSV) plus a minimal SVG under out_dir.
void write_roc_files(const HitModel& model, const Dataset& test, const std::string& out_dir,
                     const std::string& name);

// Winsorization transform fitted on train percentiles, applied per feature
// column (the quoted spread is left untouched).
struct Winsorizer {
    std::vector<double> lo, hi; // per flat feature column; empty = disabled
    static Winsorizer fit(const Dataset& train, double lo_q, double hi_q);
    Dataset apply(const Dataset& records) const;
};

} // namespace rfq
