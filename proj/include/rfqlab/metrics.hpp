#pragma once

// Evaluation suite: AUC-ROC (average-rank ties), Balanced Brier Score and
// Skill Score, calibration bins, spread-monotonicity audit and feature
// importance.
//
// BBS weights rebalance the two classes exactly: an observation of class
// o gets weight w_m^o (1-w_m)^(1-o) with w_m the majority-class (lost)
// frequency from the TRAINING split. With that weighting the constant
// benchmark predictor has BBS = 1/2 - w_m (1-w_m) identically, which is the
// analytic BBS_bench the skill score divides by.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rfqlab/discriminative.hpp"
#include "rfqlab/domain.hpp"
#include "rfqlab/hit_model.hpp"

namespace rfq {

double auc_roc(const std::vector<double>& scores, const std::vector<int>& labels);

inline double bbs_benchmark(double w_m) { return 0.5 - w_m * (1.0 - w_m); }

struct BrierScores {
    double bbs = 0.0;
    double bbss = 0.0;
};
BrierScores balanced_brier(const std::vector<double>& scores, const std::vector<int>& labels,
                           double w_m);

struct CalibrationBin {
    double mean_pred = 0.0;
    double empirical = 0.0;
    std::size_t count = 0;
};
std::vector<CalibrationBin> calibration_bins(const std::vector<double>& scores,
                                             const std::vector<int>& labels, int n_bins);

struct MonotonicityReport {
    std::size_t violations = 0;
    double worst_jump = 0.0;
    std::size_t worst_context = 0;
    double worst_delta = 0.0;
};
MonotonicityReport monotonicity_audit(const HitModel& model,
                                      const std::vector<FeatureBundle>& contexts,
                                      const std::vector<double>& delta_grid);

enum class ImportanceMethod { Permutation, StdCoefficients, Gain };

struct FeatureImportance {
    std::vector<std::string> names;
    std::vector<double> values;
    std::vector<int> rank; // 1 = most important
};
FeatureImportance feature_importance(const HitModel& model, const Dataset& validation,
                                     ImportanceMethod method, std::uint64_t seed = 7,
                                     int n_shuffles = 8);

// Kolmogorov-Smirnov distance between a sample and a reference CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

struct EvalReport {
    double auc = 0.5;
    double bbs = 0.0;
    double bbss = 0.0;
    std::vector<CalibrationBin> calibration;
    std::size_t monotonicity_violations = 0;
    double worst_jump = 0.0;
    std::size_t n = 0;
    double w_m = 0.5; // majority-class frequency from the training split
};

EvalReport evaluate(const HitModel& model, const Dataset& test, double w_m, int n_bins = 10);

// Majority-class (lost) frequency of a dataset.
double majority_frequency(const Dataset& records);

} // namespace rfq
