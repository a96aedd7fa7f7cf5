#pragma once

// Discriminative baselines on the shared HitModel contract: class-weighted
// L2 logistic regression (IRLS) and a minimal leaf-wise gradient-boosted
// tree ensemble with exact split search over presorted features.

#include <cstdint>
#include <string>
#include <vector>

#include "rfqlab/domain.hpp"
#include "rfqlab/hit_model.hpp"

namespace rfq {

// Flat model-feature order: delta first, then sigma, the five bond features,
// the two rfq features and the client features.
struct FeatureLayout {
    std::size_t n_client = 0;

    std::size_t size() const { return 9 + n_client; }
    std::vector<std::string> names() const;
    void fill(double delta, const FeatureBundle& f, double* out) const;
    std::vector<double> row(double delta, const FeatureBundle& f) const;

    static FeatureLayout infer(const Dataset& records);
};

// Row-major design matrix plus hit labels for a dataset.
struct DesignMatrix {
    FeatureLayout layout;
    std::size_t n = 0;
    std::vector<double> x; // n * layout.size()
    std::vector<int> y;

    static DesignMatrix build(const Dataset& records);
    const double* row(std::size_t i) const { return x.data() + i * layout.size(); }
};

struct Standardizer {
    std::vector<double> mean, sd;

    static Standardizer fit(const DesignMatrix& m);
    void transform(double* row, std::size_t d) const;
    void inverse(double* row, std::size_t d) const;
};

// n_total / (2 n_class) per class when enabled.
struct BinaryClassWeights {
    double w0 = 1.0, w1 = 1.0;
    static BinaryClassWeights balanced(const std::vector<int>& y);
    double operator()(int label) const { return label ? w1 : w0; }
};

class LogisticModel : public HitModel {
public:
    FeatureLayout layout;
    Standardizer standardizer;
    std::vector<double> weights; // standardized space, delta first
    double intercept = 0.0;
    double l2_penalty = 0.0; // 1/C
    BinaryClassWeights class_weights;
    bool converged = false;
    int iterations = 0;

    double predict(double delta, const FeatureBundle& ctx) const override;
    std::string kind() const override { return "logistic"; }
    double spread_weight() const { return weights.empty() ? 0.0 : weights[0]; }
};

struct LogisticOptions {
    double c = 100.0; // inverse regularization strength
    bool class_weight = true;
    double tol = 1e-8;
    int max_iterations = 200;
};

LogisticModel fit_logistic(const Dataset& train, const LogisticOptions& options = {});

struct GbdtHyperparams {
    int n_estimators = 500;
    double learning_rate = 0.01;
    int num_leaves = 15;
    int min_child_samples = 50;
    double subsample = 0.6;
    double colsample_bytree = 1.0;
    double lambda_leaf = 1.0; // leaf L2 regularization in the gain formula
    bool class_weight = true;

    void validate() const;
};

struct GbdtNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    double value = 0.0; // leaf log-odds contribution (learning rate applied at predict)
    double gain = 0.0;
};

struct GbdtTree {
    std::vector<GbdtNode> nodes;
    double predict(const double* row) const;
};

class GbdtModel : public HitModel {
public:
    FeatureLayout layout;
    std::vector<GbdtTree> trees;
    double learning_rate = 0.01;
    double base_score = 0.0; // log-odds
    GbdtHyperparams hyperparams;
    std::vector<double> feature_gain; // summed split gains per feature

    double predict(double delta, const FeatureBundle& ctx) const override;
    double predict_row(const double* row) const;
    std::string kind() const override { return "gbdt"; }
};

GbdtModel fit_gbdt(const Dataset& train, const GbdtHyperparams& hyperparams = {},
                   std::uint64_t seed = 1);

} // namespace rfq
