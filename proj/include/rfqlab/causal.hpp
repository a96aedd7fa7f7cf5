#pragma once

// Back-door machinery: the conditioning-set registry, marginalization over
// excluded features, and the confounding-bias audit that compares the naive
// spread-binned estimator and the adjusted plug-in estimator against the
// interventional oracle.

#include <cstdint>
#include <string>
#include <vector>

#include "rfqlab/domain.hpp"
#include "rfqlab/hit_model.hpp"
#include "rfqlab/simulator.hpp"

namespace rfq {

enum class CausalTarget { HitProb, RevenuesOnHit, Uplift };

struct AdjustmentSpec {
    CausalTarget target = CausalTarget::HitProb;
    std::vector<std::string> conditioning;
    std::vector<std::string> marginalize; // latent variables integrated out
};

// Registry of minimal valid conditioning sets per target; immutable.
AdjustmentSpec conditioning_set(CausalTarget target);

// One excluded feature (by flat layout name) with its distribution: a point
// mass or discrete support, or a Gaussian for the Monte Carlo path.
struct ExcludedFeature {
    std::string name;
    std::vector<double> support; // discrete support (size 1 = point mass)
    std::vector<double> probs;   // same size as support
    bool gaussian = false;
    double mean = 0.0, sd = 1.0;
};

struct MarginalizedResult {
    double value = 0.0;
    double std_error = 0.0; // 0 on the exact enumeration path
    bool exact = false;
};

// Average of model(delta, context) over the distribution of the excluded
// features; exact enumeration when every excluded feature is discrete and
// the support product is small, seeded Monte Carlo otherwise.
MarginalizedResult marginalized_hit_prob(const HitModel& model, double delta,
                                         const FeatureBundle& kept,
                                         const std::vector<ExcludedFeature>& excluded,
                                         std::size_t n_draws, std::uint64_t seed = 99);

struct AuditPoint {
    double delta = 0.0;
    double truth = 0.0, truth_se = 0.0;
    double naive = 0.0, naive_se = 0.0;
    std::vector<double> adjusted;    // one per model
    std::vector<double> adjusted_se;
};

struct AuditReport {
    std::vector<std::string> model_names;
    std::vector<AuditPoint> points;
};

struct AuditOptions {
    int naive_bins = 32;          // equal-frequency delta bins
    std::size_t n_observational = 100000;
    std::size_t n_interventional = 100000;
};

// scenario must use the confounded historical dealer policy; models are
// already fitted on observational data from the same scenario.
AuditReport causal_audit(const ScenarioConfig& scenario, const std::vector<double>& delta_grid,
                         const std::vector<std::pair<std::string, const HitModel*>>& models,
                         const AuditOptions& options = {});

void write_audit_csv(const AuditReport& report, const std::string& path);

} // namespace rfq
