#pragma once

// Common contract for every hit-probability model f(delta | context):
// generative, logistic, GBDT and the majority-class benchmark all satisfy it,
// so pricing, revenue, causal and metric code is generic over the model.

#include <memory>
#include <string>
#include <vector>

#include "rfqlab/domain.hpp"

namespace rfq {

class HitModel {
public:
    virtual ~HitModel() = default;

    // Probability in [0,1]; pure.
    virtual double predict(double delta_norm, const FeatureBundle& ctx) const = 0;

    // Analytic d f / d delta when the model has one (the generative predictor
    // does); solvers fall back to central differences otherwise.
    virtual bool has_analytic_derivative() const { return false; }
    virtual double predict_ddelta(double, const FeatureBundle&) const {
        throw IncompatibleMethod("model has no analytic spread derivative");
    }

    virtual std::string kind() const = 0;
};

// Constant predictor scoring the training base rate; the Table-1 benchmark.
class MajorityClassModel : public HitModel {
public:
    explicit MajorityClassModel(double hit_rate) : hit_rate_(hit_rate) {}
    double predict(double, const FeatureBundle&) const override { return hit_rate_; }
    std::string kind() const override { return "majority"; }
    double hit_rate() const { return hit_rate_; }

private:
    double hit_rate_;
};

} // namespace rfq
