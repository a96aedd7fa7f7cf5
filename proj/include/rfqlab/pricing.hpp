#pragma once

// Optimal-spread solvers, generic over any HitModel f(delta):
//   flow value:    delta = -f/f'
//   exp utility:   delta = (1/(gamma v)) log(1 - gamma v f/f')
//   end of day:    delta = gamma sigma^2 (T-t) (s q + v/2) + exp-utility term
// solved by residual bisection on a geometrically expanded bracket plus a
// Newton polish, with damped fixed-point fallback. Models may supply an
// analytic spread derivative; otherwise central differences are used.

#include <cmath>
#include <string>

#include "rfqlab/domain.hpp"
#include "rfqlab/hit_model.hpp"

namespace rfq {

enum class PricingObjective { InstantaneousFlow, ExpUtility, EndOfDayUtility, EndOfDayUtilityIA };

struct PricingProblem {
    PricingObjective objective = PricingObjective::InstantaneousFlow;
    double gamma = 1.0;     // risk aversion (unused by InstantaneousFlow)
    double volume = 1.0;    // v
    Side side = Side::Sell; // s
    double inventory = 0.0; // q, signed, in volume units
    double sigma = 0.0;
    double horizon = 0.0;      // T - t
    double drift = 0.0;        // mu_hat per unit time
    double p_ia = 0.0;         // P(IA=1 | CF)
    double hit_multiplier = 1.0; // H in [0, 1/f]
    FeatureBundle context;

    void validate() const;
};

struct PricingSolution {
    double delta_opt = 0.0;
    double objective_value = 0.0;
    int iterations = 0;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    double residual = 0.0;
    bool monotonicity_warning = false; // f' >= 0 seen at some probe
};

PricingSolution optimal_spread_flow(const HitModel& model, const PricingProblem& problem);
PricingSolution optimal_spread_exp_utility(const HitModel& model, const PricingProblem& problem);
PricingSolution optimal_spread_eod(const HitModel& model, const PricingProblem& problem);

// Additive spread correction compensating information-asymmetry risk.
double ia_spread_correction(const PricingProblem& problem);

// f(delta) = p0 exp(-alpha delta): the closed-form family the optimal
// market-making literature leans on; used by oracles and the CLI.
class ExponentialSpreadModel : public HitModel {
public:
    ExponentialSpreadModel(double p0, double alpha) : p0_(p0), alpha_(alpha) {}
    double predict(double delta, const FeatureBundle&) const override {
        return p0_ * std::exp(-alpha_ * delta);
    }
    bool has_analytic_derivative() const override { return true; }
    double predict_ddelta(double delta, const FeatureBundle& ctx) const override {
        return -alpha_ * predict(delta, ctx);
    }
    std::string kind() const override { return "exponential"; }
    double p0() const { return p0_; }
    double alpha() const { return alpha_; }

private:
    double p0_, alpha_;
};

} // namespace rfq
