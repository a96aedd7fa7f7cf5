#pragma once

// Maximum-likelihood estimation of GenerativeParams from observed RfQ
// records, plus the closed-form predictive hit probability.
//
// The status likelihood conditional on (PD = 0, IA = a) uses:
//   S_res(x) = P(delta_res >= x)          (Gaussian survival)
//   W(x)     = 1 - p_quote * F_sep(x)     (per-invitee survival incl. decline)
//   hit, no cover (systematic policy):  S_res(d) * (1 - p_quote)^n
//   hit, no cover (sporadic policy):    S_res(d) * W(d)^n
//   hit with cover dc:  S_res(d) * n p f_sep(dc) W(dc)^(n-1)
//   covered:            n p W(d)^(n-1) * Int_-inf^d f_sep(w) S_res(w) dw
//   missed total:       n p * Int_-inf^d f_sep(w) W(w)^(n-1) S_res(w) dw
//   passed:             (1 - S_res(d)) W(d)^n + P(best < d) - missed total
// which partitions to 1 per record. PD and IA are binary, so they enter as
// closed-form mixtures; no EM is needed. Each record's term depends on the
// parameters only through seven core scalars (m_res, sigma_res, m_d, sep
// scale/shape/asym, p_quote), so gradients flow through Dual<7> and expand to
// the coefficient vector by the chain rule.

#include <optional>
#include <vector>

#include "rfqlab/domain.hpp"
#include "rfqlab/hit_model.hpp"
#include "rfqlab/simulator.hpp"

namespace rfq {

enum class CoverPolicy {
    Systematic, // no cover on a hit <=> no competitor participated (simulator truth)
    Sporadic    // cover missing at random: status-only term f(delta)
};

struct LikelihoodOptions {
    bool pd_off = true; // benchmark simplification flags
    bool ia_off = true;
    CoverPolicy cover = CoverPolicy::Systematic;
    bool class_weight = false; // weight log-terms by hit/lost class
};

// Closed-form predictive hit probability at the given parameters.
double hit_probability(double delta, const FeatureBundle& ctx, const GenerativeParams& params,
                       bool pd_off = true, bool ia_off = true);

class GenerativePredictor : public HitModel {
public:
    GenerativePredictor(GenerativeParams params, bool pd_off = true, bool ia_off = true)
        : params_(std::move(params)), pd_off_(pd_off), ia_off_(ia_off) {}

    double predict(double delta, const FeatureBundle& ctx) const override {
        return hit_probability(delta, ctx, params_, pd_off_, ia_off_);
    }
    bool has_analytic_derivative() const override { return true; }
    double predict_ddelta(double delta, const FeatureBundle& ctx) const override;
    std::string kind() const override { return "generative"; }

    const GenerativeParams& params() const { return params_; }
    bool pd_off() const { return pd_off_; }
    bool ia_off() const { return ia_off_; }

private:
    GenerativeParams params_;
    bool pd_off_;
    bool ia_off_;
};

double log_likelihood(const Dataset& records, const GenerativeParams& params,
                      const LikelihoodOptions& options = {});

// Per-record status masses at the record's own (delta, context); they sum to
// 1 over {Hit, Missed, Passed} up to quadrature error.
struct StatusMasses {
    double hit = 0.0, missed = 0.0, passed = 0.0;
};
StatusMasses status_masses(const RfqRecord& record, const GenerativeParams& params,
                           const LikelihoodOptions& options = {});

struct FitOptions {
    LikelihoodOptions likelihood;
    double grad_tol = 1e-6;
    double f_rel_tol = 1e-10;
    int max_iterations = 400;
    int restarts = 3; // jittered restarts; best likelihood wins
    std::uint64_t seed = 17;
    bool compute_std_errors = false;
};

struct GenerativeFitReport {
    GenerativeParams params;
    double log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
    std::optional<std::vector<double>> standard_errors; // observed-information
    std::vector<std::string> parameter_names;
};

GenerativeFitReport fit_generative(const Dataset& records, const GenerativeParams& init,
                                   const FitOptions& options = {});

// Flat transformed parameter vector (log/logit transforms baked in); exposed
// for the gradient finite-difference property test.
struct ParamPacker {
    std::size_t n_client = 0;
    bool pd_off = true, ia_off = true;

    std::size_t size() const;
    std::vector<double> pack(const GenerativeParams& p) const;
    // Unpack onto a template carrying the non-fitted fields (intensity, call
    // probabilities, drift, horizon, tie_break).
    GenerativeParams unpack(const std::vector<double>& x, const GenerativeParams& base) const;
    std::vector<std::string> names() const;
};

// Negative mean log-likelihood and its gradient on the packed vector.
double neg_log_likelihood_grad(const Dataset& records, const ParamPacker& packer,
                               const std::vector<double>& x, const GenerativeParams& base,
                               const LikelihoodOptions& options, std::vector<double>& grad);

} // namespace rfq
