#pragma once

// Generative sampler of the full RfQ process over the causal graph, with an
// intervention mode implementing do(delta) and do(call). This is the
// ground-truth world the acceptance suite measures everything against.
//
// Record-level simulation is embarrassingly parallel: each row derives its
// own RNG stream from (seed, row index), so parallel and serial runs agree
// bit-exactly.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rfqlab/distributions.hpp"
#include "rfqlab/domain.hpp"
#include "rfqlab/rng.hpp"

namespace rfq {

// lambda0 + sum(coef * feature) + indicator terms, clamped at 0 from below.
struct IntensityParams {
    double base = 1.0;
    std::vector<double> client;
    std::vector<double> bond;
    std::vector<double> rfq;
    double pd = 0.0;
    double ia = 0.0;
    double call = 0.0;
    double axe = 0.0;
};

double rfq_arrival_intensity(const IntensityParams& params, const FeatureBundle& ctx, bool pd,
                             bool ia, bool call, bool axe);

// Linear index over (sigma, CF, BF, RF) with an additive IA shift; used for
// the reservation-spread mean and the dealer-quote location.
struct LinearModel {
    double intercept = 0.0;
    double sigma_coef = 0.0;
    std::vector<double> client;
    std::vector<double> bond;
    std::vector<double> rfq;
    double ia_shift = 0.0;

    double eval(const FeatureBundle& ctx, bool ia = false) const;
    void validate(std::size_t n_client) const;
};

// P(X=1 | CF, BF) = 1 / (1 + exp(intercept + client.CF + bond.BF)).
struct LogitModel {
    double intercept = 0.0;
    std::vector<double> client;
    std::vector<double> bond;

    double prob(const FeatureBundle& ctx) const;
};

struct GenerativeParams {
    IntensityParams intensity;
    double call_prob[2] = {0.3, 0.6}; // P(call=1 | axe=a)
    LinearModel reservation;          // ia_shift is the IA reservation bump
    double reservation_sd = 0.3;
    SepParams dealer_sep;             // location = quote-location intercept
    LinearModel dealer_shift;         // intercept must stay 0; adds to dealer_sep.location
    LogitModel pd_model;
    LogitModel ia_model;
    double p_quote = 0.7;
    double drift = 0.0;   // mu_hat per unit time, active when IA = 1
    double horizon = 1.0; // revenue-evaluation horizon
    double tie_break = 1.0; // P(dealer wins an exact tie)

    double dealer_location(const FeatureBundle& ctx) const {
        return dealer_sep.location + dealer_shift.eval(ctx);
    }
    SepParams dealer_sep_at(const FeatureBundle& ctx) const {
        SepParams s = dealer_sep;
        s.location = dealer_location(ctx);
        return s;
    }
    void validate(std::size_t n_client) const;
};

struct FeatureSampler {
    std::size_t n_client = 2;
    std::vector<double> client_mean, client_sd; // default N(0,1) per feature
    std::vector<double> bond_mean, bond_sd;     // 5 bond features
    double sigma_log_mean = -0.3, sigma_log_sd = 0.25; // sigma is lognormal
    double volume_log_mean = 0.0, volume_log_sd = 0.5;
    int n_min = 1, n_max = 6; // dealers in competition, uniform
    double axe_prob = 0.3;
    double p_sell = 0.5;

    void normalize(); // fill defaults for empty mean/sd vectors
};

struct DealerPolicy {
    enum class Mode { Historical, Intervention };
    Mode mode = Mode::Historical;
    // historical (confounded): delta = g0 + g1*sigma + g2*(w.BF) + g3*axe + noise
    double g0 = 1.0, g1_sigma = 0.0, g3_axe = 0.0;
    std::vector<double> bond_weights; // w, defaults to zeros
    double noise_sd = 0.3;
    // intervention: records cycle through the fixed grid
    std::vector<double> grid = {1.0};
};

struct CallPolicy {
    std::optional<int> forced; // do(call = c); empty = historical Bernoulli
};

// Discrete (client, bond) cells for uplift experiments: every row draws a
// cell id and uses that cell's fixed feature vectors.
struct CellSpec {
    int n_client_cells = 0; // 0 disables cell mode
    int n_bond_cells = 0;
};

struct ScenarioConfig {
    GenerativeParams params;
    std::size_t n_rfqs = 1000;
    FeatureSampler sampler;
    DealerPolicy policy;
    CallPolicy call_policy;
    CellSpec cells;
    std::uint64_t seed = 1;
    std::optional<int> force_pd; // pin the latent for benchmark scenarios
    std::optional<int> force_ia;
    bool candidate_mode = false; // emit arrival candidates (uplift experiments)
    double dt = 0.1;             // candidate occurrence probability = clamp(lambda*dt)

    void validate() const;
};

struct RecordLatents {
    std::uint64_t row = 0;
    int pd = 0, ia = 0;
    double delta_res = 0.0;
    int k = 0;
    std::vector<double> quotes;
    double drift_term = 0.0; // mu_hat * 1_ia * horizon
    bool tie_win = true;
};

struct CandidateRow {
    std::uint64_t row = 0;
    int client_cell = 0, bond_cell = 0;
    bool axe = false, call = false;
    bool occurred = false;
};

struct SyntheticDataset {
    Dataset records;
    std::vector<RecordLatents> latents; // aligned 1:1 with records
    std::vector<CandidateRow> candidates;
    std::vector<std::vector<double>> client_cells; // cell feature tables
    std::vector<std::vector<double>> bond_cells;
};

SyntheticDataset simulate(const ScenarioConfig& config);

// Deterministic status rules given the latents; exposed so tests can replay
// them bit-exactly against the simulator output.
RawStatus resolve_status(double delta, double delta_res, const std::vector<double>& quotes,
                         bool pd, bool tie_win);

struct MonteCarloEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// P(hit | do(delta), RfQ, context) by Monte Carlo over the latents; the
// ground-truth oracle for the causal-audit module.
MonteCarloEstimate interventional_hit_prob(const ScenarioConfig& config, double delta,
                                           const FeatureBundle& context, std::size_t n_mc);

// Thinning-based Poisson event-time sampler (not on the acceptance path).
std::vector<double> sample_arrival_times(const IntensityParams& params, const FeatureBundle& ctx,
                                         bool pd, bool ia, bool call, bool axe, double t_max,
                                         double lambda_max, RngStream& rng);

// Sidecar files next to the dataset CSV.
void write_latents_csv(const SyntheticDataset& ds, const std::string& path);
void write_candidates_csv(const SyntheticDataset& ds, const std::string& path);

} // namespace rfq
