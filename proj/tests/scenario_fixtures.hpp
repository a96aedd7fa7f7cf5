#pragma once

// Shared synthetic scenarios for unit and acceptance tests.

#include <cstdint>

#include "rfqlab/simulator.hpp"

namespace rfq::fixtures {

// Benchmark world: PD and IA pinned to 0, two client features, confounded
// historical dealer policy (spread rises with volatility), mixed statuses.
inline ScenarioConfig benchmark_scenario(std::uint64_t seed, std::size_t n_rfqs) {
    ScenarioConfig cfg;
    cfg.seed = seed;
    cfg.n_rfqs = n_rfqs;
    cfg.force_pd = 0;
    cfg.force_ia = 0;
    cfg.sampler.n_client = 2;
    cfg.sampler.sigma_log_mean = -0.3;
    cfg.sampler.sigma_log_sd = 0.3;

    GenerativeParams& p = cfg.params;
    p.reservation.intercept = 1.6;
    p.reservation.sigma_coef = 0.5;
    p.reservation.client = {0.25, -0.3};
    p.reservation.bond = {0.2, -0.25, 0.3, 0.2, -0.2};
    p.reservation.rfq = {-0.2, 0.25};
    p.reservation_sd = 0.35;
    p.dealer_sep.location = 1.2;
    p.dealer_sep.scale = 0.45;
    p.dealer_sep.shape = 1.7;
    p.dealer_sep.asym = 1.25;
    p.dealer_shift.sigma_coef = 0.4;
    p.dealer_shift.client = {0.2, -0.2};
    p.dealer_shift.bond = {0.25, 0.2, -0.2, 0.15, 0.25};
    p.dealer_shift.rfq = {-0.1, 0.15};
    p.p_quote = 0.65;
    p.drift = 0.0;
    p.horizon = 1.0;

    cfg.policy.mode = DealerPolicy::Mode::Historical;
    cfg.policy.g0 = 0.75;
    cfg.policy.g1_sigma = 0.35;
    cfg.policy.bond_weights = {0.15, 0.0, 0.0, 0.0, 0.1};
    cfg.policy.g3_axe = -0.15;
    cfg.policy.noise_sd = 0.4;
    return cfg;
}

// Full-model world: PD and IA latent and active, drift on.
inline ScenarioConfig full_scenario(std::uint64_t seed, std::size_t n_rfqs) {
    ScenarioConfig cfg = benchmark_scenario(seed, n_rfqs);
    cfg.force_pd.reset();
    cfg.force_ia.reset();
    GenerativeParams& p = cfg.params;
    p.pd_model = {1.8, {0.3, 0.0}, {0.0, 0.2, 0.0, 0.0, 0.0}}; // P(PD=1) ~ 0.14
    p.ia_model = {1.5, {-0.4, 0.3}, {}};                       // P(IA=1) ~ 0.18
    p.reservation.ia_shift = 0.35;
    p.drift = 0.25;
    p.horizon = 1.0;
    return cfg;
}

inline FeatureBundle context_at(double sigma, int n_dealers) {
    FeatureBundle f;
    f.client = {0.3, -0.1};
    f.bond = {0.4, -0.2, 0.1, 0.3, -0.5};
    f.rfq = {static_cast<double>(n_dealers), 0.44};
    f.volatility = sigma;
    return f;
}

} // namespace rfq::fixtures
