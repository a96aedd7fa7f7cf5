#pragma once

// Axe-matcher scoring: uplift of client demand from a call, on-call hit
// probability integrated over the pre-RfQ feature distribution, and their
// product, the average causal effect per (client, bond) cell. Conditioning
// on axe identifies the uplift from observational candidate rows.

#include <cstdint>
#include <string>
#include <vector>

#include "rfqlab/domain.hpp"
#include "rfqlab/hit_model.hpp"
#include "rfqlab/simulator.hpp"

namespace rfq {

struct UpliftEstimate {
    double p_rfq_given_call = 0.0;
    double p_rfq_given_nocall = 0.0;
    double uplift = 0.0;
    double se_call = 0.0, se_nocall = 0.0, se_uplift = 0.0;
    double on_call_hit_prob = 0.0; // unset (0) until axe_ace fills it
    double ace = 0.0;
    double ace_se = 0.0;
    bool hit_term_set = false;
    bool insufficient_data = false; // estimate returned with wide errors
};

struct UpliftOptions {
    double smoothing = 1.0;          // additive smoothing on both outcomes
    std::size_t min_cell_count = 30; // per call arm
};

// P(RfQ | call=c, axe=1, cell) from smoothed empirical frequencies.
UpliftEstimate uplift(const std::vector<CandidateRow>& rows, int client_cell, int bond_cell,
                      const UpliftOptions& options = {});

struct AxeQuery {
    int client_cell = 0, bond_cell = 0;
    double delta_star = 0.0;               // axe-conditioned spread from the pricing module
    std::vector<FeatureBundle> rf_samples; // pre-RfQ distribution of (sigma, RF) at the cell
};

// ace = E_RF[f(delta*, ctx)] x uplift; clients rank by (ace, on-call hit
// probability) lexicographically descending.
UpliftEstimate axe_ace(const std::vector<CandidateRow>& rows, const AxeQuery& query,
                       const HitModel& hit_model, const UpliftOptions& options = {});

// Smoothed P(RfQ | CF, BF) per cell.
double rfq_preference(const std::vector<CandidateRow>& rows, int client_cell, int bond_cell,
                      double smoothing = 1.0);

// The Bayes factorization factors P(call | axe, RfQ) and P(axe | RfQ).
struct BayesFactors {
    double p_call_given_axe_rfq[2][2] = {{0, 0}, {0, 0}}; // [axe][rfq]
    double p_axe_given_rfq[2] = {0, 0};                   // [rfq]
};
BayesFactors bayes_factors(const std::vector<CandidateRow>& rows, double smoothing = 1.0);

struct AxeMatchRow {
    int client_cell = 0, bond_cell = 0;
    double on_call_hit_prob = 0.0;
    double uplift = 0.0;
    double ace = 0.0;
    double stderr_ace = 0.0;
};

// Scores every cell and sorts by (ace, on-call hit probability) descending.
std::vector<AxeMatchRow> rank_axe_matches(const std::vector<CandidateRow>& rows,
                                          const std::vector<AxeQuery>& queries,
                                          const HitModel& hit_model,
                                          const UpliftOptions& options = {});

void write_axe_report_csv(const std::vector<AxeMatchRow>& rows, const std::string& path);

} // namespace rfq
