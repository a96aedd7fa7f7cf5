#pragma once

// Revenue-potential probabilities and revenues-on-hit utilities. The
// terminal mid move is Brownian with drift mu_hat when the client is
// informed: P_end - P_start ~ N(mu_hat 1_IA (T-t), sigma^2 (T-t)), and the
// revenue on a hit is v delta + s v (P_end - P_start). The IA mixture uses
// the marginal P(IA|CF) as a plug-in for P(IA|hit, ...); the generative IA
// logit supplies it upstream.

#include "rfqlab/domain.hpp"
#include "rfqlab/hit_model.hpp"

namespace rfq {

struct RevenuePotentialQuery {
    double delta = 0.0; // normalized half-spread
    Side side = Side::Sell;
    double sigma = 1.0;
    double horizon = 1.0; // T - t
    double drift = 0.0;   // mu_hat per unit time
    double p_ia = 0.0;    // P(IA = 1 | CF)

    void validate() const {
        if (!(horizon > 0.0) || !(sigma > 0.0))
            throw InvalidQuery("revenue query: sigma and horizon must be positive");
        if (!(p_ia >= 0.0 && p_ia <= 1.0))
            throw InvalidQuery("revenue query: p_ia must be in [0,1]");
    }
};

// P(R > 0 | hit, ...), the IA mixture of normal tail probabilities.
double prob_revenue_positive_on_hit(const RevenuePotentialQuery& query);

// P(R > 0 | do(delta), RfQ, Z) = f(delta) * P(R > 0 | hit, ...).
double revenue_potential(const RevenuePotentialQuery& query, const HitModel& model,
                         const FeatureBundle& ctx);

// E[-exp(-gamma (v delta + (q + s v) dP))] with dP the IA-mixed Gaussian
// move; closed form via the moment generating function, log-space guarded.
double expected_utility_on_hit(double delta, double inventory, double volume, Side side,
                               double sigma, double horizon, double gamma, double p_ia,
                               double drift);

} // namespace rfq
