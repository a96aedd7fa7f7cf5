#include "rfqlab/revenue.hpp"

#include <cmath>

#include "rfqlab/special.hpp"

namespace rfq {

double prob_revenue_positive_on_hit(const RevenuePotentialQuery& q) {
    q.validate();
    const double scale = q.sigma * std::sqrt(q.horizon);
    auto state_prob = [&](bool ia) {
        const double m = ia ? q.drift * q.horizon : 0.0;
        // R = v delta + s v dP > 0
        if (q.side == Side::Sell) return special::std_normal_cdf((q.delta + m) / scale);
        return special::std_normal_cdf((q.delta - m) / scale);
    };
    return (1.0 - q.p_ia) * state_prob(false) + q.p_ia * state_prob(true);
}

double revenue_potential(const RevenuePotentialQuery& q, const HitModel& model,
                         const FeatureBundle& ctx) {
    const double f = model.predict(q.delta, ctx);
    return f * prob_revenue_positive_on_hit(q);
}

double expected_utility_on_hit(double delta, double inventory, double volume, Side side,
                               double sigma, double horizon, double gamma, double p_ia,
                               double drift) {
    if (!(gamma > 0.0)) throw InvalidParams("expected_utility_on_hit: gamma must be positive");
    if (!(p_ia >= 0.0 && p_ia <= 1.0))
        throw InvalidProbability("expected_utility_on_hit: p_ia must be in [0,1]");
    const double pos = inventory + side_sign(side) * volume; // q + s v
    const double var_term = 0.5 * gamma * gamma * pos * pos * sigma * sigma * horizon;
    auto state_value = [&](bool ia) {
        const double m = ia ? drift * horizon : 0.0;
        const double expo = -gamma * volume * delta - gamma * pos * m + var_term;
        return -std::exp(std::min(expo, 700.0));
    };
    return (1.0 - p_ia) * state_value(false) + p_ia * state_value(true);
}

} // namespace rfq
