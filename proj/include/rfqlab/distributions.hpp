#pragma once

// Probability kernels of the generative model: the four-parameter Skew
// Exponential Power family for competitor quotes, order statistics of the
// client-best quote under Binomial participation, and the standard normal.
//
// SEP parameterization (two-piece skewing of exp(-|z|^shape)):
//   z = (x - location)/scale
//   pdf = C/scale * exp(-(asym*|z|)^shape)        for z < 0
//       = C/scale * exp(-(z/asym)^shape)          for z >= 0
//   C = shape / ((asym + 1/asym) * Gamma(1/shape))
// asym = 1 is symmetric; shape = 2, asym = 1 is a Gaussian kernel with
// variance scale^2/2. The CDF is closed-form via the regularized incomplete
// gamma function. Everything here is templated on the scalar type so the
// likelihood can push Dual numbers through for exact gradients.
//
// Normalized spreads are side-symmetric (the client prefers smaller delta on
// both sides), so the Side argument required by the call signatures does not
// change the math.

#include <cmath>

#include "rfqlab/domain.hpp"
#include "rfqlab/dual.hpp"
#include "rfqlab/errors.hpp"
#include "rfqlab/special.hpp"

namespace rfq {

struct SepParams {
    double location = 0.0;
    double scale = 1.0;
    double shape = 2.0;
    double asym = 1.0;

    void validate() const {
        if (!(scale > 0.0) || !(shape > 0.0) || !(asym > 0.0))
            throw InvalidParams("SepParams: scale, shape and asym must be positive");
    }
};

namespace sep {

using std::exp;
using std::log;
using std::pow;

template <typename T>
T log_norm_const(const T& scale, const T& shape, const T& asym) {
    using special::lgamma_t;
    return log(shape) - log(scale) - log(asym + T(1.0) / asym) - lgamma_t(T(1.0) / shape);
}

template <typename T>
T pdf_t(double x, const T& loc, const T& scale, const T& shape, const T& asym) {
    const T z = (T(x) - loc) / scale;
    const T az = value_of(z) < 0.0 ? -z * asym : z / asym;
    T kernel;
    if (value_of(az) < 1e-280) {
        kernel = T(0.0); // |z|^shape underflow region: exp(-0) = 1
    } else {
        kernel = pow(az, shape);
    }
    return exp(log_norm_const(scale, shape, asym) - kernel);
}

inline constexpr double kTailArg = 690.0; // exp(-kernel) underflow guard

template <typename T>
T cdf_t(double x, const T& loc, const T& scale, const T& shape, const T& asym) {
    using special::gamma_p;
    using special::gamma_q;
    const T z = (T(x) - loc) / scale;
    const T xi2 = asym * asym;
    const T inv_mass = T(1.0) / (T(1.0) + xi2);
    const T a = T(1.0) / shape;
    if (value_of(z) < 0.0) {
        const T arg = pow(-z * asym, shape);
        if (!(value_of(arg) < kTailArg)) return T(0.0);
        return gamma_q(a, arg) * inv_mass;
    }
    if (value_of(z) == 0.0) return inv_mass;
    const T arg = pow(z / asym, shape);
    if (!(value_of(arg) < kTailArg)) return T(1.0);
    return inv_mass + xi2 * inv_mass * gamma_p(a, arg);
}

// Survival 1 - F computed without cancellation in the right tail.
template <typename T>
T sf_t(double x, const T& loc, const T& scale, const T& shape, const T& asym) {
    using special::gamma_p;
    using special::gamma_q;
    const T z = (T(x) - loc) / scale;
    const T xi2 = asym * asym;
    const T inv_mass = T(1.0) / (T(1.0) + xi2);
    const T a = T(1.0) / shape;
    if (value_of(z) < 0.0) {
        const T arg = pow(-z * asym, shape);
        if (!(value_of(arg) < kTailArg)) return T(1.0);
        return (xi2 + gamma_p(a, arg)) * inv_mass;
    }
    if (value_of(z) == 0.0) return xi2 * inv_mass;
    const T arg = pow(z / asym, shape);
    if (!(value_of(arg) < kTailArg)) return T(0.0);
    return xi2 * inv_mass * gamma_q(a, arg);
}

} // namespace sep

double sep_pdf(double x, const SepParams& p);
double sep_cdf(double x, const SepParams& p);
double sep_sf(double x, const SepParams& p);
// Bisection inverse of the CDF on (0,1).
double sep_quantile(double prob, const SepParams& p);

// Value plus all four parameter partials in one pass, all-double arithmetic;
// the likelihood gradient is built on these (they match the Dual evaluation
// of pdf_t/cdf_t, which the tests check).
struct SepPartials {
    double value = 0.0;
    double d_loc = 0.0;
    double d_scale = 0.0;
    double d_shape = 0.0;
    double d_asym = 0.0;
};

// Parameter-only constants hoisted out of the per-node hot loop; the
// likelihood evaluates millions of nodes against one parameter point.
struct SepCache {
    SepParams params;
    double a = 0.5;          // 1/shape
    double lgamma_a = 0.0;
    double digamma_a = 0.0;
    double lognorm = 0.0;    // log pdf normalization incl. -log(scale)
    double c1 = 0.5;         // left-branch mass 1/(1+asym^2)
    double dc1 = 0.0;        // d c1 / d asym
    double dnorm_dxi = 0.0;  // d log norm / d asym
    double lgamma_a1 = 0.0;  // lgamma(a+1), digamma(a+1)
    double digamma_a1 = 0.0;

    SepCache() = default;
    explicit SepCache(const SepParams& p);

    // All cached constants are location-free, so shifting the location is a
    // plain copy; the likelihood reuses one cache across records.
    SepCache with_location(double loc) const {
        SepCache c = *this;
        c.params.location = loc;
        return c;
    }
};

// Cached value-only evaluations (series incomplete gamma, saturated beyond
// kernel argument 45, i.e. relative error ~1e-20).
double sep_pdf_cached(double x, const SepCache& c);
double sep_cdf_cached(double x, const SepCache& c);

// Fused pdf+cdf partials at one x; pass nullptr for the side not needed.
void sep_pdf_cdf_partials(double x, const SepCache& c, SepPartials* pdf, SepPartials* cdf);

SepPartials sep_pdf_partials(double x, const SepParams& p);
SepPartials sep_cdf_partials(double x, const SepParams& p);

// Variance of the SEP for asym = 1: Gamma(3/shape)/Gamma(1/shape) * scale^2.
double sep_symmetric_variance(const SepParams& p);

class RngStream;
double sep_sample(RngStream& rng, const SepParams& p);

// P(best competitor quote > x) when each of n invited dealers quotes
// independently with probability p_quote and quotes are i.i.d. SEP; the
// client-best quote is the minimum. k = 0 participants means no competition
// (best = +inf), so the survival is 1 for every finite x.
double best_quote_survival(double x, const SepParams& p, int n, double p_quote,
                           Side side = Side::Sell);

// Density of the client-best of n i.i.d. SEP quotes: n f(x) (1-F(x))^(n-1).
double cover_density(double x, const SepParams& p, int n, Side side = Side::Sell);

// Abs error <= 1e-10 against reference values (Cody erfc underneath).
inline double std_normal_cdf(double z) { return special::std_normal_cdf(z); }
inline double std_normal_pdf(double z) { return special::std_normal_pdf(z); }

} // namespace rfq
