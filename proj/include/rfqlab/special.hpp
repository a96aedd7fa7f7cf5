#pragma once

// Scalar special functions, templated on the scalar type so the same code
// evaluates plain doubles and Dual<N> forward-mode derivatives:
//   - log-gamma (Lanczos g=7, n=9)
//   - regularized incomplete gamma P(a,x) / Q(a,x) (series + Lentz CF)
//   - erf/erfc (Cody's rational approximations, <= 1e-12 relative on the
//     ranges the normal CDF contract needs)
//   - standard normal pdf/cdf
//
// Accuracy is checked in tests against high-precision references.

#include <cmath>
#include <cstddef>
#include <limits>

#include "rfqlab/dual.hpp"
#include "rfqlab/errors.hpp"

namespace rfq::special {

inline constexpr double kInvSqrtPi = 0.56418958354775628695;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

using std::exp;
using std::fabs;
using std::log;
using std::pow;
using std::sqrt;

template <typename T>
T lgamma_t(const T& z) {
    // Godfrey's Lanczos coefficients, g = 7.
    static constexpr double c[9] = {
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
    T acc(c[0]);
    for (int i = 1; i < 9; ++i) acc += T(c[i]) / (z + T(i - 1));
    T t = z + T(6.5);
    return T(kLogSqrt2Pi) + (z - T(0.5)) * log(t) - t + log(acc);
}

// Regularized lower incomplete gamma P(a,x), a > 0, x >= 0.
template <typename T>
T gamma_p(const T& a, const T& x) {
    if (value_of(x) < 0.0 || value_of(a) <= 0.0) throw InvalidParams("gamma_p: need a > 0, x >= 0");
    if (value_of(x) == 0.0) return T(0.0);
    const T log_pre = a * log(x) - x - lgamma_t(a);
    if (value_of(x) < value_of(a) + 1.0) {
        // Series: P = pre * sum_{n>=0} x^n / (a (a+1) ... (a+n)).
        T term = T(1.0) / a;
        T sum = term;
        for (int n = 1; n < 600; ++n) {
            term *= x / (a + T(n));
            sum += term;
            if (fabs(value_of(term)) < fabs(value_of(sum)) * 1e-17) break;
        }
        return exp(log_pre) * sum;
    }
    // Lentz continued fraction for Q, then P = 1 - Q.
    const double tiny = 1e-300;
    T b = x + T(1.0) - a;
    T c = T(1.0 / tiny);
    T d = T(1.0) / b;
    T h = d;
    for (int i = 1; i < 600; ++i) {
        T an = T(-i) * (T(i) - a);
        b += T(2.0);
        d = an * d + b;
        if (fabs(value_of(d)) < tiny) d = T(tiny);
        c = b + an / c;
        if (fabs(value_of(c)) < tiny) c = T(tiny);
        d = T(1.0) / d;
        T delta = d * c;
        h *= delta;
        if (fabs(value_of(delta) - 1.0) < 1e-17) break;
    }
    return T(1.0) - exp(log_pre) * h;
}

template <typename T>
T gamma_q(const T& a, const T& x) {
    return T(1.0) - gamma_p(a, x);
}

namespace detail {

// Cody's SPECFUN rational approximations.
template <typename T>
T erf_small(const T& x) { // |x| <= 0.46875
    static constexpr double pa[5] = {3.16112374387056560e0, 1.13864154151050156e2,
                                     3.77485237685302021e2, 3.20937758913846947e3,
                                     1.85777706184603153e-1};
    static constexpr double qb[4] = {2.36012909523441209e1, 2.44024637934444173e2,
                                     1.28261652607737228e3, 2.84423683343917062e3};
    T y = x * x;
    T num = T(pa[4]) * y;
    T den = y;
    for (int i = 0; i < 3; ++i) {
        num = (num + T(pa[i])) * y;
        den = (den + T(qb[i])) * y;
    }
    return x * (num + T(pa[3])) / (den + T(qb[3]));
}

template <typename T>
T erfc_mid(const T& x) { // 0.46875 < x <= 4
    static constexpr double pc[9] = {5.64188496988670089e-1, 8.88314979438837594e0,
                                     6.61191906371416295e1,  2.98635138197400131e2,
                                     8.81952221241769090e2,  1.71204761263407058e3,
                                     2.05107837782607147e3,  1.23033935479799725e3,
                                     2.15311535474403846e-8};
    static constexpr double qd[8] = {1.57449261107098347e1, 1.17693950891312499e2,
                                     5.37181101862009858e2, 1.62138957456669019e3,
                                     3.29079923573345963e3, 4.36261909014324716e3,
                                     3.43936767414372164e3, 1.23033935480374942e3};
    T num = T(pc[8]) * x;
    T den = x;
    for (int i = 0; i < 7; ++i) {
        num = (num + T(pc[i])) * x;
        den = (den + T(qd[i])) * x;
    }
    T r = (num + T(pc[7])) / (den + T(qd[7]));
    // exp(-x^2) split for accuracy: x^2 = ysq^2 + (x-ysq)(x+ysq), ysq on a 1/16 grid.
    const double xv = value_of(x);
    const double ysq = std::trunc(xv * 16.0) / 16.0;
    T del = (x - T(ysq)) * (x + T(ysq));
    return exp(T(-ysq * ysq)) * exp(-del) * r;
}

template <typename T>
T erfc_large(const T& x) { // x > 4
    static constexpr double pp[6] = {3.05326634961232344e-1, 3.60344899949804439e-1,
                                     1.25781726111229246e-1, 1.60837851487422766e-2,
                                     6.58749161529837803e-4, 1.63153871373020978e-2};
    static constexpr double qq[5] = {2.56852019228982242e0,  1.87295284992346047e0,
                                     5.27905102951428412e-1, 6.05183413124413191e-2,
                                     2.33520497626869185e-3};
    if (value_of(x) > 26.5) return T(0.0); // underflows double
    T y = T(1.0) / (x * x);
    T num = T(pp[5]) * y;
    T den = y;
    for (int i = 0; i < 3; ++i) {
        num = (num + T(pp[i])) * y;
        den = (den + T(qq[i])) * y;
    }
    T r = y * (num + T(pp[4])) / (den + T(qq[4]));
    const double xv = value_of(x);
    const double ysq = std::trunc(xv * 16.0) / 16.0;
    T del = (x - T(ysq)) * (x + T(ysq));
    return exp(T(-ysq * ysq)) * exp(-del) / x * (T(kInvSqrtPi) - r);
}

} // namespace detail

template <typename T>
T erfc_t(const T& x) {
    const double xv = value_of(x);
    if (xv < 0.0) return T(2.0) - erfc_t(-x);
    if (xv <= 0.46875) return T(1.0) - detail::erf_small(x);
    if (xv <= 4.0) return detail::erfc_mid(x);
    return detail::erfc_large(x);
}

template <typename T>
T erf_t(const T& x) {
    const double xv = value_of(x);
    if (fabs(xv) <= 0.46875) return detail::erf_small(x);
    return T(1.0) - erfc_t(x);
}

inline double erfc(double x) { return erfc_t(x); }
inline double erf(double x) { return erf_t(x); }

template <typename T>
T std_normal_cdf_t(const T& z) {
    return T(0.5) * erfc_t(-z * T(1.0 / kSqrt2));
}

inline double std_normal_cdf(double z) {
    if (z < -37.6) return 0.0;
    if (z > 37.6) return 1.0;
    return std_normal_cdf_t(z);
}

template <typename T>
T std_normal_pdf_t(const T& z) {
    return T(0.39894228040143267794) * exp(T(-0.5) * z * z);
}

inline double std_normal_pdf(double z) { return std_normal_pdf_t(z); }

// Inverse standard normal CDF (Acklam's algorithm + one Halley polish step);
// used by samplers and quantile helpers, not by any accuracy-critical path.
double std_normal_quantile(double p);

double digamma(double z);

// P(a,x) with both partials, all-double arithmetic on the series branch; the
// likelihood gradient calls this millions of times per fit iteration.
struct GammaPGrad {
    double value = 0.0;
    double d_a = 0.0;
    double d_x = 0.0;
};
GammaPGrad gamma_p_grad(double a, double x);

} // namespace rfq::special
