// Scalar reference kernels. These mirror the AVX2 variants operation by
// operation (same fma contractions, same lane/accumulator structure) so the
// two backends agree bit-for-bit.

#include "rfqlab/kernels.hpp"

#include <bit>
#include <cmath>
#include <cstdint>

#include "kernel_constants.hpp"

namespace rfq::kernels {

namespace c = consts;

double exp_core(double x) {
    if (x < c::kExpLo) x = c::kExpLo;
    if (x > c::kExpHi) x = c::kExpHi;
    const double nf = std::floor(std::fma(x, c::kLog2E, 0.5));
    double px = std::fma(-nf, c::kLn2Hi, x);
    px = std::fma(-nf, c::kLn2Lo, px);
    const double xx = px * px;
    double p = std::fma(c::kExpP[0], xx, c::kExpP[1]);
    p = std::fma(p, xx, c::kExpP[2]);
    p *= px;
    double q = std::fma(c::kExpQ[0], xx, c::kExpQ[1]);
    q = std::fma(q, xx, c::kExpQ[2]);
    q = std::fma(q, xx, c::kExpQ[3]);
    double r = std::fma(2.0, p / (q - p), 1.0);
    const auto n = static_cast<std::int64_t>(nf);
    const auto bits = static_cast<std::uint64_t>(n + 1023) << 52;
    return r * std::bit_cast<double>(bits);
}

double sigmoid_core(double x) {
    const double e = exp_core(-std::fabs(x));
    const double inv = 1.0 / (1.0 + e);
    return x < 0.0 ? e * inv : inv;
}

// erfc for nonnegative argument; callers fold the sign via 2 - erfc(|x|).
double erfc_core_abs(double ax) {
    if (ax <= 0.46875) {
        const double y = ax * ax;
        double num = c::kErfA[4] * y;
        double den = y;
        for (int i = 0; i < 3; ++i) {
            num = (num + c::kErfA[i]) * y;
            den = (den + c::kErfB[i]) * y;
        }
        return 1.0 - ax * (num + c::kErfA[3]) / (den + c::kErfB[3]);
    }
    if (ax > 26.5) return 0.0;
    const double ysq = std::trunc(ax * 16.0) / 16.0;
    const double del = (ax - ysq) * (ax + ysq);
    const double efac = exp_core(-ysq * ysq) * exp_core(-del);
    if (ax <= 4.0) {
        double num = c::kErfC[8] * ax;
        double den = ax;
        for (int i = 0; i < 7; ++i) {
            num = (num + c::kErfC[i]) * ax;
            den = (den + c::kErfD[i]) * ax;
        }
        return efac * ((num + c::kErfC[7]) / (den + c::kErfD[7]));
    }
    const double y = 1.0 / (ax * ax);
    double num = c::kErfP[5] * y;
    double den = y;
    for (int i = 0; i < 3; ++i) {
        num = (num + c::kErfP[i]) * y;
        den = (den + c::kErfQ[i]) * y;
    }
    const double r = y * (num + c::kErfP[4]) / (den + c::kErfQ[4]);
    return efac / ax * (c::kInvSqrtPi - r);
}

double norm_cdf_core(double z) {
    const double x = -z * c::kInvSqrt2;
    const double e = erfc_core_abs(std::fabs(x));
    return 0.5 * (x < 0.0 ? 2.0 - e : e);
}

namespace scalar {

void exp_batch(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = exp_core(x[i]);
}

void sigmoid_batch(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = sigmoid_core(x[i]);
}

void norm_cdf_batch(const double* z, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = norm_cdf_core(z[i]);
}

double dot(const double* a, const double* b, std::size_t n) {
    // Four striped accumulators, combined like the AVX2 horizontal reduce.
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t main = n & ~std::size_t{3};
    for (std::size_t i = 0; i < main; i += 4)
        for (std::size_t j = 0; j < 4; ++j) acc[j] = std::fma(a[i + j], b[i + j], acc[j]);
    double r = (acc[0] + acc[2]) + (acc[1] + acc[3]);
    for (std::size_t i = main; i < n; ++i) r = std::fma(a[i], b[i], r);
    return r;
}

double sum(const double* x, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t main = n & ~std::size_t{3};
    for (std::size_t i = 0; i < main; i += 4)
        for (std::size_t j = 0; j < 4; ++j) acc[j] += x[i + j];
    double r = (acc[0] + acc[2]) + (acc[1] + acc[3]);
    for (std::size_t i = main; i < n; ++i) r += x[i];
    return r;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

} // namespace scalar
} // namespace rfq::kernels
