#pragma once

// Batch arithmetic kernels for the hot inner loops (boosting-round sigmoids,
// IRLS link evaluations, Monte Carlo terminal probabilities, batch scoring).
//
// Every kernel has a scalar reference implementation and an AVX2+FMA variant;
// the variant is selected once at startup from CPUID. Both paths run the same
// polynomial algorithms with the same fma contractions and the same reduction
// order, so they agree bit-for-bit — tests assert exact equality.
//
// exp_batch clamps inputs to [-708, 709]; sigmoid/norm_cdf are full-range.

#include <cstddef>

namespace rfq::kernels {

void exp_batch(const double* x, double* out, std::size_t n);
void sigmoid_batch(const double* x, double* out, std::size_t n);
void norm_cdf_batch(const double* z, double* out, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);

// Name of the active backend: "avx2" or "scalar".
const char* active_backend();

// Test hook: force the scalar path (true) or restore auto-detection (false).
void force_scalar(bool on);

namespace scalar {
void exp_batch(const double* x, double* out, std::size_t n);
void sigmoid_batch(const double* x, double* out, std::size_t n);
void norm_cdf_batch(const double* z, double* out, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
} // namespace scalar

#if defined(RFQLAB_HAVE_AVX2)
namespace avx2 {
void exp_batch(const double* x, double* out, std::size_t n);
void sigmoid_batch(const double* x, double* out, std::size_t n);
void norm_cdf_batch(const double* z, double* out, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
} // namespace avx2
#endif

} // namespace rfq::kernels
