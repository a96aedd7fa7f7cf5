// AVX2+FMA kernel variants. Lane arithmetic mirrors the scalar reference
// exactly: same fma placement, same add/mul split in the Cody rationals,
// same reduction order. Tails reuse the scalar cores.

#if defined(RFQLAB_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>
#include <cstdint>

#include "kernel_constants.hpp"
#include "rfqlab/kernels.hpp"

namespace rfq::kernels {

double exp_core(double x);
double sigmoid_core(double x);
double norm_cdf_core(double z);

namespace c = consts;

namespace {

inline __m256d vset(double v) { return _mm256_set1_pd(v); }

inline __m256d vabs(__m256d x) {
    return _mm256_andnot_pd(vset(-0.0), x);
}

inline __m256d exp_vec(__m256d x) {
    x = _mm256_max_pd(x, vset(c::kExpLo));
    x = _mm256_min_pd(x, vset(c::kExpHi));
    const __m256d nf = _mm256_floor_pd(_mm256_fmadd_pd(x, vset(c::kLog2E), vset(0.5)));
    __m256d px = _mm256_fmadd_pd(_mm256_sub_pd(_mm256_setzero_pd(), nf), vset(c::kLn2Hi), x);
    px = _mm256_fmadd_pd(_mm256_sub_pd(_mm256_setzero_pd(), nf), vset(c::kLn2Lo), px);
    const __m256d xx = _mm256_mul_pd(px, px);
    __m256d p = _mm256_fmadd_pd(vset(c::kExpP[0]), xx, vset(c::kExpP[1]));
    p = _mm256_fmadd_pd(p, xx, vset(c::kExpP[2]));
    p = _mm256_mul_pd(p, px);
    __m256d q = _mm256_fmadd_pd(vset(c::kExpQ[0]), xx, vset(c::kExpQ[1]));
    q = _mm256_fmadd_pd(q, xx, vset(c::kExpQ[2]));
    q = _mm256_fmadd_pd(q, xx, vset(c::kExpQ[3]));
    __m256d r = _mm256_div_pd(p, _mm256_sub_pd(q, p));
    r = _mm256_fmadd_pd(vset(2.0), r, vset(1.0));
    const __m128i n32 = _mm256_cvtpd_epi32(nf);
    __m256i n64 = _mm256_cvtepi32_epi64(n32);
    n64 = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
    n64 = _mm256_slli_epi64(n64, 52);
    return _mm256_mul_pd(r, _mm256_castsi256_pd(n64));
}

inline __m256d sigmoid_vec(__m256d x) {
    const __m256d e = exp_vec(_mm256_sub_pd(_mm256_setzero_pd(), vabs(x)));
    const __m256d inv = _mm256_div_pd(vset(1.0), _mm256_add_pd(vset(1.0), e));
    const __m256d neg = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_LT_OQ);
    return _mm256_blendv_pd(inv, _mm256_mul_pd(e, inv), neg);
}

// erfc(|x|) with the three Cody branches evaluated and blended.
inline __m256d erfc_abs_vec(__m256d ax) {
    // small branch: ax <= 0.46875
    __m256d y = _mm256_mul_pd(ax, ax);
    __m256d num = _mm256_mul_pd(vset(c::kErfA[4]), y);
    __m256d den = y;
    for (int i = 0; i < 3; ++i) {
        num = _mm256_mul_pd(_mm256_add_pd(num, vset(c::kErfA[i])), y);
        den = _mm256_mul_pd(_mm256_add_pd(den, vset(c::kErfB[i])), y);
    }
    const __m256d small = _mm256_sub_pd(
        vset(1.0), _mm256_div_pd(_mm256_mul_pd(ax, _mm256_add_pd(num, vset(c::kErfA[3]))),
                                 _mm256_add_pd(den, vset(c::kErfB[3]))));

    // shared exp factor for the mid/large branches
    const __m256d ysq = _mm256_div_pd(
        _mm256_round_pd(_mm256_mul_pd(ax, vset(16.0)), _MM_FROUND_TO_ZERO | _MM_FROUND_NO_EXC),
        vset(16.0));
    const __m256d del = _mm256_mul_pd(_mm256_sub_pd(ax, ysq), _mm256_add_pd(ax, ysq));
    const __m256d efac =
        _mm256_mul_pd(exp_vec(_mm256_sub_pd(_mm256_setzero_pd(), _mm256_mul_pd(ysq, ysq))),
                      exp_vec(_mm256_sub_pd(_mm256_setzero_pd(), del)));

    // mid branch: 0.46875 < ax <= 4
    num = _mm256_mul_pd(vset(c::kErfC[8]), ax);
    den = ax;
    for (int i = 0; i < 7; ++i) {
        num = _mm256_mul_pd(_mm256_add_pd(num, vset(c::kErfC[i])), ax);
        den = _mm256_mul_pd(_mm256_add_pd(den, vset(c::kErfD[i])), ax);
    }
    const __m256d mid = _mm256_mul_pd(
        efac, _mm256_div_pd(_mm256_add_pd(num, vset(c::kErfC[7])), _mm256_add_pd(den, vset(c::kErfD[7]))));

    // large branch: ax > 4
    y = _mm256_div_pd(vset(1.0), _mm256_mul_pd(ax, ax));
    num = _mm256_mul_pd(vset(c::kErfP[5]), y);
    den = y;
    for (int i = 0; i < 3; ++i) {
        num = _mm256_mul_pd(_mm256_add_pd(num, vset(c::kErfP[i])), y);
        den = _mm256_mul_pd(_mm256_add_pd(den, vset(c::kErfQ[i])), y);
    }
    const __m256d r = _mm256_div_pd(_mm256_mul_pd(y, _mm256_add_pd(num, vset(c::kErfP[4]))),
                                    _mm256_add_pd(den, vset(c::kErfQ[4])));
    __m256d large = _mm256_mul_pd(_mm256_div_pd(efac, ax), _mm256_sub_pd(vset(c::kInvSqrtPi), r));
    large = _mm256_andnot_pd(_mm256_cmp_pd(ax, vset(26.5), _CMP_GT_OQ), large);

    const __m256d use_small = _mm256_cmp_pd(ax, vset(0.46875), _CMP_LE_OQ);
    const __m256d use_mid = _mm256_cmp_pd(ax, vset(4.0), _CMP_LE_OQ);
    return _mm256_blendv_pd(_mm256_blendv_pd(large, mid, use_mid), small, use_small);
}

inline __m256d norm_cdf_vec(__m256d z) {
    const __m256d x = _mm256_mul_pd(_mm256_sub_pd(_mm256_setzero_pd(), z), vset(c::kInvSqrt2));
    const __m256d e = erfc_abs_vec(vabs(x));
    const __m256d neg = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_LT_OQ);
    const __m256d folded = _mm256_blendv_pd(e, _mm256_sub_pd(vset(2.0), e), neg);
    return _mm256_mul_pd(vset(0.5), folded);
}

} // namespace

namespace avx2 {

void exp_batch(const double* x, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, exp_vec(_mm256_loadu_pd(x + i)));
    for (; i < n; ++i) out[i] = exp_core(x[i]);
}

void sigmoid_batch(const double* x, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, sigmoid_vec(_mm256_loadu_pd(x + i)));
    for (; i < n; ++i) out[i] = sigmoid_core(x[i]);
}

void norm_cdf_batch(const double* z, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, norm_cdf_vec(_mm256_loadu_pd(z + i)));
    for (; i < n; ++i) out[i] = norm_cdf_core(z[i]);
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t main = n & ~std::size_t{3};
    for (std::size_t i = 0; i < main; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d pair = _mm_add_pd(lo, hi); // (acc0+acc2, acc1+acc3)
    double r = _mm_cvtsd_f64(_mm_hadd_pd(pair, pair));
    for (std::size_t i = main; i < n; ++i) r = std::fma(a[i], b[i], r);
    return r;
}

double sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t main = n & ~std::size_t{3};
    for (std::size_t i = 0; i < main; i += 4)
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    double r = _mm_cvtsd_f64(_mm_hadd_pd(pair, pair));
    for (std::size_t i = main; i < n; ++i) r += x[i];
    return r;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = vset(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

} // namespace avx2
} // namespace rfq::kernels

#endif // RFQLAB_HAVE_AVX2
