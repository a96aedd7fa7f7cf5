#include "rfqlab/kernels.hpp"

#include <atomic>

namespace rfq::kernels {

namespace {

struct Backend {
    void (*exp_batch)(const double*, double*, std::size_t);
    void (*sigmoid_batch)(const double*, double*, std::size_t);
    void (*norm_cdf_batch)(const double*, double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    const char* name;
};

constexpr Backend kScalar{scalar::exp_batch, scalar::sigmoid_batch, scalar::norm_cdf_batch,
                          scalar::dot,       scalar::sum,           scalar::axpy,
                          "scalar"};

#if defined(RFQLAB_HAVE_AVX2)
constexpr Backend kAvx2{avx2::exp_batch, avx2::sigmoid_batch, avx2::norm_cdf_batch,
                        avx2::dot,       avx2::sum,           avx2::axpy,
                        "avx2"};
#endif

std::atomic<bool> g_force_scalar{false};

const Backend& detect() {
#if defined(RFQLAB_HAVE_AVX2)
    static const bool has_avx2 =
        __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    if (has_avx2) return kAvx2;
#endif
    return kScalar;
}

const Backend& active() {
    if (g_force_scalar.load(std::memory_order_relaxed)) return kScalar;
    return detect();
}

} // namespace

void exp_batch(const double* x, double* out, std::size_t n) { active().exp_batch(x, out, n); }
void sigmoid_batch(const double* x, double* out, std::size_t n) { active().sigmoid_batch(x, out, n); }
void norm_cdf_batch(const double* z, double* out, std::size_t n) { active().norm_cdf_batch(z, out, n); }
double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
double sum(const double* x, std::size_t n) { return active().sum(x, n); }
void axpy(double a, const double* x, double* y, std::size_t n) { active().axpy(a, x, y, n); }

const char* active_backend() { return active().name; }

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

} // namespace rfq::kernels
