#include "rfqlab/distributions.hpp"

#include <cmath>

#include "rfqlab/rng.hpp"

namespace rfq {

double sep_pdf(double x, const SepParams& p) {
    p.validate();
    return sep::pdf_t(x, p.location, p.scale, p.shape, p.asym);
}

double sep_cdf(double x, const SepParams& p) {
    p.validate();
    if (!std::isfinite(x)) return x < 0.0 ? 0.0 : 1.0;
    return sep::cdf_t(x, p.location, p.scale, p.shape, p.asym);
}

double sep_sf(double x, const SepParams& p) {
    p.validate();
    if (!std::isfinite(x)) return x < 0.0 ? 1.0 : 0.0;
    return sep::sf_t(x, p.location, p.scale, p.shape, p.asym);
}

double sep_quantile(double prob, const SepParams& p) {
    p.validate();
    if (!(prob > 0.0 && prob < 1.0)) throw InvalidParams("sep_quantile: prob must be in (0,1)");
    // Expand a bracket geometrically, then bisect.
    double lo = p.location - p.scale;
    double hi = p.location + p.scale;
    double step = p.scale;
    while (sep_cdf(lo, p) > prob) {
        lo -= step;
        step *= 2.0;
    }
    step = p.scale;
    while (sep_cdf(hi, p) < prob) {
        hi += step;
        step *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-13 * (1.0 + std::fabs(lo) + std::fabs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (sep_cdf(mid, p) < prob ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double sep_symmetric_variance(const SepParams& p) {
    return std::exp(std::lgamma(3.0 / p.shape) - std::lgamma(1.0 / p.shape)) * p.scale * p.scale;
}

SepCache::SepCache(const SepParams& sp) : params(sp) {
    a = 1.0 / sp.shape;
    lgamma_a = std::lgamma(a);
    digamma_a = special::digamma(a);
    lognorm = std::log(sp.shape) - std::log(sp.asym + 1.0 / sp.asym) - lgamma_a -
              std::log(sp.scale);
    c1 = 1.0 / (1.0 + sp.asym * sp.asym);
    dc1 = -2.0 * sp.asym * c1 * c1;
    dnorm_dxi = -(1.0 - 1.0 / (sp.asym * sp.asym)) / (sp.asym + 1.0 / sp.asym);
    lgamma_a1 = lgamma_a + std::log(a);
    digamma_a1 = digamma_a + 1.0 / a;
}

namespace {

constexpr double kSatKappa = 45.0; // exp(-45) ~ 2.9e-20: saturate the CDF there

struct SepFrame {
    double z = 0.0;     // (x - loc)/scale
    double u = 0.0;     // branch-scaled magnitude
    double lnu = 0.0;
    double kappa = 0.0; // u^shape
    bool left = false;
};

SepFrame sep_frame(double x, const SepParams& p) {
    SepFrame f;
    f.z = (x - p.location) / p.scale;
    f.left = f.z < 0.0;
    f.u = f.left ? -f.z * p.asym : f.z / p.asym;
    if (f.u > 1e-300) {
        f.lnu = std::log(f.u);
        f.kappa = std::exp(p.shape * f.lnu);
    }
    return f;
}

// Regularized lower gamma series with the a-derivative; valid for any x but
// called with x <= kSatKappa where the all-positive series is well behaved.
struct SeriesPGrad {
    double p = 0.0, d_a = 0.0, t_term = 0.0; // t_term = kappa^a e^-kappa / Gamma(a)
};

SeriesPGrad gamma_p_series(const SepCache& cc, const SepFrame& fr, bool want_grad) {
    SeriesPGrad out;
    if (fr.kappa <= 0.0) return out;
    const double x = fr.kappa;
    double t = 1.0, s = 1.0, dt = 0.0, ds = 0.0;
    for (int n = 1; n < 800; ++n) {
        const double r = x / (cc.a + n);
        if (want_grad) dt = dt * r - t * r / (cc.a + n);
        t *= r;
        s += t;
        ds += dt;
        if (t < s * 1e-17) break;
    }
    // a*ln(kappa) = lnu since a*shape = 1
    const double c = std::exp(fr.lnu - x - cc.lgamma_a1);
    out.p = c * s;
    out.t_term = c * cc.a;
    if (want_grad) {
        const double lnk = cc.params.shape * fr.lnu;
        out.d_a = c * (lnk - cc.digamma_a1) * s + c * ds;
    }
    return out;
}

double pdf_value(const SepCache& cc, const SepFrame& fr) {
    return std::exp(cc.lognorm - fr.kappa);
}

} // namespace

double sep_pdf_cached(double x, const SepCache& c) {
    return pdf_value(c, sep_frame(x, c.params));
}

double sep_cdf_cached(double x, const SepCache& c) {
    const SepFrame fr = sep_frame(x, c.params);
    if (fr.kappa > kSatKappa) return fr.left ? 0.0 : 1.0;
    const double p = gamma_p_series(c, fr, false).p;
    return fr.left ? c.c1 * (1.0 - p) : c.c1 + (1.0 - c.c1) * p;
}

void sep_pdf_cdf_partials(double x, const SepCache& cc, SepPartials* pdf, SepPartials* cdf) {
    const SepParams& p = cc.params;
    const SepFrame fr = sep_frame(x, p);
    if (fr.kappa > kSatKappa) { // both sides saturated to ~1e-20
        if (pdf) *pdf = SepPartials{};
        if (cdf) {
            *cdf = SepPartials{};
            cdf->value = fr.left ? 0.0 : 1.0;
        }
        return;
    }
    const double f = pdf_value(cc, fr);
    if (pdf) {
        pdf->value = f;
        pdf->d_loc = x == p.location ? 0.0 : f * p.shape * fr.kappa / (x - p.location);
        pdf->d_scale = f * (p.shape * fr.kappa - 1.0) / p.scale;
        pdf->d_asym = f * (cc.dnorm_dxi + (fr.left ? -1.0 : 1.0) * p.shape * fr.kappa / p.asym);
        pdf->d_shape = f * (1.0 / p.shape + cc.digamma_a / (p.shape * p.shape) -
                            fr.kappa * fr.lnu);
    }
    if (cdf) {
        const SeriesPGrad g = gamma_p_series(cc, fr, true);
        const double pw2 = p.shape * p.shape;
        cdf->d_loc = -f;
        cdf->d_scale = -f * fr.z;
        if (fr.left) {
            cdf->value = cc.c1 * (1.0 - g.p);
            cdf->d_asym = cc.dc1 * (1.0 - g.p) - cc.c1 * p.shape * g.t_term / p.asym;
            cdf->d_shape = cc.c1 * (g.d_a / pw2 - g.t_term * fr.lnu);
        } else {
            cdf->value = cc.c1 + (1.0 - cc.c1) * g.p;
            cdf->d_asym = cc.dc1 * (1.0 - g.p) - (1.0 - cc.c1) * p.shape * g.t_term / p.asym;
            cdf->d_shape = (1.0 - cc.c1) * (-g.d_a / pw2 + g.t_term * fr.lnu);
        }
    }
}

SepPartials sep_pdf_partials(double x, const SepParams& p) {
    SepPartials out;
    sep_pdf_cdf_partials(x, SepCache(p), &out, nullptr);
    return out;
}

SepPartials sep_cdf_partials(double x, const SepParams& p) {
    SepPartials out;
    sep_pdf_cdf_partials(x, SepCache(p), nullptr, &out);
    return out;
}

double sep_sample(RngStream& rng, const SepParams& p) {
    // Branch with the right-tail mass asym^2/(1+asym^2); the magnitude
    // |z|^shape is Gamma(1/shape) distributed.
    const double xi2 = p.asym * p.asym;
    const bool right = rng.bernoulli(xi2 / (1.0 + xi2));
    const double t = std::pow(rng.gamma(1.0 / p.shape), 1.0 / p.shape);
    const double z = right ? t * p.asym : -t / p.asym;
    return p.location + p.scale * z;
}

double best_quote_survival(double x, const SepParams& p, int n, double p_quote, Side) {
    p.validate();
    if (n < 0) throw InvalidParams("best_quote_survival: n must be >= 0");
    if (!(p_quote >= 0.0 && p_quote <= 1.0))
        throw InvalidParams("best_quote_survival: p_quote must be in [0,1]");
    if (n == 0) return 1.0;
    return powi(1.0 - p_quote * sep_cdf(x, p), n);
}

double cover_density(double x, const SepParams& p, int n, Side) {
    p.validate();
    if (n < 1) throw InvalidParams("cover_density: n must be >= 1");
    return n * sep_pdf(x, p) * powi(sep_sf(x, p), n - 1);
}

} // namespace rfq

namespace rfq::special {

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidParams("std_normal_quantile: p must be in (0,1)");
    // Acklam's rational approximation ...
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // ... plus one Halley step against the accurate CDF.
    const double e = std_normal_cdf(x) - p;
    const double u = e / std_normal_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double digamma(double z) {
    if (!(z > 0.0)) throw InvalidParams("digamma: need z > 0");
    double acc = 0.0;
    while (z < 6.0) { // recurrence up, then asymptotic series
        acc -= 1.0 / z;
        z += 1.0;
    }
    const double inv = 1.0 / z;
    const double inv2 = inv * inv;
    return acc + std::log(z) - 0.5 * inv -
           inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

GammaPGrad gamma_p_grad(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw InvalidParams("gamma_p_grad: need a > 0, x >= 0");
    GammaPGrad out;
    if (x == 0.0) return out;
    const double lx = std::log(x);
    out.d_x = std::exp((a - 1.0) * lx - x - std::lgamma(a));
    if (x < a + 1.0) {
        // P = C * S, C = x^a e^{-x} / Gamma(a+1), S = sum t_n, t_n = t_{n-1} x/(a+n);
        // the a-derivative of the sum follows the same recurrence.
        double t = 1.0, s = 1.0, dt = 0.0, ds = 0.0;
        for (int n = 1; n < 600; ++n) {
            const double r = x / (a + n);
            dt = dt * r - t * r / (a + n);
            t *= r;
            s += t;
            ds += dt;
            if (t < s * 1e-17) break;
        }
        const double c = std::exp(a * lx - x - std::lgamma(a + 1.0));
        const double dc = c * (lx - digamma(a + 1.0));
        out.value = c * s;
        out.d_a = dc * s + c * ds;
        return out;
    }
    // continued-fraction region: push one dual slot through the generic code
    const Dual<1> p = gamma_p(Dual<1>::seed(a, 0), Dual<1>(x));
    out.value = p.v;
    out.d_a = p.d[0];
    return out;
}

} // namespace rfq::special
