#include "rfqlab/generative_fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "rfqlab/dual.hpp"
#include "rfqlab/lbfgs.hpp"
#include "rfqlab/linalg.hpp"
#include "rfqlab/quadrature.hpp"
#include "rfqlab/rng.hpp"
#include "rfqlab/special.hpp"

namespace rfq {

namespace {

constexpr int kMRes = 0, kSigRes = 1, kMD = 2, kTh2 = 3, kTh3 = 4, kTh4 = 5, kPQuote = 6;
using D7 = Dual<7>;

// Everything a record's status term depends on, over T = double or Dual<7>.
// The Dual<7> instantiation is identity-seeded by make_core_dual, which lets
// the SEP and Gaussian calls assemble their slot derivatives from the
// closed-form parameter partials instead of running Dual arithmetic through
// the incomplete-gamma series.
template <typename T>
struct TermCore {
    T m_res, sig_res;
    T m_d, th2, th3, th4;
    T p_quote;
    int n = 0;
    SepCache sep_cache;

    T s_res(double x) const { return special::std_normal_cdf_t((m_res - T(x)) / sig_res); }
    T sep_pdf(double x) const { return sep_pdf_cached(x, sep_cache); }
    T sep_cdf(double x) const { return sep_cdf_cached(x, sep_cache); }
    T w(double x) const { return T(1.0) - p_quote * sep_cdf(x); }
    // pdf and W together; the Dual path fuses the two evaluations
    void pdf_w(double x, T& pdf, T& w_out, bool want_w) const {
        pdf = sep_pdf(x);
        if (want_w) w_out = w(x);
    }
};

inline D7 sep_dual(const SepPartials& g) {
    D7 r;
    r.v = g.value;
    r.d[kMD] = g.d_loc;
    r.d[kTh2] = g.d_scale;
    r.d[kTh3] = g.d_shape;
    r.d[kTh4] = g.d_asym;
    return r;
}

inline D7 w_dual(const SepPartials& g, double pq) {
    D7 r;
    r.v = 1.0 - pq * g.value;
    r.d[kMD] = -pq * g.d_loc;
    r.d[kTh2] = -pq * g.d_scale;
    r.d[kTh3] = -pq * g.d_shape;
    r.d[kTh4] = -pq * g.d_asym;
    r.d[kPQuote] = -g.value;
    return r;
}

template <>
D7 TermCore<D7>::s_res(double x) const {
    const double sd = sig_res.v;
    const double t = (m_res.v - x) / sd;
    const double phi = special::std_normal_pdf(t);
    D7 r;
    r.v = special::std_normal_cdf(t);
    r.d[kMRes] = phi / sd;
    r.d[kSigRes] = -phi * t / sd;
    return r;
}

template <>
D7 TermCore<D7>::sep_pdf(double x) const {
    SepPartials g;
    sep_pdf_cdf_partials(x, sep_cache, &g, nullptr);
    return sep_dual(g);
}

template <>
D7 TermCore<D7>::sep_cdf(double x) const {
    SepPartials g;
    sep_pdf_cdf_partials(x, sep_cache, nullptr, &g);
    return sep_dual(g);
}

template <>
D7 TermCore<D7>::w(double x) const {
    SepPartials g;
    sep_pdf_cdf_partials(x, sep_cache, nullptr, &g);
    return w_dual(g, p_quote.v);
}

template <>
void TermCore<D7>::pdf_w(double x, D7& pdf, D7& w_out, bool want_w) const {
    SepPartials gp, gc;
    sep_pdf_cdf_partials(x, sep_cache, &gp, want_w ? &gc : nullptr);
    pdf = sep_dual(gp);
    if (want_w) w_out = w_dual(gc, p_quote.v);
}

SepCache base_sep_cache(const GenerativeParams& p) {
    return SepCache({0.0, p.dealer_sep.scale, p.dealer_sep.shape, p.dealer_sep.asym});
}

TermCore<double> make_core(const GenerativeParams& p, const FeatureBundle& f, bool ia,
                           const SepCache& base) {
    TermCore<double> c;
    c.m_res = p.reservation.eval(f, ia);
    c.sig_res = p.reservation_sd;
    c.m_d = p.dealer_location(f);
    c.th2 = p.dealer_sep.scale;
    c.th3 = p.dealer_sep.shape;
    c.th4 = p.dealer_sep.asym;
    c.p_quote = p.p_quote;
    c.n = f.n_dealers();
    c.sep_cache = base.with_location(c.m_d);
    return c;
}

TermCore<double> make_core(const GenerativeParams& p, const FeatureBundle& f, bool ia) {
    return make_core(p, f, ia, base_sep_cache(p));
}

TermCore<D7> make_core_dual(const GenerativeParams& p, const FeatureBundle& f, bool ia,
                            const SepCache& base) {
    TermCore<D7> c;
    c.m_res = D7::seed(p.reservation.eval(f, ia), kMRes);
    c.sig_res = D7::seed(p.reservation_sd, kSigRes);
    c.m_d = D7::seed(p.dealer_location(f), kMD);
    c.th2 = D7::seed(p.dealer_sep.scale, kTh2);
    c.th3 = D7::seed(p.dealer_sep.shape, kTh3);
    c.th4 = D7::seed(p.dealer_sep.asym, kTh4);
    c.p_quote = D7::seed(p.p_quote, kPQuote);
    c.n = f.n_dealers();
    c.sep_cache = base.with_location(c.m_d.v);
    return c;
}

// Integration support: the competitor-quote mass below `lo` is ~exp(-40).
template <typename T>
double quote_lower_bound(const TermCore<T>& c) {
    const double th2 = value_of(c.th2), th3 = value_of(c.th3), th4 = value_of(c.th4);
    return value_of(c.m_d) - th2 * std::pow(40.0, 1.0 / th3) / th4;
}

std::vector<double> panel_breaks(double lo, double hi, double m, double left_scale,
                                 double right_scale) {
    std::vector<double> cand = {lo,
                                m - 8.0 * left_scale,
                                m - 4.0 * left_scale,
                                m - 2.0 * left_scale,
                                m - left_scale,
                                m,
                                m + right_scale,
                                hi};
    std::vector<double> out;
    for (double x : cand)
        if (x >= lo && x <= hi) out.push_back(x);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return std::fabs(a - b) < 1e-14; }),
              out.end());
    return out;
}

// 16-point panels keep the quadrature error (whose break points track the
// quote location) well below the 1e-5 gradient-consistency contract.
const GaussLegendre& likelihood_gl() {
    static const GaussLegendre g(18);
    return g;
}

// J1 = int f_sep * S_res, J2 = int f_sep * W^(n-1) * S_res over (lo, delta].
template <typename T>
struct MissedIntegrals {
    T j1{0.0}, j2{0.0};
};

template <typename T>
MissedIntegrals<T> missed_integrals(const TermCore<T>& c, double delta, bool want_j1,
                                    bool want_j2) {
    MissedIntegrals<T> acc;
    const double lo = quote_lower_bound(c);
    if (delta <= lo) return acc;

    // Below m_res - 6.5 sd the reservation survival is 1 to ~4e-11 and both
    // integrals collapse to CDF differences; above m_res + 6.5 sd the
    // integrand vanishes. Quadrature only runs on the overlap window.
    const double m_res = value_of(c.m_res), sd = value_of(c.sig_res);
    const double lo_eff = std::clamp(m_res - 6.5 * sd, lo, delta);
    const double hi_eff = std::clamp(m_res + 6.5 * sd, lo_eff, delta);
    if (lo_eff > lo) {
        const T head = c.sep_cdf(lo_eff) - c.sep_cdf(lo);
        if (want_j1) acc.j1 += head;
        if (want_j2) {
            if (c.n > 1 && value_of(c.p_quote) > 1e-12) {
                acc.j2 += (powi(c.w(lo), c.n) - powi(c.w(lo_eff), c.n)) /
                          (T(c.n) * c.p_quote);
            } else {
                acc.j2 += head;
            }
        }
    }
    if (hi_eff <= lo_eff) return acc;

    const double th2 = value_of(c.th2), th4 = value_of(c.th4);
    const auto breaks =
        panel_breaks(lo_eff, hi_eff, value_of(c.m_d), th2 / th4, th2 * th4);
    const auto& gl = likelihood_gl();
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
        const double mid = 0.5 * (breaks[b] + breaks[b + 1]);
        const double half = 0.5 * (breaks[b + 1] - breaks[b]);
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double x = mid + half * gl.nodes[i];
            const T base = c.sep_pdf(x) * c.s_res(x) * T(half * gl.weights[i]);
            if (want_j1) acc.j1 += base;
            if (want_j2) acc.j2 += c.n > 1 ? base * powi(c.w(x), c.n - 1) : base;
        }
    }
    return acc;
}

// Status-conditional probability (or density, for covered hits) given PD = 0
// and the IA state baked into the core.
template <typename T>
T status_term(const TermCore<T>& c, const RfqRecord& r, CoverPolicy cover) {
    const double delta = r.delta_norm;
    const int n = c.n;
    switch (group_status(r.status)) {
        case StatusGroup::Hit: {
            const T sres = c.s_res(delta);
            if (r.cover_norm && n >= 1) {
                const double dc = *r.cover_norm;
                if (dc < delta) return T(0.0); // cover cannot beat the winning quote
                return sres * T(n) * c.p_quote * c.sep_pdf(dc) * powi(c.w(dc), n - 1);
            }
            if (r.cover_norm) return T(0.0); // cover with zero invitees is inconsistent
            if (cover == CoverPolicy::Systematic)
                return sres * powi(T(1.0) - c.p_quote, n);
            return sres * powi(c.w(delta), n);
        }
        case StatusGroup::Missed: {
            if (n < 1) return T(0.0);
            if (r.status == RawStatus::Covered) {
                const auto js = missed_integrals(c, delta, true, false);
                return T(n) * c.p_quote * powi(c.w(delta), n - 1) * js.j1;
            }
            const auto js = missed_integrals(c, delta, true, true);
            return T(n) * c.p_quote * (js.j2 - powi(c.w(delta), n - 1) * js.j1);
        }
        case StatusGroup::Passed: {
            const T wd_n = powi(c.w(delta), n);
            T term = (T(1.0) - c.s_res(delta)) * wd_n;
            if (n >= 1) {
                const double lo = quote_lower_bound(c);
                if (delta > lo) {
                    const auto js = missed_integrals(c, delta, false, true);
                    term += powi(c.w(lo), n) - wd_n - T(n) * c.p_quote * js.j2;
                }
            }
            return term;
        }
    }
    return T(0.0);
}

struct MixtureWeights {
    double p_pd = 0.0; // P(PD = 1 | BF, CF), zero under the benchmark flag
    double p_ia = 0.0; // P(IA = 1 | CF), zero under the benchmark flag
};

MixtureWeights mixture_weights(const GenerativeParams& p, const FeatureBundle& f,
                               const LikelihoodOptions& o) {
    MixtureWeights w;
    if (!o.pd_off) w.p_pd = p.pd_model.prob(f);
    if (!o.ia_off) w.p_ia = p.ia_model.prob(f);
    return w;
}

double record_likelihood_value(const RfqRecord& r, const GenerativeParams& p,
                               const LikelihoodOptions& o, const SepCache& base) {
    const auto w = mixture_weights(p, r.features, o);
    const double t0 = status_term(make_core(p, r.features, false, base), r, o.cover);
    double inner = t0;
    if (!o.ia_off && w.p_ia > 0.0) {
        const double t1 = status_term(make_core(p, r.features, true, base), r, o.cover);
        inner = (1.0 - w.p_ia) * t0 + w.p_ia * t1;
    }
    double lik = (1.0 - w.p_pd) * inner;
    if (group_status(r.status) == StatusGroup::Passed) lik += w.p_pd;
    return lik;
}

struct ClassWeights {
    double hit = 1.0, lost = 1.0;
};

ClassWeights class_weights(const Dataset& records, bool enabled) {
    if (!enabled) return {};
    std::size_t hits = 0;
    for (const auto& r : records) hits += r.hit() ? 1 : 0;
    const std::size_t lost = records.size() - hits;
    if (hits == 0 || lost == 0) throw DegenerateData("class weighting needs both classes");
    const double n = static_cast<double>(records.size());
    return {n / (2.0 * static_cast<double>(hits)), n / (2.0 * static_cast<double>(lost))};
}

} // namespace

double hit_probability(double delta, const FeatureBundle& ctx, const GenerativeParams& params,
                       bool pd_off, bool ia_off) {
    ctx.validate();
    params.validate(ctx.client.size());
    const LikelihoodOptions o{pd_off, ia_off, CoverPolicy::Systematic, false};
    const auto w = mixture_weights(params, ctx, o);
    const int n = ctx.n_dealers();
    const SepParams sep = params.dealer_sep_at(ctx);
    const double wn = powi(1.0 - params.p_quote * sep_cdf(delta, sep), n);
    auto sres = [&](bool ia) {
        return special::std_normal_cdf((params.reservation.eval(ctx, ia) - delta) /
                                       params.reservation_sd);
    };
    double inner = (1.0 - w.p_ia) * sres(false);
    if (w.p_ia > 0.0) inner += w.p_ia * sres(true);
    return (1.0 - w.p_pd) * inner * wn;
}

double GenerativePredictor::predict_ddelta(double delta, const FeatureBundle& ctx) const {
    const LikelihoodOptions o{pd_off_, ia_off_, CoverPolicy::Systematic, false};
    const auto w = mixture_weights(params_, ctx, o);
    const int n = ctx.n_dealers();
    const SepParams sep = params_.dealer_sep_at(ctx);
    const double wd = 1.0 - params_.p_quote * sep_cdf(delta, sep);
    const double wn = powi(wd, n);
    const double dwn =
        n >= 1 ? -static_cast<double>(n) * powi(wd, n - 1) * params_.p_quote * sep_pdf(delta, sep)
               : 0.0;
    double s = 0.0, ds = 0.0;
    auto add_state = [&](bool ia, double weight) {
        if (weight <= 0.0) return;
        const double z = (params_.reservation.eval(ctx, ia) - delta) / params_.reservation_sd;
        s += weight * special::std_normal_cdf(z);
        ds += weight * -special::std_normal_pdf(z) / params_.reservation_sd;
    };
    add_state(false, 1.0 - w.p_ia);
    add_state(true, w.p_ia);
    return (1.0 - w.p_pd) * (ds * wn + s * dwn);
}

double log_likelihood(const Dataset& records, const GenerativeParams& params,
                      const LikelihoodOptions& options) {
    if (records.empty()) throw DegenerateData("log_likelihood: empty dataset");
    params.validate(records.front().features.client.size());
    const auto cw = class_weights(records, options.class_weight);
    const SepCache base = base_sep_cache(params);
    double ll = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const double lik = record_likelihood_value(records[i], params, options, base);
        if (!(lik > 0.0) || !std::isfinite(lik)) throw NonFiniteLikelihood(i);
        ll += (records[i].hit() ? cw.hit : cw.lost) * std::log(lik);
    }
    return ll;
}

StatusMasses status_masses(const RfqRecord& record, const GenerativeParams& params,
                           const LikelihoodOptions& options) {
    auto masses_for = [&](bool ia) {
        const auto c = make_core(params, record.features, ia);
        RfqRecord probe = record;
        StatusMasses m;
        probe.status = RawStatus::Done;
        probe.cover_norm.reset();
        m.hit = status_term(c, probe, CoverPolicy::Sporadic); // marginal f(delta)
        probe.status = RawStatus::OtherTradedAway;
        const auto js = missed_integrals(c, record.delta_norm, false, true);
        m.missed = c.n >= 1 ? c.n * c.p_quote * js.j2 : 0.0;
        probe.status = RawStatus::Passed;
        m.passed = status_term(c, probe, CoverPolicy::Sporadic);
        return m;
    };
    const auto w = mixture_weights(params, record.features, options);
    StatusMasses m0 = masses_for(false);
    StatusMasses out;
    if (!options.ia_off && w.p_ia > 0.0) {
        const StatusMasses m1 = masses_for(true);
        out.hit = (1.0 - w.p_ia) * m0.hit + w.p_ia * m1.hit;
        out.missed = (1.0 - w.p_ia) * m0.missed + w.p_ia * m1.missed;
        out.passed = (1.0 - w.p_ia) * m0.passed + w.p_ia * m1.passed;
    } else {
        out = m0;
    }
    out.hit *= 1.0 - w.p_pd;
    out.missed *= 1.0 - w.p_pd;
    out.passed = (1.0 - w.p_pd) * out.passed + w.p_pd;
    return out;
}

// ---- parameter packing ----------------------------------------------------

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }
double expit(double t) { return 1.0 / (1.0 + std::exp(-t)); }

struct Layout {
    std::size_t nc = 0;
    bool pd_off = true, ia_off = true;

    // reservation block
    std::size_t res_intercept = 0;
    std::size_t res_sigma = 1;
    std::size_t res_client = 2;                       // nc entries
    std::size_t res_bond() const { return res_client + nc; } // 5
    std::size_t res_rfq() const { return res_bond() + kBondFeatureCount; } // 2
    std::size_t log_sd() const { return res_rfq() + kRfqFeatureCount; }
    // dealer block
    std::size_t sep_loc() const { return log_sd() + 1; }
    std::size_t shift_sigma() const { return sep_loc() + 1; }
    std::size_t shift_client() const { return shift_sigma() + 1; } // nc
    std::size_t shift_bond() const { return shift_client() + nc; } // 5
    std::size_t shift_rfq() const { return shift_bond() + kBondFeatureCount; } // 2
    std::size_t log_th2() const { return shift_rfq() + kRfqFeatureCount; }
    std::size_t log_th3() const { return log_th2() + 1; }
    std::size_t log_th4() const { return log_th3() + 1; }
    std::size_t logit_pq() const { return log_th4() + 1; }
    // optional IA block
    std::size_t f_res() const { return logit_pq() + 1; }
    std::size_t ia_intercept() const { return f_res() + 1; }
    std::size_t ia_client() const { return ia_intercept() + 1; } // nc
    // optional PD block
    std::size_t pd_start() const { return ia_off ? logit_pq() + 1 : ia_client() + nc; }
    std::size_t pd_intercept() const { return pd_start(); }
    std::size_t pd_client() const { return pd_start() + 1; }                 // nc
    std::size_t pd_bond() const { return pd_client() + nc; }                 // 5
    std::size_t total() const {
        std::size_t t = logit_pq() + 1;
        if (!ia_off) t += 2 + nc;
        if (!pd_off) t += 1 + nc + kBondFeatureCount;
        return t;
    }
};

Layout make_layout(const ParamPacker& p) {
    Layout l;
    l.nc = p.n_client;
    l.pd_off = p.pd_off;
    l.ia_off = p.ia_off;
    return l;
}

std::vector<double> ensure_size(std::vector<double> v, std::size_t n) {
    if (v.empty()) v.assign(n, 0.0);
    if (v.size() != n) throw InvalidInit("coefficient vector size mismatch");
    return v;
}

} // namespace

std::size_t ParamPacker::size() const { return make_layout(*this).total(); }

std::vector<double> ParamPacker::pack(const GenerativeParams& p) const {
    const Layout l = make_layout(*this);
    if (!(p.p_quote > 0.0 && p.p_quote < 1.0))
        throw InvalidInit("p_quote must be strictly inside (0,1) to fit");
    if (!(p.reservation_sd > 0.0) || !(p.dealer_sep.scale > 0.0) ||
        !(p.dealer_sep.shape > 0.0) || !(p.dealer_sep.asym > 0.0))
        throw InvalidInit("positive parameters required");
    std::vector<double> x(l.total(), 0.0);
    auto res_client = ensure_size(p.reservation.client, l.nc);
    auto res_bond = ensure_size(p.reservation.bond, kBondFeatureCount);
    auto res_rfq = ensure_size(p.reservation.rfq, kRfqFeatureCount);
    auto sh_client = ensure_size(p.dealer_shift.client, l.nc);
    auto sh_bond = ensure_size(p.dealer_shift.bond, kBondFeatureCount);
    auto sh_rfq = ensure_size(p.dealer_shift.rfq, kRfqFeatureCount);

    x[l.res_intercept] = p.reservation.intercept;
    x[l.res_sigma] = p.reservation.sigma_coef;
    std::copy(res_client.begin(), res_client.end(), x.begin() + l.res_client);
    std::copy(res_bond.begin(), res_bond.end(), x.begin() + l.res_bond());
    std::copy(res_rfq.begin(), res_rfq.end(), x.begin() + l.res_rfq());
    x[l.log_sd()] = std::log(p.reservation_sd);
    x[l.sep_loc()] = p.dealer_sep.location;
    x[l.shift_sigma()] = p.dealer_shift.sigma_coef;
    std::copy(sh_client.begin(), sh_client.end(), x.begin() + l.shift_client());
    std::copy(sh_bond.begin(), sh_bond.end(), x.begin() + l.shift_bond());
    std::copy(sh_rfq.begin(), sh_rfq.end(), x.begin() + l.shift_rfq());
    x[l.log_th2()] = std::log(p.dealer_sep.scale);
    x[l.log_th3()] = std::log(p.dealer_sep.shape);
    x[l.log_th4()] = std::log(p.dealer_sep.asym);
    x[l.logit_pq()] = logit(p.p_quote);
    if (!ia_off) {
        x[l.f_res()] = p.reservation.ia_shift;
        x[l.ia_intercept()] = p.ia_model.intercept;
        auto iac = ensure_size(p.ia_model.client, l.nc);
        std::copy(iac.begin(), iac.end(), x.begin() + l.ia_client());
    }
    if (!pd_off) {
        x[l.pd_intercept()] = p.pd_model.intercept;
        auto pdc = ensure_size(p.pd_model.client, l.nc);
        auto pdb = ensure_size(p.pd_model.bond, kBondFeatureCount);
        std::copy(pdc.begin(), pdc.end(), x.begin() + l.pd_client());
        std::copy(pdb.begin(), pdb.end(), x.begin() + l.pd_bond());
    }
    return x;
}

GenerativeParams ParamPacker::unpack(const std::vector<double>& x,
                                     const GenerativeParams& base) const {
    const Layout l = make_layout(*this);
    if (x.size() != l.total()) throw InvalidInit("packed vector size mismatch");
    GenerativeParams p = base;
    p.reservation.intercept = x[l.res_intercept];
    p.reservation.sigma_coef = x[l.res_sigma];
    p.reservation.client.assign(x.begin() + l.res_client, x.begin() + l.res_client + l.nc);
    p.reservation.bond.assign(x.begin() + l.res_bond(), x.begin() + l.res_bond() + kBondFeatureCount);
    p.reservation.rfq.assign(x.begin() + l.res_rfq(), x.begin() + l.res_rfq() + kRfqFeatureCount);
    p.reservation_sd = std::exp(x[l.log_sd()]);
    p.dealer_sep.location = x[l.sep_loc()];
    p.dealer_shift.intercept = 0.0;
    p.dealer_shift.sigma_coef = x[l.shift_sigma()];
    p.dealer_shift.client.assign(x.begin() + l.shift_client(), x.begin() + l.shift_client() + l.nc);
    p.dealer_shift.bond.assign(x.begin() + l.shift_bond(),
                               x.begin() + l.shift_bond() + kBondFeatureCount);
    p.dealer_shift.rfq.assign(x.begin() + l.shift_rfq(),
                              x.begin() + l.shift_rfq() + kRfqFeatureCount);
    p.dealer_sep.scale = std::exp(x[l.log_th2()]);
    p.dealer_sep.shape = std::exp(x[l.log_th3()]);
    p.dealer_sep.asym = std::exp(x[l.log_th4()]);
    p.p_quote = expit(x[l.logit_pq()]);
    if (!ia_off) {
        p.reservation.ia_shift = x[l.f_res()];
        p.ia_model.intercept = x[l.ia_intercept()];
        p.ia_model.client.assign(x.begin() + l.ia_client(), x.begin() + l.ia_client() + l.nc);
    }
    if (!pd_off) {
        p.pd_model.intercept = x[l.pd_intercept()];
        p.pd_model.client.assign(x.begin() + l.pd_client(), x.begin() + l.pd_client() + l.nc);
        p.pd_model.bond.assign(x.begin() + l.pd_bond(), x.begin() + l.pd_bond() + kBondFeatureCount);
    }
    return p;
}

std::vector<std::string> ParamPacker::names() const {
    const Layout l = make_layout(*this);
    std::vector<std::string> out(l.total());
    out[l.res_intercept] = "res.intercept";
    out[l.res_sigma] = "res.sigma";
    for (std::size_t j = 0; j < l.nc; ++j) out[l.res_client + j] = "res.client" + std::to_string(j + 1);
    static const char* bond_names[5] = {"dv01", "maturity", "freq_buy", "freq_sell", "avg_dealers"};
    for (std::size_t j = 0; j < kBondFeatureCount; ++j)
        out[l.res_bond() + j] = std::string("res.") + bond_names[j];
    out[l.res_rfq()] = "res.n_dealers";
    out[l.res_rfq() + 1] = "res.dv01_exposure";
    out[l.log_sd()] = "log.res_sd";
    out[l.sep_loc()] = "sep.location";
    out[l.shift_sigma()] = "sep.sigma";
    for (std::size_t j = 0; j < l.nc; ++j)
        out[l.shift_client() + j] = "sep.client" + std::to_string(j + 1);
    for (std::size_t j = 0; j < kBondFeatureCount; ++j)
        out[l.shift_bond() + j] = std::string("sep.") + bond_names[j];
    out[l.shift_rfq()] = "sep.n_dealers";
    out[l.shift_rfq() + 1] = "sep.dv01_exposure";
    out[l.log_th2()] = "log.sep_scale";
    out[l.log_th3()] = "log.sep_shape";
    out[l.log_th4()] = "log.sep_asym";
    out[l.logit_pq()] = "logit.p_quote";
    if (!ia_off) {
        out[l.f_res()] = "res.ia_shift";
        out[l.ia_intercept()] = "ia.intercept";
        for (std::size_t j = 0; j < l.nc; ++j)
            out[l.ia_client() + j] = "ia.client" + std::to_string(j + 1);
    }
    if (!pd_off) {
        out[l.pd_intercept()] = "pd.intercept";
        for (std::size_t j = 0; j < l.nc; ++j)
            out[l.pd_client() + j] = "pd.client" + std::to_string(j + 1);
        for (std::size_t j = 0; j < kBondFeatureCount; ++j)
            out[l.pd_bond() + j] = std::string("pd.") + bond_names[j];
    }
    return out;
}

namespace {

// Spread the seven core-slot sensitivities onto the flat gradient with the
// feature chain rule; `coeff` carries weight/likelihood and mixture factors.
void expand_slots(const Layout& l, const FeatureBundle& f, const std::array<double, 7>& d,
                  double coeff, bool ia_state, const GenerativeParams& p,
                  std::vector<double>& g) {
    const double dm = coeff * d[kMRes];
    g[l.res_intercept] += dm;
    g[l.res_sigma] += dm * f.volatility;
    for (std::size_t j = 0; j < l.nc; ++j) g[l.res_client + j] += dm * f.client[j];
    for (std::size_t j = 0; j < kBondFeatureCount; ++j) g[l.res_bond() + j] += dm * f.bond[j];
    for (std::size_t j = 0; j < kRfqFeatureCount; ++j) g[l.res_rfq() + j] += dm * f.rfq[j];
    if (ia_state && !l.ia_off) g[l.f_res()] += dm;
    g[l.log_sd()] += coeff * d[kSigRes] * p.reservation_sd;

    const double dd = coeff * d[kMD];
    g[l.sep_loc()] += dd;
    g[l.shift_sigma()] += dd * f.volatility;
    for (std::size_t j = 0; j < l.nc; ++j) g[l.shift_client() + j] += dd * f.client[j];
    for (std::size_t j = 0; j < kBondFeatureCount; ++j) g[l.shift_bond() + j] += dd * f.bond[j];
    for (std::size_t j = 0; j < kRfqFeatureCount; ++j) g[l.shift_rfq() + j] += dd * f.rfq[j];
    g[l.log_th2()] += coeff * d[kTh2] * p.dealer_sep.scale;
    g[l.log_th3()] += coeff * d[kTh3] * p.dealer_sep.shape;
    g[l.log_th4()] += coeff * d[kTh4] * p.dealer_sep.asym;
    g[l.logit_pq()] += coeff * d[kPQuote] * p.p_quote * (1.0 - p.p_quote);
}

void g_accumulate_ia(const Layout& l, const FeatureBundle& f, double c, std::vector<double>& g) {
    g[l.ia_intercept()] += c;
    for (std::size_t j = 0; j < l.nc; ++j) g[l.ia_client() + j] += c * f.client[j];
}

void g_accumulate_pd(const Layout& l, const FeatureBundle& f, double c, std::vector<double>& g) {
    g[l.pd_intercept()] += c;
    for (std::size_t j = 0; j < l.nc; ++j) g[l.pd_client() + j] += c * f.client[j];
    for (std::size_t j = 0; j < kBondFeatureCount; ++j) g[l.pd_bond() + j] += c * f.bond[j];
}

} // namespace

double neg_log_likelihood_grad(const Dataset& records, const ParamPacker& packer,
                               const std::vector<double>& x, const GenerativeParams& base,
                               const LikelihoodOptions& options, std::vector<double>& grad) {
    const Layout l = make_layout(packer);
    const GenerativeParams p = packer.unpack(x, base);
    const auto cw = class_weights(records, options.class_weight);
    grad.assign(l.total(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(records.size());
    const SepCache sep_base = base_sep_cache(p);
    double nll = 0.0;
    for (const auto& r : records) {
        const auto w = mixture_weights(p, r.features, options);
        const D7 t0 =
            status_term(make_core_dual(p, r.features, false, sep_base), r, options.cover);
        D7 t1(0.0);
        const bool use_ia = !options.ia_off;
        if (use_ia)
            t1 = status_term(make_core_dual(p, r.features, true, sep_base), r, options.cover);
        const double inner = use_ia ? (1.0 - w.p_ia) * t0.v + w.p_ia * t1.v : t0.v;
        const bool passed = group_status(r.status) == StatusGroup::Passed;
        const double lik = (1.0 - w.p_pd) * inner + (passed ? w.p_pd : 0.0);
        if (!(lik > 0.0) || !std::isfinite(lik)) {
            grad.assign(l.total(), 0.0);
            return std::numeric_limits<double>::infinity();
        }
        const double wrec = (r.hit() ? cw.hit : cw.lost) * inv_n;
        nll -= wrec * std::log(lik);
        const double base_coeff = -wrec / lik;

        expand_slots(l, r.features, t0.d, base_coeff * (1.0 - w.p_pd) * (use_ia ? 1.0 - w.p_ia : 1.0),
                     false, p, grad);
        if (use_ia) {
            expand_slots(l, r.features, t1.d, base_coeff * (1.0 - w.p_pd) * w.p_ia, true, p, grad);
            // d lik / d p_ia, chained through the logistic in CF
            const double dlik_dpia = (1.0 - w.p_pd) * (t1.v - t0.v);
            const double dpia_deta = -w.p_ia * (1.0 - w.p_ia); // P = 1/(1+e^eta)
            const double c = base_coeff * dlik_dpia * dpia_deta;
            g_accumulate_ia(l, r.features, c, grad);
        }
        if (!options.pd_off) {
            const double dlik_dppd = (passed ? 1.0 : 0.0) - inner;
            const double dppd_deta = -w.p_pd * (1.0 - w.p_pd);
            const double c = base_coeff * dlik_dppd * dppd_deta;
            g_accumulate_pd(l, r.features, c, grad);
        }
    }
    return nll;
}

GenerativeFitReport fit_generative(const Dataset& records, const GenerativeParams& init,
                                   const FitOptions& options) {
    if (records.empty()) throw DegenerateData("fit_generative: empty dataset");
    const std::size_t nc = records.front().features.client.size();
    init.validate(nc);
    ParamPacker packer{nc, options.likelihood.pd_off, options.likelihood.ia_off};
    const std::vector<double> x0 = packer.pack(init);

    ObjectiveFn fg = [&](const std::vector<double>& x, std::vector<double>& g) {
        return neg_log_likelihood_grad(records, packer, x, init, options.likelihood, g);
    };
    LbfgsOptions lopt;
    lopt.grad_tol = options.grad_tol;
    lopt.f_rel_tol = options.f_rel_tol;
    lopt.max_iterations = options.max_iterations;

    LbfgsResult best;
    bool have_best = false;
    double best_norm = 0.0;
    for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
        std::vector<double> x = x0;
        if (restart > 0) {
            RngStream rng(salt_seed(options.seed, 0xF17), restart);
            for (auto& v : x) v += 0.1 * rng.normal();
        }
        LbfgsResult res = lbfgs_minimize(fg, std::move(x), lopt);
        double norm = 0.0;
        for (double v : res.x) norm += v * v;
        const bool better =
            !have_best || res.f < best.f - 1e-12 ||
            (std::fabs(res.f - best.f) <= 1e-12 && norm < best_norm);
        if (better) {
            best = std::move(res);
            best_norm = norm;
            have_best = true;
        }
    }

    GenerativeFitReport report;
    report.params = packer.unpack(best.x, init);
    report.log_likelihood = -best.f * static_cast<double>(records.size());
    report.iterations = best.iterations;
    report.converged = best.converged;
    report.parameter_names = packer.names();

    if (options.compute_std_errors) {
        // observed information by central differences of the gradient
        const std::size_t n = best.x.size();
        std::vector<double> h(n * n, 0.0), gp(n), gm(n);
        const double step = 1e-5;
        for (std::size_t j = 0; j < n; ++j) {
            auto xp = best.x;
            xp[j] += step;
            neg_log_likelihood_grad(records, packer, xp, init, options.likelihood, gp);
            auto xm = best.x;
            xm[j] -= step;
            neg_log_likelihood_grad(records, packer, xm, init, options.likelihood, gm);
            for (std::size_t i = 0; i < n; ++i) h[i * n + j] = (gp[i] - gm[i]) / (2.0 * step);
        }
        for (std::size_t i = 0; i < n; ++i) // symmetrize
            for (std::size_t j = i + 1; j < n; ++j)
                h[i * n + j] = h[j * n + i] = 0.5 * (h[i * n + j] + h[j * n + i]);
        for (auto& v : h) v *= static_cast<double>(records.size()); // mean -> sum scale
        if (auto diag = spd_inverse_diagonal(h, n)) {
            std::vector<double> se(n);
            const Layout l = make_layout(packer);
            const GenerativeParams p = report.params;
            for (std::size_t i = 0; i < n; ++i) {
                double jac = 1.0;
                if (i == l.log_sd()) jac = p.reservation_sd;
                else if (i == l.log_th2()) jac = p.dealer_sep.scale;
                else if (i == l.log_th3()) jac = p.dealer_sep.shape;
                else if (i == l.log_th4()) jac = p.dealer_sep.asym;
                else if (i == l.logit_pq()) jac = p.p_quote * (1.0 - p.p_quote);
                se[i] = std::sqrt(std::max(0.0, (*diag)[i])) * jac;
            }
            report.standard_errors = std::move(se);
        }
    }
    return report;
}

} // namespace rfq
