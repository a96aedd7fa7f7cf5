#include "rfqlab/simulator.hpp"

#include "rfqlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <atomic>
#include <limits>

namespace rfq {

namespace {

double dot_small(const std::vector<double>& coef, const std::vector<double>& x, const char* what) {
    if (coef.empty()) return 0.0;
    if (coef.size() != x.size()) throw DimensionMismatch(std::string("coefficient size mismatch: ") + what);
    double acc = 0.0;
    for (std::size_t i = 0; i < coef.size(); ++i) acc += coef[i] * x[i];
    return acc;
}

} // namespace

double rfq_arrival_intensity(const IntensityParams& p, const FeatureBundle& ctx, bool pd, bool ia,
                             bool call, bool axe) {
    double lambda = p.base + dot_small(p.client, ctx.client, "intensity.client") +
                    dot_small(p.bond, ctx.bond, "intensity.bond") +
                    dot_small(p.rfq, ctx.rfq, "intensity.rfq");
    if (pd) lambda += p.pd;
    if (ia) lambda += p.ia;
    if (call) lambda += p.call;
    if (axe) lambda += p.axe;
    return std::max(0.0, lambda);
}

double LinearModel::eval(const FeatureBundle& ctx, bool ia) const {
    double v = intercept + sigma_coef * ctx.volatility +
               dot_small(client, ctx.client, "linear.client") +
               dot_small(bond, ctx.bond, "linear.bond") + dot_small(rfq, ctx.rfq, "linear.rfq");
    if (ia) v += ia_shift;
    return v;
}

void LinearModel::validate(std::size_t n_client) const {
    if (!client.empty() && client.size() != n_client)
        throw InvalidConfig("LinearModel: client coefficient size mismatch");
    if (!bond.empty() && bond.size() != kBondFeatureCount)
        throw InvalidConfig("LinearModel: bond coefficient size mismatch");
    if (!rfq.empty() && rfq.size() != kRfqFeatureCount)
        throw InvalidConfig("LinearModel: rfq coefficient size mismatch");
}

double LogitModel::prob(const FeatureBundle& ctx) const {
    const double eta = intercept + dot_small(client, ctx.client, "logit.client") +
                       dot_small(bond, ctx.bond, "logit.bond");
    if (eta > 36.0) return 0.0;
    if (eta < -36.0) return 1.0;
    return 1.0 / (1.0 + std::exp(eta));
}

void GenerativeParams::validate(std::size_t n_client) const {
    dealer_sep.validate();
    if (!(reservation_sd > 0.0)) throw InvalidConfig("reservation_sd must be > 0");
    if (!(p_quote >= 0.0 && p_quote <= 1.0)) throw InvalidConfig("p_quote must be in [0,1]");
    if (!(tie_break >= 0.0 && tie_break <= 1.0)) throw InvalidConfig("tie_break must be in [0,1]");
    for (double pa : call_prob)
        if (!(pa >= 0.0 && pa <= 1.0)) throw InvalidConfig("call_prob must be in [0,1]");
    if (dealer_shift.intercept != 0.0)
        throw InvalidConfig("dealer_shift.intercept belongs in dealer_sep.location");
    reservation.validate(n_client);
    dealer_shift.validate(n_client);
}

void FeatureSampler::normalize() {
    auto fill = [](std::vector<double>& v, std::size_t n, double def) {
        if (v.empty()) v.assign(n, def);
        else if (v.size() != n) throw InvalidConfig("FeatureSampler: mean/sd size mismatch");
    };
    fill(client_mean, n_client, 0.0);
    fill(client_sd, n_client, 1.0);
    fill(bond_mean, kBondFeatureCount, 0.0);
    fill(bond_sd, kBondFeatureCount, 1.0);
    if (n_min < 0 || n_max < n_min) throw InvalidConfig("FeatureSampler: bad dealer-count range");
}

void ScenarioConfig::validate() const {
    if (n_rfqs < 1) throw InvalidConfig("n_rfqs must be >= 1");
    if (policy.mode == DealerPolicy::Mode::Intervention && policy.grid.empty())
        throw InvalidConfig("intervention policy needs a non-empty grid");
    if (!policy.bond_weights.empty() && policy.bond_weights.size() != kBondFeatureCount)
        throw InvalidConfig("dealer policy bond_weights size mismatch");
    if (candidate_mode && !(dt > 0.0)) throw InvalidConfig("candidate mode needs dt > 0");
    if (cells.n_client_cells < 0 || cells.n_bond_cells < 0 ||
        (cells.n_client_cells > 0) != (cells.n_bond_cells > 0))
        throw InvalidConfig("cell mode needs both cell counts positive");
    params.validate(sampler.n_client);
}

RawStatus resolve_status(double delta, double delta_res, const std::vector<double>& quotes,
                         bool pd, bool tie_win) {
    if (pd) return RawStatus::Passed;
    double best = std::numeric_limits<double>::infinity();
    for (double q : quotes) best = std::min(best, q);
    if (delta < best) {
        return delta <= delta_res ? RawStatus::Done : RawStatus::Passed;
    }
    if (delta == best) {
        if (delta > delta_res) return RawStatus::Passed;
        return tie_win ? RawStatus::TiedDone : RawStatus::TiedTradedAway;
    }
    if (best > delta_res) return RawStatus::Passed;
    int better = 0;
    for (double q : quotes)
        if (q < delta) ++better;
    return better == 1 ? RawStatus::Covered : RawStatus::OtherTradedAway;
}

namespace {

struct RowDraw {
    RfqRecord record;
    RecordLatents latents;
    CandidateRow candidate;
    bool occurred = true;
};

// Cell feature tables are drawn once from the sampler with a dedicated salt.
std::vector<std::vector<double>> draw_cells(const ScenarioConfig& cfg, int count,
                                            const std::vector<double>& mean,
                                            const std::vector<double>& sd, std::uint64_t salt) {
    std::vector<std::vector<double>> cells(count);
    for (int c = 0; c < count; ++c) {
        RngStream rng(salt_seed(cfg.seed, salt), c);
        std::vector<double> v(mean.size());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = mean[j] + sd[j] * rng.normal();
        cells[c] = std::move(v);
    }
    return cells;
}

RowDraw simulate_row(const ScenarioConfig& cfg, const FeatureSampler& fs, std::uint64_t row,
                     const std::vector<std::vector<double>>& client_cells,
                     const std::vector<std::vector<double>>& bond_cells) {
    RngStream rng(cfg.seed, row);
    RowDraw out;
    RfqRecord& r = out.record;
    RecordLatents& lat = out.latents;
    lat.row = row;

    r.timestamp = static_cast<double>(row);
    r.side = rng.bernoulli(fs.p_sell) ? Side::Sell : Side::Buy;
    r.volume = std::exp(fs.volume_log_mean + fs.volume_log_sd * rng.normal());

    FeatureBundle& f = r.features;
    const bool cell_mode = !client_cells.empty();
    int client_cell = 0, bond_cell = 0;
    if (cell_mode) {
        client_cell = rng.uniform_int(0, static_cast<int>(client_cells.size()) - 1);
        bond_cell = rng.uniform_int(0, static_cast<int>(bond_cells.size()) - 1);
        f.client = client_cells[client_cell];
        f.bond = bond_cells[bond_cell];
    } else {
        f.client.resize(fs.n_client);
        for (std::size_t j = 0; j < fs.n_client; ++j)
            f.client[j] = fs.client_mean[j] + fs.client_sd[j] * rng.normal();
        f.bond.resize(kBondFeatureCount);
        for (std::size_t j = 0; j < kBondFeatureCount; ++j)
            f.bond[j] = fs.bond_mean[j] + fs.bond_sd[j] * rng.normal();
    }
    f.volatility = std::exp(fs.sigma_log_mean + fs.sigma_log_sd * rng.normal());
    const int n = rng.uniform_int(fs.n_min, fs.n_max);
    f.rfq = {static_cast<double>(n), r.volume * f.bond[0]}; // dv01 exposure

    r.axe = rng.bernoulli(fs.axe_prob);
    r.call = cfg.call_policy.forced ? (*cfg.call_policy.forced != 0)
                                    : rng.bernoulli(cfg.params.call_prob[r.axe ? 1 : 0]);
    lat.pd = cfg.force_pd ? *cfg.force_pd : (rng.bernoulli(cfg.params.pd_model.prob(f)) ? 1 : 0);
    lat.ia = cfg.force_ia ? *cfg.force_ia : (rng.bernoulli(cfg.params.ia_model.prob(f)) ? 1 : 0);

    if (cfg.candidate_mode) {
        const double lambda =
            rfq_arrival_intensity(cfg.params.intensity, f, lat.pd, lat.ia, r.call, r.axe);
        out.candidate = {row, client_cell, bond_cell, r.axe, r.call,
                         rng.bernoulli(std::min(1.0, lambda * cfg.dt))};
        out.occurred = out.candidate.occurred;
        if (!out.occurred) return out;
    }

    lat.delta_res = cfg.params.reservation.eval(f, lat.ia == 1) +
                    cfg.params.reservation_sd * rng.normal();
    lat.k = rng.binomial(n, cfg.params.p_quote);
    const SepParams quote_dist = cfg.params.dealer_sep_at(f);
    lat.quotes.resize(lat.k);
    for (auto& q : lat.quotes) q = sep_sample(rng, quote_dist);

    const auto& pol = cfg.policy;
    if (pol.mode == DealerPolicy::Mode::Historical) {
        r.delta_norm = pol.g0 + pol.g1_sigma * f.volatility +
                       (pol.bond_weights.empty() ? 0.0
                                                 : dot_small(pol.bond_weights, f.bond, "policy")) +
                       (r.axe ? pol.g3_axe : 0.0) + pol.noise_sd * rng.normal();
    } else {
        r.delta_norm = pol.grid[row % pol.grid.size()];
    }
    r.delta_benchmark = 1.0;

    lat.tie_win = rng.bernoulli(cfg.params.tie_break);
    r.status = resolve_status(r.delta_norm, lat.delta_res, lat.quotes, lat.pd == 1, lat.tie_win);

    if (r.hit() && lat.k >= 1) {
        r.cover_norm = *std::min_element(lat.quotes.begin(), lat.quotes.end());
    } else if (r.status == RawStatus::Covered) {
        r.cover_norm = r.delta_norm; // the covered dealer's own quote is the cover
    }

    lat.drift_term = cfg.params.drift * (lat.ia == 1 ? 1.0 : 0.0) * cfg.params.horizon;
    const double mid0 = 100.0;
    const double move =
        lat.drift_term + f.volatility * std::sqrt(cfg.params.horizon) * rng.normal();
    r.mid_path = {mid0, mid0 + move};
    return out;
}

} // namespace

SyntheticDataset simulate(const ScenarioConfig& config) {
    config.validate();
    ScenarioConfig cfg = config;
    cfg.sampler.normalize();

    SyntheticDataset ds;
    if (cfg.cells.n_client_cells > 0) {
        ds.client_cells = draw_cells(cfg, cfg.cells.n_client_cells, cfg.sampler.client_mean,
                                     cfg.sampler.client_sd, 0xC11E);
        ds.bond_cells =
            draw_cells(cfg, cfg.cells.n_bond_cells, cfg.sampler.bond_mean, cfg.sampler.bond_sd, 0xB0DD);
    }

    std::vector<RowDraw> draws(cfg.n_rfqs);
    parallel_for(cfg.n_rfqs, [&](std::size_t begin, std::size_t end) {
        for (std::size_t row = begin; row < end; ++row)
            draws[row] = simulate_row(cfg, cfg.sampler, row, ds.client_cells, ds.bond_cells);
    });
    ds.records.reserve(cfg.n_rfqs);
    ds.latents.reserve(cfg.n_rfqs);
    for (auto& draw : draws) {
        if (cfg.candidate_mode) ds.candidates.push_back(draw.candidate);
        if (!draw.occurred) continue;
        ds.records.push_back(std::move(draw.record));
        ds.latents.push_back(std::move(draw.latents));
    }
    return ds;
}

MonteCarloEstimate interventional_hit_prob(const ScenarioConfig& config, double delta,
                                           const FeatureBundle& context, std::size_t n_mc) {
    config.validate();
    if (n_mc == 0) throw InvalidConfig("interventional_hit_prob: n_mc must be >= 1");
    context.validate();
    const auto& p = config.params;
    const SepParams quote_dist = p.dealer_sep_at(context);
    const int n = context.n_dealers();
    const std::uint64_t seed = salt_seed(config.seed, 0xD0D0);

    std::atomic<std::size_t> hit_count{0};
    parallel_for(n_mc, [&](std::size_t begin, std::size_t end) {
        std::size_t local = 0;
        for (std::size_t m = begin; m < end; ++m) {
            RngStream rng(seed, m);
            const bool pd = config.force_pd ? *config.force_pd != 0
                                            : rng.bernoulli(p.pd_model.prob(context));
            if (pd) continue;
            const bool ia = config.force_ia ? *config.force_ia != 0
                                            : rng.bernoulli(p.ia_model.prob(context));
            const double delta_res =
                p.reservation.eval(context, ia) + p.reservation_sd * rng.normal();
            if (delta > delta_res) continue;
            const int k = rng.binomial(n, p.p_quote);
            bool undercut = false;
            for (int j = 0; j < k && !undercut; ++j)
                undercut = sep_sample(rng, quote_dist) < delta;
            if (!undercut) ++local;
        }
        hit_count += local;
    });
    const std::size_t hits = hit_count.load();
    const double est = static_cast<double>(hits) / static_cast<double>(n_mc);
    return {est, std::sqrt(est * (1.0 - est) / static_cast<double>(n_mc))};
}

std::vector<double> sample_arrival_times(const IntensityParams& params, const FeatureBundle& ctx,
                                         bool pd, bool ia, bool call, bool axe, double t_max,
                                         double lambda_max, RngStream& rng) {
    if (!(lambda_max > 0.0) || !(t_max > 0.0))
        throw InvalidConfig("sample_arrival_times: t_max and lambda_max must be positive");
    const double lambda = rfq_arrival_intensity(params, ctx, pd, ia, call, axe);
    if (lambda > lambda_max) throw InvalidConfig("sample_arrival_times: lambda exceeds lambda_max");
    std::vector<double> times;
    double t = 0.0;
    for (;;) {
        t -= std::log(rng.uniform01()) / lambda_max;
        if (t >= t_max) break;
        if (rng.uniform01() * lambda_max < lambda) times.push_back(t);
    }
    return times;
}

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

void write_latents_csv(const SyntheticDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot open " + path + " for writing");
    std::size_t max_quotes = 0;
    for (const auto& l : ds.latents) max_quotes = std::max(max_quotes, l.quotes.size());
    out << "row,pd,ia,delta_res,k,drift_term,tie_win";
    for (std::size_t j = 0; j < max_quotes; ++j) out << ",quote_" << (j + 1);
    out << '\n';
    for (const auto& l : ds.latents) {
        out << l.row << ',' << l.pd << ',' << l.ia << ',' << fmt(l.delta_res) << ',' << l.k << ','
            << fmt(l.drift_term) << ',' << (l.tie_win ? 1 : 0);
        for (std::size_t j = 0; j < max_quotes; ++j) {
            out << ',';
            if (j < l.quotes.size()) out << fmt(l.quotes[j]);
        }
        out << '\n';
    }
}

void write_candidates_csv(const SyntheticDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot open " + path + " for writing");
    out << "row,client_cell,bond_cell,axe,call,rfq\n";
    for (const auto& c : ds.candidates)
        out << c.row << ',' << c.client_cell << ',' << c.bond_cell << ',' << (c.axe ? 1 : 0) << ','
            << (c.call ? 1 : 0) << ',' << (c.occurred ? 1 : 0) << '\n';
}

} // namespace rfq
