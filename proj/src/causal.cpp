#include "rfqlab/causal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "rfqlab/discriminative.hpp"
#include "rfqlab/rng.hpp"

namespace rfq {

AdjustmentSpec conditioning_set(CausalTarget target) {
    switch (target) {
        case CausalTarget::HitProb:
            return {target, {"sigma", "RF", "BF", "CF"}, {}};
        case CausalTarget::RevenuesOnHit:
            return {target, {"sigma", "RF"}, {"IA"}};
        case CausalTarget::Uplift:
            return {target, {"axe"}, {}};
    }
    throw UnknownTarget("conditioning_set: unrecognized target");
}

namespace {

std::size_t layout_index(const FeatureLayout& layout, const std::string& name) {
    const auto names = layout.names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return i;
    throw LayoutMismatch("marginalized_hit_prob: unknown feature " + name);
}

void apply_row(const FeatureLayout& layout, const std::vector<double>& row, double& delta,
               FeatureBundle& f) {
    delta = row[0];
    f.volatility = row[1];
    for (std::size_t k = 0; k < kBondFeatureCount; ++k) f.bond[k] = row[2 + k];
    f.rfq[0] = row[7];
    f.rfq[1] = row[8];
    for (std::size_t k = 0; k < layout.n_client; ++k) f.client[k] = row[9 + k];
}

} // namespace

MarginalizedResult marginalized_hit_prob(const HitModel& model, double delta,
                                         const FeatureBundle& kept,
                                         const std::vector<ExcludedFeature>& excluded,
                                         std::size_t n_draws, std::uint64_t seed) {
    FeatureLayout layout{kept.client.size()};
    std::vector<std::size_t> idx;
    bool all_discrete = true;
    std::size_t combos = 1;
    for (const auto& e : excluded) {
        idx.push_back(layout_index(layout, e.name));
        if (e.gaussian) {
            all_discrete = false;
        } else {
            if (e.support.empty() || e.support.size() != e.probs.size())
                throw InvalidParams("marginalized_hit_prob: bad discrete support");
            combos *= e.support.size();
        }
    }

    std::vector<double> base_row = layout.row(delta, kept);
    MarginalizedResult out;
    if (all_discrete && combos <= 4096) {
        out.exact = true;
        double acc = 0.0;
        std::vector<std::size_t> counter(excluded.size(), 0);
        for (std::size_t c = 0; c < combos; ++c) {
            auto row = base_row;
            double weight = 1.0;
            std::size_t rem = c;
            for (std::size_t j = 0; j < excluded.size(); ++j) {
                const std::size_t pick = rem % excluded[j].support.size();
                rem /= excluded[j].support.size();
                row[idx[j]] = excluded[j].support[pick];
                weight *= excluded[j].probs[pick];
            }
            double d = delta;
            FeatureBundle f = kept;
            apply_row(layout, row, d, f);
            acc += weight * model.predict(d, f);
        }
        out.value = acc;
        return out;
    }

    if (n_draws == 0) throw InvalidParams("marginalized_hit_prob: n_draws must be >= 1");
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t m = 0; m < n_draws; ++m) {
        RngStream rng(salt_seed(seed, 0x3A6), m);
        auto row = base_row;
        for (std::size_t j = 0; j < excluded.size(); ++j) {
            const auto& e = excluded[j];
            if (e.gaussian) {
                row[idx[j]] = e.mean + e.sd * rng.normal();
            } else {
                double u = rng.uniform01();
                std::size_t pick = 0;
                while (pick + 1 < e.probs.size() && u > e.probs[pick]) {
                    u -= e.probs[pick];
                    ++pick;
                }
                row[idx[j]] = e.support[pick];
            }
        }
        double d = delta;
        FeatureBundle f = kept;
        apply_row(layout, row, d, f);
        const double p = model.predict(d, f);
        sum += p;
        sum_sq += p * p;
    }
    const double n = static_cast<double>(n_draws);
    out.value = sum / n;
    out.std_error = std::sqrt(std::max(0.0, sum_sq / n - out.value * out.value) / n);
    return out;
}

AuditReport causal_audit(const ScenarioConfig& scenario, const std::vector<double>& delta_grid,
                         const std::vector<std::pair<std::string, const HitModel*>>& models,
                         const AuditOptions& options) {
    if (scenario.policy.mode != DealerPolicy::Mode::Historical)
        throw InvalidConfig("causal_audit: scenario must use the confounded historical policy");
    if (delta_grid.empty()) throw InvalidConfig("causal_audit: empty grid");

    // observational world for the naive estimator and the context population
    ScenarioConfig obs = scenario;
    obs.n_rfqs = options.n_observational;
    const auto ds = simulate(obs);

    // equal-frequency bins over observed spreads
    std::vector<double> deltas(ds.records.size());
    for (std::size_t i = 0; i < ds.records.size(); ++i) deltas[i] = ds.records[i].delta_norm;
    std::vector<double> sorted = deltas;
    std::sort(sorted.begin(), sorted.end());
    const int n_bins = options.naive_bins;
    std::vector<double> edges(n_bins + 1);
    for (int b = 0; b <= n_bins; ++b) {
        const std::size_t pos =
            std::min(sorted.size() - 1, static_cast<std::size_t>(static_cast<double>(b) /
                                                                 n_bins * (sorted.size() - 1)));
        edges[b] = sorted[pos];
    }
    std::vector<double> bin_hits(n_bins, 0.0), bin_counts(n_bins, 0.0);
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        const int b = std::clamp(
            static_cast<int>(std::upper_bound(edges.begin(), edges.end(), deltas[i]) -
                             edges.begin()) -
                1,
            0, n_bins - 1);
        bin_counts[b] += 1.0;
        bin_hits[b] += ds.records[i].hit() ? 1.0 : 0.0;
    }

    AuditReport report;
    for (const auto& [name, model] : models) {
        (void)model;
        report.model_names.push_back(name);
    }

    for (std::size_t g = 0; g < delta_grid.size(); ++g) {
        const double delta = delta_grid[g];
        AuditPoint pt;
        pt.delta = delta;

        // interventional truth: fresh simulation with do(delta)
        ScenarioConfig interv = scenario;
        interv.n_rfqs = options.n_interventional;
        interv.policy.mode = DealerPolicy::Mode::Intervention;
        interv.policy.grid = {delta};
        interv.seed = salt_seed(scenario.seed, 0x7717 + g);
        const auto world = simulate(interv);
        double hits = 0.0;
        for (const auto& r : world.records) hits += r.hit() ? 1.0 : 0.0;
        pt.truth = hits / static_cast<double>(world.records.size());
        pt.truth_se =
            std::sqrt(pt.truth * (1.0 - pt.truth) / static_cast<double>(world.records.size()));

        const int b = std::clamp(
            static_cast<int>(std::upper_bound(edges.begin(), edges.end(), delta) - edges.begin()) -
                1,
            0, n_bins - 1);
        if (bin_counts[b] > 0.0) {
            pt.naive = bin_hits[b] / bin_counts[b];
            pt.naive_se = std::sqrt(pt.naive * (1.0 - pt.naive) / bin_counts[b]);
        }

        for (const auto& [name, model] : models) {
            (void)name;
            double sum = 0.0, sum_sq = 0.0;
            for (const auto& r : ds.records) {
                const double p = model->predict(delta, r.features);
                sum += p;
                sum_sq += p * p;
            }
            const double n = static_cast<double>(ds.records.size());
            const double mean = sum / n;
            pt.adjusted.push_back(mean);
            pt.adjusted_se.push_back(std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / n));
        }
        report.points.push_back(std::move(pt));
    }
    return report;
}

void write_audit_csv(const AuditReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot open " + path + " for writing");
    out << "delta,truth,truth_se,naive,naive_se,naive_bias";
    for (const auto& name : report.model_names)
        out << ",adj_" << name << ",adj_" << name << "_se,adj_" << name << "_bias";
    out << '\n';
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& pt : report.points) {
        out << fmt(pt.delta) << ',' << fmt(pt.truth) << ',' << fmt(pt.truth_se) << ','
            << fmt(pt.naive) << ',' << fmt(pt.naive_se) << ',' << fmt(pt.naive - pt.truth);
        for (std::size_t m = 0; m < pt.adjusted.size(); ++m)
            out << ',' << fmt(pt.adjusted[m]) << ',' << fmt(pt.adjusted_se[m]) << ','
                << fmt(pt.adjusted[m] - pt.truth);
        out << '\n';
    }
}

} // namespace rfq
