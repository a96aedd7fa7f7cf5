#include "rfqlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rfqlab/rng.hpp"

namespace rfq {

double auc_roc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw DimensionMismatch("auc_roc: scores/labels mismatch");
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (int y : labels) n_pos += y ? 1 : 0;
    if (n_pos == 0 || n_pos == n) throw SingleClass("auc_roc: both classes required");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // average ranks over ties
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
        const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k)
            if (labels[idx[k]]) rank_sum_pos += avg_rank;
        i = j + 1;
    }
    const double n1 = static_cast<double>(n_pos);
    const double n0 = static_cast<double>(n - n_pos);
    return (rank_sum_pos - n1 * (n1 + 1.0) / 2.0) / (n0 * n1);
}

BrierScores balanced_brier(const std::vector<double>& scores, const std::vector<int>& labels,
                           double w_m) {
    if (scores.size() != labels.size() || scores.empty())
        throw DimensionMismatch("balanced_brier: scores/labels mismatch");
    if (!(w_m > 0.0 && w_m < 1.0)) throw DegenerateWeight("balanced_brier: w_m must be in (0,1)");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double w = labels[i] ? w_m : 1.0 - w_m;
        const double e = scores[i] - labels[i];
        num += w * e * e;
        den += w;
    }
    BrierScores out;
    out.bbs = num / den;
    out.bbss = 1.0 - out.bbs / bbs_benchmark(w_m);
    return out;
}

std::vector<CalibrationBin> calibration_bins(const std::vector<double>& scores,
                                             const std::vector<int>& labels, int n_bins) {
    if (n_bins < 2) throw InvalidParams("calibration_bins: n_bins must be >= 2");
    std::vector<CalibrationBin> bins(n_bins);
    std::vector<double> pred_sum(n_bins, 0.0), hit_sum(n_bins, 0.0);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        int b = static_cast<int>(scores[i] * n_bins);
        b = std::clamp(b, 0, n_bins - 1);
        pred_sum[b] += scores[i];
        hit_sum[b] += labels[i];
        ++bins[b].count;
    }
    for (int b = 0; b < n_bins; ++b) {
        if (bins[b].count) {
            bins[b].mean_pred = pred_sum[b] / static_cast<double>(bins[b].count);
            bins[b].empirical = hit_sum[b] / static_cast<double>(bins[b].count);
        } else {
            bins[b].mean_pred = (b + 0.5) / n_bins; // empty bin reports its center
        }
    }
    return bins;
}

MonotonicityReport monotonicity_audit(const HitModel& model,
                                      const std::vector<FeatureBundle>& contexts,
                                      const std::vector<double>& delta_grid) {
    for (std::size_t i = 1; i < delta_grid.size(); ++i)
        if (!(delta_grid[i] > delta_grid[i - 1]))
            throw InvalidParams("monotonicity_audit: grid must be ascending");
    MonotonicityReport rep;
    for (std::size_t c = 0; c < contexts.size(); ++c) {
        double prev = model.predict(delta_grid.front(), contexts[c]);
        for (std::size_t i = 1; i < delta_grid.size(); ++i) {
            const double cur = model.predict(delta_grid[i], contexts[c]);
            const double jump = cur - prev;
            if (jump > 1e-9) {
                ++rep.violations;
                if (jump > rep.worst_jump) {
                    rep.worst_jump = jump;
                    rep.worst_context = c;
                    rep.worst_delta = delta_grid[i];
                }
            }
            prev = cur;
        }
    }
    return rep;
}

namespace {

std::vector<int> ranks_desc(const std::vector<double>& values) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] > values[b];
        return a < b;
    });
    std::vector<int> rank(values.size());
    for (std::size_t r = 0; r < idx.size(); ++r) rank[idx[r]] = static_cast<int>(r + 1);
    return rank;
}

} // namespace

FeatureImportance feature_importance(const HitModel& model, const Dataset& validation,
                                     ImportanceMethod method, std::uint64_t seed,
                                     int n_shuffles) {
    const FeatureLayout layout = FeatureLayout::infer(validation);
    FeatureImportance out;
    out.names = layout.names();

    if (method == ImportanceMethod::StdCoefficients) {
        const auto* lr = dynamic_cast<const LogisticModel*>(&model);
        if (!lr) throw IncompatibleMethod("StdCoefficients needs a logistic model");
        // weights live in standardized space, so |w_j| is |weight x feature sd|
        out.values.assign(lr->weights.begin(), lr->weights.end());
        for (auto& v : out.values) v = std::fabs(v);
        out.rank = ranks_desc(out.values);
        return out;
    }
    if (method == ImportanceMethod::Gain) {
        const auto* gb = dynamic_cast<const GbdtModel*>(&model);
        if (!gb) throw IncompatibleMethod("Gain needs a gbdt model");
        out.values = gb->feature_gain;
        out.rank = ranks_desc(out.values);
        return out;
    }

    // permutation: mean AUC drop over seeded shuffles per feature
    const std::size_t n = validation.size();
    std::vector<int> labels(n);
    std::vector<double> base_scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = validation[i].hit() ? 1 : 0;
        base_scores[i] = model.predict(validation[i].delta_norm, validation[i].features);
    }
    const double base_auc = auc_roc(base_scores, labels);

    const std::size_t d = layout.size();
    std::vector<double> column(n), scores(n);
    out.values.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < n; ++i)
            column[i] = layout.row(validation[i].delta_norm, validation[i].features)[j];
        double drop_sum = 0.0;
        for (int s = 0; s < n_shuffles; ++s) {
            RngStream rng(salt_seed(seed, 0xFEA1 + j), s);
            std::vector<double> perm = column;
            for (std::size_t i = n - 1; i > 0; --i)
                std::swap(perm[i], perm[rng.uniform_int(0, static_cast<int>(i))]);
            for (std::size_t i = 0; i < n; ++i) {
                auto row = layout.row(validation[i].delta_norm, validation[i].features);
                row[j] = perm[i];
                FeatureBundle f = validation[i].features;
                f.volatility = row[1];
                for (std::size_t k = 0; k < kBondFeatureCount; ++k) f.bond[k] = row[2 + k];
                f.rfq[0] = row[7];
                f.rfq[1] = row[8];
                for (std::size_t k = 0; k < layout.n_client; ++k) f.client[k] = row[9 + k];
                scores[i] = model.predict(row[0], f);
            }
            drop_sum += base_auc - auc_roc(scores, labels);
        }
        out.values[j] = drop_sum / n_shuffles;
    }
    out.rank = ranks_desc(out.values);
    return out;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw InvalidParams("ks_statistic: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        ks = std::max(ks, std::fabs(f - (static_cast<double>(i) + 1.0) / n));
        ks = std::max(ks, std::fabs(f - static_cast<double>(i) / n));
    }
    return ks;
}

double majority_frequency(const Dataset& records) {
    if (records.empty()) throw DegenerateData("majority_frequency: empty dataset");
    std::size_t hits = 0;
    for (const auto& r : records) hits += r.hit() ? 1 : 0;
    const double hit_rate = static_cast<double>(hits) / static_cast<double>(records.size());
    return std::max(hit_rate, 1.0 - hit_rate);
}

EvalReport evaluate(const HitModel& model, const Dataset& test, double w_m, int n_bins) {
    EvalReport rep;
    rep.n = test.size();
    rep.w_m = w_m;
    std::vector<double> scores(test.size());
    std::vector<int> labels(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        scores[i] = model.predict(test[i].delta_norm, test[i].features);
        labels[i] = test[i].hit() ? 1 : 0;
    }
    rep.auc = auc_roc(scores, labels);
    const auto bs = balanced_brier(scores, labels, w_m);
    rep.bbs = bs.bbs;
    rep.bbss = bs.bbss;
    rep.calibration = calibration_bins(scores, labels, n_bins);

    // 64-point delta sweep over a subsample of test contexts
    std::vector<FeatureBundle> contexts;
    const std::size_t step = std::max<std::size_t>(1, test.size() / 200);
    for (std::size_t i = 0; i < test.size(); i += step) contexts.push_back(test[i].features);
    double lo = 1e300, hi = -1e300;
    for (const auto& r : test) {
        lo = std::min(lo, r.delta_norm);
        hi = std::max(hi, r.delta_norm);
    }
    std::vector<double> grid(64);
    for (int i = 0; i < 64; ++i) grid[i] = lo + (hi - lo) * i / 63.0;
    const auto mono = monotonicity_audit(model, contexts, grid);
    rep.monotonicity_violations = mono.violations;
    rep.worst_jump = mono.worst_jump;
    return rep;
}

} // namespace rfq
