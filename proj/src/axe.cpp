#include "rfqlab/axe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace rfq {

namespace {

struct ArmCounts {
    double n = 0.0, k = 0.0;
};

// smoothed Bernoulli estimate with its standard error
void fill_arm(const ArmCounts& c, double alpha, double& p, double& se) {
    p = (c.k + alpha) / (c.n + 2.0 * alpha);
    se = std::sqrt(p * (1.0 - p) / (c.n + 2.0 * alpha));
}

} // namespace

UpliftEstimate uplift(const std::vector<CandidateRow>& rows, int client_cell, int bond_cell,
                      const UpliftOptions& options) {
    ArmCounts call, nocall;
    for (const auto& r : rows) {
        if (!r.axe || r.client_cell != client_cell || r.bond_cell != bond_cell) continue;
        ArmCounts& arm = r.call ? call : nocall;
        arm.n += 1.0;
        arm.k += r.occurred ? 1.0 : 0.0;
    }
    UpliftEstimate est;
    fill_arm(call, options.smoothing, est.p_rfq_given_call, est.se_call);
    fill_arm(nocall, options.smoothing, est.p_rfq_given_nocall, est.se_nocall);
    est.uplift = est.p_rfq_given_call - est.p_rfq_given_nocall;
    est.se_uplift = std::sqrt(est.se_call * est.se_call + est.se_nocall * est.se_nocall);
    est.insufficient_data = call.n < static_cast<double>(options.min_cell_count) ||
                            nocall.n < static_cast<double>(options.min_cell_count);
    return est;
}

UpliftEstimate axe_ace(const std::vector<CandidateRow>& rows, const AxeQuery& query,
                       const HitModel& hit_model, const UpliftOptions& options) {
    if (query.rf_samples.empty()) throw InvalidParams("axe_ace: rf_distribution is empty");
    UpliftEstimate est = uplift(rows, query.client_cell, query.bond_cell, options);
    double sum = 0.0;
    for (const auto& ctx : query.rf_samples) sum += hit_model.predict(query.delta_star, ctx);
    est.on_call_hit_prob = sum / static_cast<double>(query.rf_samples.size());
    est.hit_term_set = true;
    est.ace = est.on_call_hit_prob * est.uplift;
    est.ace_se = est.on_call_hit_prob * est.se_uplift;
    return est;
}

double rfq_preference(const std::vector<CandidateRow>& rows, int client_cell, int bond_cell,
                      double smoothing) {
    if (rows.empty()) throw DegenerateData("rfq_preference: empty candidate table");
    ArmCounts cell;
    for (const auto& r : rows) {
        if (r.client_cell != client_cell || r.bond_cell != bond_cell) continue;
        cell.n += 1.0;
        cell.k += r.occurred ? 1.0 : 0.0;
    }
    double p, se;
    fill_arm(cell, smoothing, p, se);
    return p;
}

BayesFactors bayes_factors(const std::vector<CandidateRow>& rows, double smoothing) {
    ArmCounts call_by[2][2]; // [axe][rfq] -> call counts
    ArmCounts axe_by[2];     // [rfq] -> axe counts
    for (const auto& r : rows) {
        const int a = r.axe ? 1 : 0;
        const int q = r.occurred ? 1 : 0;
        call_by[a][q].n += 1.0;
        call_by[a][q].k += r.call ? 1.0 : 0.0;
        axe_by[q].n += 1.0;
        axe_by[q].k += a;
    }
    BayesFactors f;
    double se;
    for (int a = 0; a < 2; ++a)
        for (int q = 0; q < 2; ++q) fill_arm(call_by[a][q], smoothing, f.p_call_given_axe_rfq[a][q], se);
    for (int q = 0; q < 2; ++q) fill_arm(axe_by[q], smoothing, f.p_axe_given_rfq[q], se);
    return f;
}

std::vector<AxeMatchRow> rank_axe_matches(const std::vector<CandidateRow>& rows,
                                          const std::vector<AxeQuery>& queries,
                                          const HitModel& hit_model,
                                          const UpliftOptions& options) {
    std::vector<AxeMatchRow> out;
    for (const auto& q : queries) {
        const auto est = axe_ace(rows, q, hit_model, options);
        out.push_back({q.client_cell, q.bond_cell, est.on_call_hit_prob, est.uplift, est.ace,
                       est.ace_se});
    }
    std::sort(out.begin(), out.end(), [](const AxeMatchRow& a, const AxeMatchRow& b) {
        if (a.ace != b.ace) return a.ace > b.ace;
        if (a.on_call_hit_prob != b.on_call_hit_prob) return a.on_call_hit_prob > b.on_call_hit_prob;
        return std::pair{a.client_cell, a.bond_cell} < std::pair{b.client_cell, b.bond_cell};
    });
    return out;
}

void write_axe_report_csv(const std::vector<AxeMatchRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot open " + path + " for writing");
    out << "client,bond,on_call_hit_prob,uplift,ace,stderr\n";
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& r : rows)
        out << r.client_cell << ',' << r.bond_cell << ',' << fmt(r.on_call_hit_prob) << ','
            << fmt(r.uplift) << ',' << fmt(r.ace) << ',' << fmt(r.stderr_ace) << '\n';
}

} // namespace rfq
