#include "rfqlab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "rfqlab/model_io.hpp"
#include "rfqlab/rng.hpp"

namespace rfq {

void SplitFractions::validate() const {
    if (!(train > 0.0) || !(validation > 0.0) || !(test > 0.0))
        throw InvalidConfig("split fractions must be positive");
    if (std::fabs(train + validation + test - 1.0) > 1e-9)
        throw InvalidConfig("split fractions must sum to 1");
}

void ExperimentSpec::validate() const {
    fractions.validate();
    if (roster.empty()) throw InvalidConfig("experiment roster is empty");
    if (selection_metric != "auc") throw InvalidConfig("unsupported selection metric");
    for (const auto& r : roster)
        if (r.kind != "majority" && r.kind != "generative" && r.kind != "logistic" &&
            r.kind != "gbdt")
            throw InvalidConfig("unknown roster kind: " + r.kind);
}

SplitResult split(const Dataset& records, const SplitFractions& fractions, std::uint64_t seed) {
    fractions.validate();
    const std::size_t n = records.size();
    if (n < 3) throw TooFewRecords("split: need at least one record per split");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    bool timestamps_vary = false;
    for (std::size_t i = 1; i < n && !timestamps_vary; ++i)
        timestamps_vary = records[i].timestamp != records[0].timestamp;
    if (timestamps_vary) {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return records[a].timestamp < records[b].timestamp;
        });
    } else {
        RngStream rng(salt_seed(seed, 0x59117), 0);
        for (std::size_t i = n - 1; i > 0; --i)
            std::swap(idx[i], idx[rng.uniform_int(0, static_cast<int>(i))]);
    }
    const auto cut1 = static_cast<std::size_t>(std::floor(fractions.train * n));
    const auto cut2 =
        static_cast<std::size_t>(std::floor((fractions.train + fractions.validation) * n));
    if (cut1 == 0 || cut2 <= cut1 || cut2 >= n)
        throw TooFewRecords("split: fractions leave an empty split");
    SplitResult out;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = records[idx[i]];
        (i < cut1 ? out.train : i < cut2 ? out.validation : out.test).push_back(r);
    }
    return out;
}

Winsorizer Winsorizer::fit(const Dataset& train, double lo_q, double hi_q) {
    const auto m = DesignMatrix::build(train);
    const std::size_t d = m.layout.size();
    Winsorizer w;
    w.lo.assign(d, -1e300);
    w.hi.assign(d, 1e300);
    std::vector<double> col(m.n);
    for (std::size_t j = 1; j < d; ++j) { // column 0 is the quoted spread: untouched
        if (j == 7) continue;             // dealer count is categorical
        for (std::size_t i = 0; i < m.n; ++i) col[i] = m.row(i)[j];
        std::sort(col.begin(), col.end());
        const auto at = [&](double q) {
            const auto pos = static_cast<std::size_t>(q * (m.n - 1));
            return col[pos];
        };
        w.lo[j] = at(lo_q);
        w.hi[j] = at(hi_q);
    }
    return w;
}

Dataset Winsorizer::apply(const Dataset& records) const {
    if (lo.empty()) return records;
    Dataset out = records;
    const FeatureLayout layout = FeatureLayout::infer(records);
    for (auto& r : out) {
        auto row = layout.row(r.delta_norm, r.features);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] = std::clamp(row[j], lo[j], hi[j]);
        r.features.volatility = row[1];
        for (std::size_t k = 0; k < kBondFeatureCount; ++k) r.features.bond[k] = row[2 + k];
        r.features.rfq[1] = row[8];
        for (std::size_t k = 0; k < layout.n_client; ++k) r.features.client[k] = row[9 + k];
    }
    return out;
}

namespace {

double validation_auc(const HitModel& model, const Dataset& validation) {
    std::vector<double> scores(validation.size());
    std::vector<int> labels(validation.size());
    for (std::size_t i = 0; i < validation.size(); ++i) {
        scores[i] = model.predict(validation[i].delta_norm, validation[i].features);
        labels[i] = validation[i].hit() ? 1 : 0;
    }
    return auc_roc(scores, labels);
}

ModelOutcome fit_roster_entry(const RosterEntry& entry, const Dataset& train,
                              const Dataset& validation, std::uint64_t seed) {
    ModelOutcome out;
    out.kind = entry.kind;
    if (entry.kind == "majority") {
        double hits = 0.0;
        for (const auto& r : train) hits += r.hit() ? 1.0 : 0.0;
        out.model = std::make_shared<MajorityClassModel>(hits / train.size());
        out.selected = "base_rate";
        return out;
    }
    if (entry.kind == "logistic") {
        std::shared_ptr<HitModel> best;
        double best_auc = -1.0;
        double best_c = 0.0;
        for (double c : entry.c_grid) {
            LogisticOptions opt;
            opt.c = c;
            opt.class_weight = entry.class_weight;
            auto model = std::make_shared<LogisticModel>(fit_logistic(train, opt));
            const double auc = validation_auc(*model, validation);
            if (auc > best_auc) {
                best_auc = auc;
                best = std::move(model);
                best_c = c;
            }
        }
        out.model = std::move(best);
        out.validation_auc = best_auc;
        char buf[32];
        std::snprintf(buf, sizeof buf, "C=%g", best_c);
        out.selected = buf;
        return out;
    }
    if (entry.kind == "gbdt") {
        std::shared_ptr<HitModel> best;
        double best_auc = -1.0;
        std::string best_desc;
        for (const auto& hp : entry.gbdt_grid) {
            GbdtHyperparams h = hp;
            h.class_weight = entry.class_weight;
            auto model = std::make_shared<GbdtModel>(fit_gbdt(train, h, salt_seed(seed, 0x6bd7)));
            const double auc = validation_auc(*model, validation);
            if (auc > best_auc) {
                best_auc = auc;
                best = std::move(model);
                char buf[128];
                std::snprintf(buf, sizeof buf, "trees=%d leaves=%d lr=%g subsample=%g",
                              h.n_estimators, h.num_leaves, h.learning_rate, h.subsample);
                best_desc = buf;
            }
        }
        out.model = std::move(best);
        out.validation_auc = best_auc;
        out.selected = best_desc;
        return out;
    }
    // generative MLE; no hyperparameter grid
    FitOptions opt = entry.generative_options;
    opt.likelihood.class_weight = entry.class_weight;
    const auto report = fit_generative(train, entry.generative_init, opt);
    out.model = std::make_shared<GenerativePredictor>(report.params, opt.likelihood.pd_off,
                                                      opt.likelihood.ia_off);
    out.validation_auc = validation_auc(*out.model, validation);
    out.selected = report.converged ? "mle" : "mle_unconverged";
    return out;
}

} // namespace

ExperimentReport run_experiment(const Dataset& records, const ExperimentSpec& spec) {
    spec.validate();
    auto parts = split(records, spec.fractions, spec.seed);
    if (spec.winsorize) {
        const auto w = Winsorizer::fit(parts.train, spec.winsor_lo, spec.winsor_hi);
        parts.train = w.apply(parts.train);
        parts.validation = w.apply(parts.validation);
        parts.test = w.apply(parts.test);
    }

    ExperimentReport report;
    report.w_m = majority_frequency(parts.train);
    report.n_train = parts.train.size();
    report.n_validation = parts.validation.size();
    report.n_test = parts.test.size();
    report.train_hash = dataset_hash(parts.train);

    for (const auto& entry : spec.roster) {
        ModelOutcome outcome;
        try {
            outcome = fit_roster_entry(entry, parts.train, parts.validation, spec.seed);
            outcome.test_report =
                evaluate(*outcome.model, parts.test, report.w_m, spec.calibration_bins);
            if (entry.kind == "logistic")
                outcome.importance = feature_importance(*outcome.model, parts.validation,
                                                        ImportanceMethod::StdCoefficients);
            else if (entry.kind == "gbdt")
                outcome.importance =
                    feature_importance(*outcome.model, parts.validation, ImportanceMethod::Gain);
            else if (entry.kind == "generative")
                outcome.importance = feature_importance(
                    *outcome.model, parts.validation, ImportanceMethod::Permutation, spec.seed);
        } catch (const std::exception& e) {
            outcome.kind = entry.kind;
            outcome.failed = true;
            outcome.error = e.what();
        }
        report.outcomes.push_back(std::move(outcome));
    }
    return report;
}

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt6(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

struct RocPoint {
    double fpr, tpr;
};

std::vector<RocPoint> roc_points(const std::vector<double>& scores,
                                 const std::vector<int>& labels) {
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    double n_pos = 0.0, n_neg = 0.0;
    for (int y : labels) (y ? n_pos : n_neg) += 1.0;
    std::vector<RocPoint> pts = {{0.0, 0.0}};
    double tp = 0.0, fp = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        (labels[idx[k]] ? tp : fp) += 1.0;
        if (k + 1 < idx.size() && scores[idx[k + 1]] == scores[idx[k]]) continue;
        pts.push_back({fp / n_neg, tp / n_pos});
    }
    return pts;
}

void write_svg_curve(const std::string& path, const std::vector<double>& xs,
                     const std::vector<double>& ys, const std::string& title, bool diagonal) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot open " + path + " for writing");
    const int w = 480, h = 480, pad = 40;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << title << "</text>\n";
    auto px = [&](double x) { return pad + x * (w - 2 * pad); };
    auto py = [&](double y) { return h - pad - y * (h - 2 * pad); };
    out << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << w - 2 * pad
        << "\" height=\"" << h - 2 * pad << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (diagonal)
        out << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\""
            << py(1) << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) out << px(xs[i]) << ',' << py(ys[i]) << ' ';
    out << "\"/>\n</svg>\n";
}

} // namespace

void write_experiment_report(const ExperimentReport& report, const ExperimentSpec& spec,
                             const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "reports");
    fs::create_directories(fs::path(out_dir) / "models");
    fs::create_directories(fs::path(out_dir) / "figures");

    {
        std::ofstream out(fs::path(out_dir) / "reports" / "comparison.csv");
        out << "model,selected,auc,bbss,bbs,monotonicity_violations,validation_auc,failed\n";
        for (const auto& o : report.outcomes) {
            out << o.kind << ',' << o.selected << ',';
            if (o.failed) {
                out << ",,,,," << 1 << '\n';
                continue;
            }
            out << fmt(o.test_report.auc) << ',' << fmt(o.test_report.bbss) << ','
                << fmt(o.test_report.bbs) << ',' << o.test_report.monotonicity_violations << ','
                << fmt(o.validation_auc) << ",0\n";
        }
    }
    {
        std::ofstream out(fs::path(out_dir) / "reports" / "summary.txt");
        out << "rows train=" << report.n_train << " validation=" << report.n_validation
            << " test=" << report.n_test << "\n";
        out << "w_m (train majority frequency) = " << fmt6(report.w_m) << "\n";
        out << "train_hash = " << report.train_hash << "\n";
        out << "selection metric = " << spec.selection_metric << "\n";
        out << "calibration: " << spec.calibration_bins << " equal-width bins on [0,1]\n";
        for (const auto& o : report.outcomes) {
            out << o.kind << ": ";
            if (o.failed) {
                out << "FAILED (" << o.error << ")\n";
                continue;
            }
            out << "test auc " << fmt6(o.test_report.auc) << ", bbss "
                << fmt6(o.test_report.bbss) << ", selected " << o.selected << "\n";
        }
    }
    for (const auto& o : report.outcomes) {
        if (o.failed) continue;
        {
            std::ofstream out(fs::path(out_dir) / "reports" / ("importance_" + o.kind + ".csv"));
            out << "feature,value,rank\n";
            for (std::size_t j = 0; j < o.importance.names.size(); ++j)
                out << o.importance.names[j] << ',' << fmt(o.importance.values[j]) << ','
                    << o.importance.rank[j] << '\n';
        }
        {
            std::ofstream out(fs::path(out_dir) / "reports" / ("calibration_" + o.kind + ".csv"));
            out << "bin_mean_pred,bin_empirical,count\n";
            for (const auto& b : o.test_report.calibration)
                out << fmt(b.mean_pred) << ',' << fmt(b.empirical) << ',' << b.count << '\n';
            std::vector<double> xs, ys;
            for (const auto& b : o.test_report.calibration)
                if (b.count) {
                    xs.push_back(b.mean_pred);
                    ys.push_back(b.empirical);
                }
            write_svg_curve((fs::path(out_dir) / "figures" / ("calibration_" + o.kind + ".svg")).string(),
                            xs, ys, "calibration: " + o.kind, true);
        }
        // model card
        const std::string card = (fs::path(out_dir) / "models" / (o.kind + ".json")).string();
        if (const auto* gen = dynamic_cast<const GenerativePredictor*>(o.model.get())) {
            GenerativeFitReport rep;
            rep.params = gen->params();
            save_generative(rep, gen->pd_off(), gen->ia_off(), spec.seed, report.train_hash, card);
        } else if (const auto* lr = dynamic_cast<const LogisticModel*>(o.model.get())) {
            save_logistic(*lr, spec.seed, report.train_hash, card);
        } else if (const auto* gb = dynamic_cast<const GbdtModel*>(o.model.get())) {
            save_gbdt(*gb, spec.seed, report.train_hash, card);
        }
    }
}

// ROC figure emission needs scores recomputed; exposed through evaluate()'s
// caller instead -- see the CLI 'evaluate' and 'experiment' commands.
void write_roc_files(const HitModel& model, const Dataset& test, const std::string& out_dir,
                     const std::string& name) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "reports");
    fs::create_directories(fs::path(out_dir) / "figures");
    std::vector<double> scores(test.size());
    std::vector<int> labels(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        scores[i] = model.predict(test[i].delta_norm, test[i].features);
        labels[i] = test[i].hit() ? 1 : 0;
    }
    const auto pts = roc_points(scores, labels);
    std::ofstream out(fs::path(out_dir) / "reports" / ("roc_" + name + ".csv"));
    out << "fpr,tpr\n";
    std::vector<double> xs, ys;
    for (const auto& p : pts) {
        out << fmt(p.fpr) << ',' << fmt(p.tpr) << '\n';
        xs.push_back(p.fpr);
        ys.push_back(p.tpr);
    }
    write_svg_curve((fs::path(out_dir) / "figures" / ("roc_" + name + ".svg")).string(), xs, ys,
                    "ROC: " + name, true);
}

} // namespace rfq
