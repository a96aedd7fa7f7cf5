// rfqlab command line: every capability as a subcommand with file-based,
// reproducible inputs and outputs. All randomness flows from one 64-bit
// seed; --seed overrides the config seed. Exit codes: 0 ok, 1 invalid
// config, 2 partial failure, 3 numerical failure (diagnostics written).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>

#include "CLI11.hpp"

#include "rfqlab/axe.hpp"
#include "rfqlab/causal.hpp"
#include "rfqlab/config_bindings.hpp"
#include "rfqlab/metrics.hpp"
#include "rfqlab/model_io.hpp"
#include "rfqlab/parallel.hpp"
#include "rfqlab/pipeline.hpp"

namespace fs = std::filesystem;
using namespace rfq;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed_override;
    int threads = 0;
    bool verbose = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
    auto* c = cmd->add_option("-c,--config", args.config_path,
                              "config file (key = value with [sections])");
    if (config_required) c->required();
    const char* root = std::getenv("RFQLAB_OUTPUT_ROOT");
    args.out_dir = root ? root : ".";
    cmd->add_option("-o,--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed_override, "seed override (wins over the config seed)");
    cmd->add_option("--threads", args.threads, "cap worker threads (default: machine parallelism)");
    cmd->add_flag("-v,--verbose", args.verbose, "chatty progress output");
}

Config load_config(const CommonArgs& args) {
    if (args.config_path.empty()) return Config::parse_string("");
    return Config::parse_file(args.config_path);
}

void prepare(const CommonArgs& args) {
    if (args.threads > 0) set_max_threads(args.threads);
    fs::create_directories(args.out_dir);
}

std::string out_path(const CommonArgs& args, const std::string& name) {
    return (fs::path(args.out_dir) / name).string();
}

std::unique_ptr<HitModel> model_from_options(const Config& cfg, const std::string& model_file) {
    if (!model_file.empty()) return load_model(model_file).model;
    const std::string kind = cfg.get_string("model.kind", "");
    if (kind == "exponential")
        return std::make_unique<ExponentialSpreadModel>(cfg.get_double("model.p0", 1.0),
                                                        cfg.get_double("model.alpha", 2.0));
    throw InvalidConfig("no model: pass --model CARD or set model.kind = exponential");
}

int cmd_simulate(const CommonArgs& args) {
    prepare(args);
    auto scenario = scenario_from_config(load_config(args));
    if (args.seed_override) scenario.seed = *args.seed_override;
    const auto ds = simulate(scenario);
    write_csv(ds.records, out_path(args, "dataset.csv"));
    write_latents_csv(ds, out_path(args, "latents.csv"));
    if (scenario.candidate_mode) write_candidates_csv(ds, out_path(args, "candidates.csv"));
    std::size_t hits = 0;
    for (const auto& r : ds.records) hits += r.hit() ? 1 : 0;
    std::printf("simulate: %zu records (%zu hits) -> %s\n", ds.records.size(), hits,
                out_path(args, "dataset.csv").c_str());
    return 0;
}

int cmd_fit_generative(const CommonArgs& args, const std::string& data_file) {
    prepare(args);
    const Config cfg = load_config(args);
    const Dataset data = read_csv(data_file);
    FitOptions opt;
    opt.likelihood.pd_off = cfg.get_bool("generative.pd_off", true);
    opt.likelihood.ia_off = cfg.get_bool("generative.ia_off", true);
    opt.likelihood.class_weight = cfg.get_bool("generative.class_weight", false);
    opt.restarts = static_cast<int>(cfg.get_int("generative.restarts", 3));
    opt.compute_std_errors = cfg.get_bool("generative.std_errors", false);
    opt.seed = args.seed_override.value_or(
        static_cast<std::uint64_t>(cfg.get_int("generative.seed", 17)));
    GenerativeParams init;
    init.reservation.intercept = cfg.get_double("generative.init_res_intercept", 1.0);
    init.reservation_sd = cfg.get_double("generative.init_res_sd", 1.0);
    init.dealer_sep.location = cfg.get_double("generative.init_sep_location", 1.0);
    init.dealer_sep.scale = cfg.get_double("generative.init_sep_scale", 1.0);
    init.dealer_sep.shape = cfg.get_double("generative.init_sep_shape", 2.0);
    init.dealer_sep.asym = cfg.get_double("generative.init_sep_asym", 1.0);
    init.p_quote = cfg.get_double("generative.init_p_quote", 0.5);
    const auto report = fit_generative(data, init, opt);
    save_generative(report, opt.likelihood.pd_off, opt.likelihood.ia_off, opt.seed,
                    dataset_hash(data), out_path(args, "generative.json"));
    std::printf("fit-generative: ll=%.6g converged=%d iterations=%d -> %s\n",
                report.log_likelihood, report.converged ? 1 : 0, report.iterations,
                out_path(args, "generative.json").c_str());
    return report.converged ? 0 : 3;
}

int cmd_fit_lr(const CommonArgs& args, const std::string& data_file) {
    prepare(args);
    const Config cfg = load_config(args);
    const Dataset data = read_csv(data_file);
    LogisticOptions opt;
    opt.c = cfg.get_double("logistic.c", 100.0);
    opt.class_weight = cfg.get_bool("logistic.class_weight", true);
    const auto model = fit_logistic(data, opt);
    save_logistic(model, args.seed_override.value_or(1), dataset_hash(data),
                  out_path(args, "logistic.json"));
    std::printf("fit-lr: C=%g spread_weight=%.6g converged=%d -> %s\n", opt.c,
                model.spread_weight(), model.converged ? 1 : 0,
                out_path(args, "logistic.json").c_str());
    return model.converged ? 0 : 3;
}

int cmd_fit_gbdt(const CommonArgs& args, const std::string& data_file) {
    prepare(args);
    const Config cfg = load_config(args);
    const Dataset data = read_csv(data_file);
    GbdtHyperparams hp;
    hp.n_estimators = static_cast<int>(cfg.get_int("gbdt.n_estimators", 500));
    hp.learning_rate = cfg.get_double("gbdt.learning_rate", 0.01);
    hp.num_leaves = static_cast<int>(cfg.get_int("gbdt.num_leaves", 15));
    hp.min_child_samples = static_cast<int>(cfg.get_int("gbdt.min_child_samples", 50));
    hp.subsample = cfg.get_double("gbdt.subsample", 0.6);
    hp.colsample_bytree = cfg.get_double("gbdt.colsample_bytree", 1.0);
    hp.class_weight = cfg.get_bool("gbdt.class_weight", true);
    const std::uint64_t seed =
        args.seed_override.value_or(static_cast<std::uint64_t>(cfg.get_int("gbdt.seed", 1)));
    const auto model = fit_gbdt(data, hp, seed);
    save_gbdt(model, seed, dataset_hash(data), out_path(args, "gbdt.json"));
    std::printf("fit-gbdt: %zu trees -> %s\n", model.trees.size(),
                out_path(args, "gbdt.json").c_str());
    return 0;
}

int cmd_evaluate(const CommonArgs& args, const std::string& data_file,
                 const std::string& model_file, const std::string& train_file) {
    prepare(args);
    const Config cfg = load_config(args);
    const Dataset data = read_csv(data_file);
    const auto loaded = model_from_options(cfg, model_file);
    double w_m;
    if (!train_file.empty()) w_m = majority_frequency(read_csv(train_file));
    else if (cfg.has("evaluate.w_m")) w_m = cfg.get_double("evaluate.w_m");
    else w_m = majority_frequency(data);
    const auto rep =
        evaluate(*loaded, data, w_m, static_cast<int>(cfg.get_int("evaluate.bins", 10)));
    std::ofstream out(out_path(args, "evaluation.csv"));
    out << "auc,bbss,bbs,monotonicity_violations,worst_jump,n,w_m\n";
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%zu,%.17g,%zu,%.17g\n", rep.auc, rep.bbss,
                  rep.bbs, rep.monotonicity_violations, rep.worst_jump, rep.n, rep.w_m);
    out << buf;
    write_roc_files(*loaded, data, args.out_dir, "model");
    std::printf("evaluate: auc=%.6g bbss=%.6g violations=%zu -> %s\n", rep.auc, rep.bbss,
                rep.monotonicity_violations, out_path(args, "evaluation.csv").c_str());
    return 0;
}

int cmd_price(const CommonArgs& args, const std::string& model_file) {
    prepare(args);
    const Config cfg = load_config(args);
    const auto problem = pricing_from_config(cfg);
    const auto model = model_from_options(cfg, model_file);
    PricingSolution sol;
    double ia_part = 0.0;
    switch (problem.objective) {
        case PricingObjective::InstantaneousFlow:
            sol = optimal_spread_flow(*model, problem);
            break;
        case PricingObjective::ExpUtility:
            sol = optimal_spread_exp_utility(*model, problem);
            break;
        case PricingObjective::EndOfDayUtility:
            sol = optimal_spread_eod(*model, problem);
            break;
        case PricingObjective::EndOfDayUtilityIA:
            sol = optimal_spread_eod(*model, problem);
            ia_part = ia_spread_correction(problem);
            break;
    }
    const double total = sol.delta_opt + ia_part;
    std::ofstream out(out_path(args, "price.csv"));
    char buf[256];
    out << "delta_opt,ia_correction,total,residual,objective_value,monotonicity_warning\n";
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", sol.delta_opt, ia_part,
                  total, sol.residual, sol.objective_value, sol.monotonicity_warning ? 1 : 0);
    out << buf;
    std::printf("price: delta_opt=%.6g ia_correction=%.6g total=%.6g -> %s\n", sol.delta_opt,
                ia_part, total, out_path(args, "price.csv").c_str());
    return 0;
}

int cmd_revenue(const CommonArgs& args, const std::string& model_file) {
    prepare(args);
    const Config cfg = load_config(args);
    const auto query = revenue_query_from_config(cfg);
    const double on_hit = prob_revenue_positive_on_hit(query);
    double potential = -1.0;
    if (!model_file.empty() || cfg.has("model.kind")) {
        const auto model = model_from_options(cfg, model_file);
        potential = revenue_potential(query, *model, context_from_config(cfg, "context"));
    }
    std::ofstream out(out_path(args, "revenue.csv"));
    out << "prob_positive_on_hit,revenue_potential\n";
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", on_hit, potential);
    out << buf;
    std::printf("revenue: P(R>0|hit)=%.6g potential=%.6g -> %s\n", on_hit, potential,
                out_path(args, "revenue.csv").c_str());
    return 0;
}

std::vector<CandidateRow> read_candidates_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw CsvError("empty candidates file");
    std::vector<CandidateRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        CandidateRow r;
        unsigned long long row = 0;
        int cc = 0, bc = 0, axe = 0, call = 0, rfq = 0;
        if (std::sscanf(line.c_str(), "%llu,%d,%d,%d,%d,%d", &row, &cc, &bc, &axe, &call,
                        &rfq) != 6)
            throw CsvError("bad candidates row: " + line);
        r.row = row;
        r.client_cell = cc;
        r.bond_cell = bc;
        r.axe = axe != 0;
        r.call = call != 0;
        r.occurred = rfq != 0;
        rows.push_back(r);
    }
    return rows;
}

int cmd_axe_match(const CommonArgs& args, const std::string& candidates_file,
                  const std::string& data_file, const std::string& model_file) {
    prepare(args);
    const Config cfg = load_config(args);
    const auto candidates = read_candidates_csv(candidates_file);
    const Dataset records = read_csv(data_file);
    const auto model = model_from_options(cfg, model_file);

    // occurred candidates align 1:1 with dataset rows, in order
    std::map<std::pair<int, int>, std::vector<FeatureBundle>> cell_contexts;
    std::size_t rec = 0;
    for (const auto& c : candidates) {
        if (!c.occurred) continue;
        if (rec >= records.size()) throw InvalidConfig("candidates and dataset do not align");
        cell_contexts[{c.client_cell, c.bond_cell}].push_back(records[rec].features);
        ++rec;
    }
    UpliftOptions uopt;
    uopt.smoothing = cfg.get_double("axe.smoothing", 1.0);
    uopt.min_cell_count = static_cast<std::size_t>(cfg.get_int("axe.min_cell_count", 30));
    const bool fixed_delta = cfg.has("axe.delta_star");

    std::vector<AxeQuery> queries;
    for (auto& [cell, contexts] : cell_contexts) {
        AxeQuery q;
        q.client_cell = cell.first;
        q.bond_cell = cell.second;
        q.rf_samples = contexts;
        if (fixed_delta) {
            q.delta_star = cfg.get_double("axe.delta_star");
        } else {
            PricingProblem prob; // axe-conditioned flow-value spread at the cell
            prob.context = contexts.front();
            q.delta_star = optimal_spread_flow(*model, prob).delta_opt;
        }
        queries.push_back(std::move(q));
    }
    const auto ranked = rank_axe_matches(candidates, queries, *model, uopt);
    write_axe_report_csv(ranked, out_path(args, "axe_matches.csv"));
    std::printf("axe-match: %zu cells ranked -> %s\n", ranked.size(),
                out_path(args, "axe_matches.csv").c_str());
    return 0;
}

int cmd_causal_audit(const CommonArgs& args) {
    prepare(args);
    const Config cfg = load_config(args);
    auto scenario = scenario_from_config(cfg);
    if (args.seed_override) scenario.seed = *args.seed_override;
    AuditOptions opt;
    opt.naive_bins = static_cast<int>(cfg.get_int("audit.bins", 32));
    opt.n_observational = static_cast<std::size_t>(cfg.get_int("audit.n_observational", 100000));
    opt.n_interventional = static_cast<std::size_t>(cfg.get_int("audit.n_interventional", 100000));
    auto grid = cfg.get_doubles("audit.grid", {});
    if (grid.empty()) throw InvalidConfig("audit.grid is required");

    // adjusted estimator and the drop-sigma negative control, both fitted on
    // observational data from the scenario
    ScenarioConfig obs = scenario;
    obs.n_rfqs = opt.n_observational;
    const Dataset data = simulate(obs).records;
    FitOptions fopt;
    fopt.restarts = static_cast<int>(cfg.get_int("audit.restarts", 3));
    GenerativeParams init;
    init.reservation.intercept = 1.0;
    init.reservation_sd = 1.0;
    init.dealer_sep = SepParams{1.0, 1.0, 2.0, 1.0};
    init.p_quote = 0.5;
    const auto fit_full = fit_generative(data, init, fopt);
    const GenerativePredictor adjusted(fit_full.params);

    Dataset no_sigma = data;
    for (auto& r : no_sigma) r.features.volatility = 1.0; // conditioning set minus sigma
    const auto fit_ctrl = fit_generative(no_sigma, init, fopt);
    const GenerativePredictor control(fit_ctrl.params);

    const auto report = causal_audit(
        scenario, grid, {{"adjusted", &adjusted}, {"no_sigma_control", &control}}, opt);
    write_audit_csv(report, out_path(args, "causal_audit.csv"));
    double worst_naive = 0.0, worst_adj = 0.0;
    for (const auto& pt : report.points) {
        worst_naive = std::max(worst_naive, std::fabs(pt.naive - pt.truth));
        worst_adj = std::max(worst_adj, std::fabs(pt.adjusted[0] - pt.truth));
    }
    std::printf("causal-audit: worst naive bias %.6g, worst adjusted bias %.6g -> %s\n",
                worst_naive, worst_adj, out_path(args, "causal_audit.csv").c_str());
    return 0;
}

int cmd_experiment(const CommonArgs& args, const std::string& data_file) {
    prepare(args);
    const Config cfg = load_config(args);
    auto spec = experiment_from_config(cfg);
    if (args.seed_override) spec.seed = *args.seed_override;
    Dataset data;
    if (!data_file.empty()) {
        data = read_csv(data_file);
    } else {
        auto scenario = scenario_from_config(cfg);
        if (args.seed_override) scenario.seed = *args.seed_override;
        data = simulate(scenario).records;
    }
    const auto report = run_experiment(data, spec);
    write_experiment_report(report, spec, args.out_dir);
    const auto parts = split(data, spec.fractions, spec.seed);
    for (const auto& o : report.outcomes)
        if (!o.failed) write_roc_files(*o.model, parts.test, args.out_dir, o.kind);
    for (const auto& o : report.outcomes) {
        if (o.failed)
            std::printf("experiment: %s FAILED (%s)\n", o.kind.c_str(), o.error.c_str());
        else
            std::printf("experiment: %-10s auc=%.6g bbss=%.6g violations=%zu\n", o.kind.c_str(),
                        o.test_report.auc, o.test_report.bbss,
                        o.test_report.monotonicity_violations);
    }
    std::printf("experiment: reports under %s\n", args.out_dir.c_str());
    return report.any_failed() ? 2 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rfqlab: RfQ market simulation, estimation and decision toolkit"};
    app.require_subcommand(1);

    CommonArgs sim_args, fitg_args, fitlr_args, fitgb_args, eval_args, price_args, rev_args,
        axe_args, audit_args, exp_args;
    std::string data_file, model_file, train_file, candidates_file;

    auto* sim = app.add_subcommand("simulate", "sample a synthetic RfQ market");
    add_common(sim, sim_args);

    auto* fitg = app.add_subcommand("fit-generative", "maximum-likelihood generative fit");
    add_common(fitg, fitg_args, false);
    fitg->add_option("--data", data_file, "records CSV")->required();

    auto* fitlr = app.add_subcommand("fit-lr", "L2 logistic regression");
    add_common(fitlr, fitlr_args, false);
    fitlr->add_option("--data", data_file, "records CSV")->required();

    auto* fitgb = app.add_subcommand("fit-gbdt", "gradient-boosted trees");
    add_common(fitgb, fitgb_args, false);
    fitgb->add_option("--data", data_file, "records CSV")->required();

    auto* ev = app.add_subcommand("evaluate", "score a fitted model on a dataset");
    add_common(ev, eval_args, false);
    ev->add_option("--data", data_file, "records CSV")->required();
    ev->add_option("--model", model_file, "model card JSON");
    ev->add_option("--train", train_file, "training CSV for w_m");

    auto* pr = app.add_subcommand("price", "optimal spread for a pricing problem");
    add_common(pr, price_args);
    pr->add_option("--model", model_file, "model card JSON");

    auto* rv = app.add_subcommand("revenue", "revenue-potential probabilities");
    add_common(rv, rev_args);
    rv->add_option("--model", model_file, "model card JSON");

    auto* ax = app.add_subcommand("axe-match", "rank (client, bond) cells by ACE");
    add_common(ax, axe_args, false);
    ax->add_option("--candidates", candidates_file, "candidates CSV")->required();
    ax->add_option("--data", data_file, "records CSV aligned with the candidates")->required();
    ax->add_option("--model", model_file, "model card JSON");

    auto* au = app.add_subcommand("causal-audit", "naive vs adjusted vs interventional truth");
    add_common(au, audit_args);

    auto* ex = app.add_subcommand("experiment", "split / train / select / evaluate");
    add_common(ex, exp_args);
    ex->add_option("--data", data_file, "records CSV (otherwise simulated from [scenario])");

    CLI11_PARSE(app, argc, argv);

    const CommonArgs* common = nullptr;
    try {
        if (sim->parsed()) return cmd_simulate(*(common = &sim_args));
        if (fitg->parsed()) return cmd_fit_generative(*(common = &fitg_args), data_file);
        if (fitlr->parsed()) return cmd_fit_lr(*(common = &fitlr_args), data_file);
        if (fitgb->parsed()) return cmd_fit_gbdt(*(common = &fitgb_args), data_file);
        if (ev->parsed())
            return cmd_evaluate(*(common = &eval_args), data_file, model_file, train_file);
        if (pr->parsed()) return cmd_price(*(common = &price_args), model_file);
        if (rv->parsed()) return cmd_revenue(*(common = &rev_args), model_file);
        if (ax->parsed())
            return cmd_axe_match(*(common = &axe_args), candidates_file, data_file, model_file);
        if (au->parsed()) return cmd_causal_audit(*(common = &audit_args));
        if (ex->parsed()) return cmd_experiment(*(common = &exp_args), data_file);
    } catch (const InvalidConfig& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 1;
    } catch (const CsvError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        try {
            if (common) {
                std::ofstream diag(fs::path(common->out_dir) / "diagnostics.txt");
                diag << e.what() << "\n";
            }
        } catch (...) {
        }
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
