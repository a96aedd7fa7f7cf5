#include "rfqlab/config_bindings.hpp"

namespace rfq {

namespace {

LinearModel linear_from(const Config& cfg, const std::string& prefix) {
    LinearModel m;
    m.intercept = cfg.get_double(prefix + ".intercept", 0.0);
    m.sigma_coef = cfg.get_double(prefix + ".sigma", 0.0);
    m.client = cfg.get_doubles(prefix + ".client", {});
    m.bond = cfg.get_doubles(prefix + ".bond", {});
    m.rfq = cfg.get_doubles(prefix + ".rfq", {});
    m.ia_shift = cfg.get_double(prefix + ".ia_shift", 0.0);
    return m;
}

LogitModel logit_from(const Config& cfg, const std::string& prefix) {
    LogitModel m;
    m.intercept = cfg.get_double(prefix + ".intercept", 30.0); // default: probability ~ 0
    m.client = cfg.get_doubles(prefix + ".client", {});
    m.bond = cfg.get_doubles(prefix + ".bond", {});
    return m;
}

} // namespace

ScenarioConfig scenario_from_config(const Config& cfg) {
    ScenarioConfig sc;
    sc.n_rfqs = static_cast<std::size_t>(cfg.get_int("scenario.n_rfqs", 1000));
    sc.seed = static_cast<std::uint64_t>(cfg.get_int("scenario.seed", 1));
    if (cfg.has("scenario.force_pd")) sc.force_pd = static_cast<int>(cfg.get_int("scenario.force_pd"));
    if (cfg.has("scenario.force_ia")) sc.force_ia = static_cast<int>(cfg.get_int("scenario.force_ia"));
    sc.candidate_mode = cfg.get_bool("scenario.candidate_mode", false);
    sc.dt = cfg.get_double("scenario.dt", 0.1);
    sc.cells.n_client_cells = static_cast<int>(cfg.get_int("scenario.client_cells", 0));
    sc.cells.n_bond_cells = static_cast<int>(cfg.get_int("scenario.bond_cells", 0));

    FeatureSampler& fs = sc.sampler;
    fs.n_client = static_cast<std::size_t>(cfg.get_int("sampler.n_client", 2));
    fs.client_mean = cfg.get_doubles("sampler.client_mean", {});
    fs.client_sd = cfg.get_doubles("sampler.client_sd", {});
    fs.bond_mean = cfg.get_doubles("sampler.bond_mean", {});
    fs.bond_sd = cfg.get_doubles("sampler.bond_sd", {});
    fs.sigma_log_mean = cfg.get_double("sampler.sigma_log_mean", -0.3);
    fs.sigma_log_sd = cfg.get_double("sampler.sigma_log_sd", 0.25);
    fs.volume_log_mean = cfg.get_double("sampler.volume_log_mean", 0.0);
    fs.volume_log_sd = cfg.get_double("sampler.volume_log_sd", 0.5);
    fs.n_min = static_cast<int>(cfg.get_int("sampler.n_min", 1));
    fs.n_max = static_cast<int>(cfg.get_int("sampler.n_max", 6));
    fs.axe_prob = cfg.get_double("sampler.axe_prob", 0.3);
    fs.p_sell = cfg.get_double("sampler.p_sell", 0.5);

    GenerativeParams& p = sc.params;
    p.reservation = linear_from(cfg, "reservation");
    p.reservation_sd = cfg.get_double("reservation.sd", 0.3);
    p.dealer_sep.location = cfg.get_double("sep.location", 1.0);
    p.dealer_sep.scale = cfg.get_double("sep.scale", 0.5);
    p.dealer_sep.shape = cfg.get_double("sep.shape", 2.0);
    p.dealer_sep.asym = cfg.get_double("sep.asym", 1.0);
    p.dealer_shift = linear_from(cfg, "dealer_shift");
    p.dealer_shift.intercept = 0.0;
    p.pd_model = logit_from(cfg, "pd_logit");
    p.ia_model = logit_from(cfg, "ia_logit");
    p.p_quote = cfg.get_double("params.p_quote", 0.7);
    p.drift = cfg.get_double("params.drift", 0.0);
    p.horizon = cfg.get_double("params.horizon", 1.0);
    p.tie_break = cfg.get_double("params.tie_break", 1.0);
    p.call_prob[0] = cfg.get_double("params.call_prob_noaxe", 0.3);
    p.call_prob[1] = cfg.get_double("params.call_prob_axe", 0.6);
    p.intensity.base = cfg.get_double("intensity.base", 1.0);
    p.intensity.client = cfg.get_doubles("intensity.client", {});
    p.intensity.bond = cfg.get_doubles("intensity.bond", {});
    p.intensity.rfq = cfg.get_doubles("intensity.rfq", {});
    p.intensity.pd = cfg.get_double("intensity.pd", 0.0);
    p.intensity.ia = cfg.get_double("intensity.ia", 0.0);
    p.intensity.call = cfg.get_double("intensity.call", 0.0);
    p.intensity.axe = cfg.get_double("intensity.axe", 0.0);

    const std::string mode = cfg.get_string("policy.mode", "historical");
    if (mode == "historical") {
        sc.policy.mode = DealerPolicy::Mode::Historical;
    } else if (mode == "intervention") {
        sc.policy.mode = DealerPolicy::Mode::Intervention;
    } else {
        throw InvalidConfig("policy.mode must be historical or intervention");
    }
    sc.policy.g0 = cfg.get_double("policy.g0", 1.0);
    sc.policy.g1_sigma = cfg.get_double("policy.g1_sigma", 0.0);
    sc.policy.g3_axe = cfg.get_double("policy.g3_axe", 0.0);
    sc.policy.bond_weights = cfg.get_doubles("policy.bond_weights", {});
    sc.policy.noise_sd = cfg.get_double("policy.noise_sd", 0.3);
    sc.policy.grid = cfg.get_doubles("policy.grid", {1.0});
    if (cfg.has("call_policy.forced"))
        sc.call_policy.forced = static_cast<int>(cfg.get_int("call_policy.forced"));
    return sc;
}

ExperimentSpec experiment_from_config(const Config& cfg) {
    ExperimentSpec spec;
    spec.fractions.train = cfg.get_double("split.train", 0.6);
    spec.fractions.validation = cfg.get_double("split.validation", 0.2);
    spec.fractions.test = cfg.get_double("split.test", 0.2);
    spec.seed = static_cast<std::uint64_t>(cfg.get_int("experiment.seed", 1));
    spec.winsorize = cfg.get_bool("experiment.winsorize", true);
    spec.calibration_bins = static_cast<int>(cfg.get_int("experiment.calibration_bins", 10));
    const bool class_weight = cfg.get_bool("experiment.class_weight", true);

    std::string roster = cfg.get_string("experiment.roster", "majority,logistic,gbdt,generative");
    std::size_t pos = 0;
    while (pos != std::string::npos) {
        const auto comma = roster.find(',', pos);
        std::string kind = roster.substr(pos, comma == std::string::npos ? comma : comma - pos);
        pos = comma == std::string::npos ? comma : comma + 1;
        kind.erase(0, kind.find_first_not_of(" \t"));
        kind.erase(kind.find_last_not_of(" \t") + 1);
        if (kind.empty()) continue;
        RosterEntry entry;
        entry.kind = kind;
        entry.class_weight = class_weight;
        if (kind == "logistic") entry.c_grid = cfg.get_doubles("logistic.c_grid", {100.0});
        if (kind == "gbdt") {
            GbdtHyperparams hp;
            hp.n_estimators = static_cast<int>(cfg.get_int("gbdt.n_estimators", 500));
            hp.learning_rate = cfg.get_double("gbdt.learning_rate", 0.01);
            hp.num_leaves = static_cast<int>(cfg.get_int("gbdt.num_leaves", 15));
            hp.min_child_samples = static_cast<int>(cfg.get_int("gbdt.min_child_samples", 50));
            hp.subsample = cfg.get_double("gbdt.subsample", 0.6);
            hp.colsample_bytree = cfg.get_double("gbdt.colsample_bytree", 1.0);
            entry.gbdt_grid = {hp};
        }
        if (kind == "generative") {
            FitOptions& fo = entry.generative_options;
            fo.likelihood.pd_off = cfg.get_bool("generative.pd_off", true);
            fo.likelihood.ia_off = cfg.get_bool("generative.ia_off", true);
            fo.restarts = static_cast<int>(cfg.get_int("generative.restarts", 3));
            fo.seed = spec.seed;
            GenerativeParams init;
            init.reservation.intercept = cfg.get_double("generative.init_res_intercept", 1.0);
            init.reservation_sd = cfg.get_double("generative.init_res_sd", 1.0);
            init.dealer_sep.location = cfg.get_double("generative.init_sep_location", 1.0);
            init.dealer_sep.scale = cfg.get_double("generative.init_sep_scale", 1.0);
            init.dealer_sep.shape = cfg.get_double("generative.init_sep_shape", 2.0);
            init.dealer_sep.asym = cfg.get_double("generative.init_sep_asym", 1.0);
            init.p_quote = cfg.get_double("generative.init_p_quote", 0.5);
            entry.generative_init = init;
        }
        spec.roster.push_back(std::move(entry));
    }
    return spec;
}

FeatureBundle context_from_config(const Config& cfg, const std::string& section) {
    FeatureBundle f;
    f.client = cfg.get_doubles(section + ".client", {});
    f.bond = cfg.get_doubles(section + ".bond", std::vector<double>(kBondFeatureCount, 0.0));
    const double n = cfg.get_double(section + ".n_dealers", 3.0);
    const double exposure = cfg.get_double(section + ".dv01_exposure", 0.0);
    f.rfq = {n, exposure};
    f.volatility = cfg.get_double(section + ".sigma", 0.5);
    f.validate();
    return f;
}

PricingProblem pricing_from_config(const Config& cfg) {
    PricingProblem p;
    const std::string objective = cfg.get_string("pricing.objective", "flow");
    if (objective == "flow") p.objective = PricingObjective::InstantaneousFlow;
    else if (objective == "exp_utility") p.objective = PricingObjective::ExpUtility;
    else if (objective == "eod") p.objective = PricingObjective::EndOfDayUtility;
    else if (objective == "eod_ia") p.objective = PricingObjective::EndOfDayUtilityIA;
    else throw InvalidConfig("pricing.objective must be flow|exp_utility|eod|eod_ia");
    p.gamma = cfg.get_double("pricing.gamma", 1.0);
    p.volume = cfg.get_double("pricing.volume", 1.0);
    p.side = cfg.get_int("pricing.side", 1) >= 0 ? Side::Sell : Side::Buy;
    p.inventory = cfg.get_double("pricing.inventory", 0.0);
    p.sigma = cfg.get_double("pricing.sigma", 0.0);
    p.horizon = cfg.get_double("pricing.horizon", 0.0);
    p.drift = cfg.get_double("pricing.drift", 0.0);
    p.p_ia = cfg.get_double("pricing.p_ia", 0.0);
    p.hit_multiplier = cfg.get_double("pricing.hit_multiplier", 1.0);
    if (cfg.has("context.sigma") || cfg.has("context.bond"))
        p.context = context_from_config(cfg, "context");
    return p;
}

RevenuePotentialQuery revenue_query_from_config(const Config& cfg) {
    RevenuePotentialQuery q;
    q.delta = cfg.get_double("revenue.delta", 0.0);
    q.side = cfg.get_int("revenue.side", 1) >= 0 ? Side::Sell : Side::Buy;
    q.sigma = cfg.get_double("revenue.sigma", 1.0);
    q.horizon = cfg.get_double("revenue.horizon", 1.0);
    q.drift = cfg.get_double("revenue.drift", 0.0);
    q.p_ia = cfg.get_double("revenue.p_ia", 0.0);
    return q;
}

} // namespace rfq
