#include "rfqlab/model_io.hpp"

#include <cstring>
#include <fstream>

#include "json.hpp"

namespace rfq {

using nlohmann::json;

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t mix_double(std::uint64_t h, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    return fnv1a(h, &bits, 8);
}

json linear_to_json(const LinearModel& m) {
    return json{{"intercept", m.intercept}, {"sigma", m.sigma_coef},   {"client", m.client},
                {"bond", m.bond},           {"rfq", m.rfq},            {"ia_shift", m.ia_shift}};
}

LinearModel linear_from_json(const json& j) {
    LinearModel m;
    m.intercept = j.at("intercept");
    m.sigma_coef = j.at("sigma");
    m.client = j.at("client").get<std::vector<double>>();
    m.bond = j.at("bond").get<std::vector<double>>();
    m.rfq = j.at("rfq").get<std::vector<double>>();
    m.ia_shift = j.at("ia_shift");
    return m;
}

json logit_to_json(const LogitModel& m) {
    return json{{"intercept", m.intercept}, {"client", m.client}, {"bond", m.bond}};
}

LogitModel logit_from_json(const json& j) {
    LogitModel m;
    m.intercept = j.at("intercept");
    m.client = j.at("client").get<std::vector<double>>();
    m.bond = j.at("bond").get<std::vector<double>>();
    return m;
}

void write_card(const json& card, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot open " + path + " for writing");
    out << card.dump(2) << '\n';
}

json read_card(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path);
    json card;
    in >> card;
    if (card.value("version", -1) != kModelCardVersion)
        throw InvalidConfig("model card version mismatch in " + path);
    return card;
}

} // namespace

std::uint64_t dataset_hash(const Dataset& records) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& r : records) {
        h = mix_double(h, r.timestamp);
        h = mix_double(h, r.delta_norm);
        h = mix_double(h, r.volume);
        h = mix_double(h, r.features.volatility);
        for (double v : r.features.bond) h = mix_double(h, v);
        for (double v : r.features.rfq) h = mix_double(h, v);
        for (double v : r.features.client) h = mix_double(h, v);
        const int st = static_cast<int>(r.status);
        h = fnv1a(h, &st, sizeof st);
    }
    return h;
}

void save_generative(const GenerativeFitReport& report, bool pd_off, bool ia_off,
                     std::uint64_t seed, std::uint64_t data_hash, const std::string& path) {
    const GenerativeParams& p = report.params;
    json card;
    card["version"] = kModelCardVersion;
    card["kind"] = "generative";
    card["seed"] = seed;
    card["data_hash"] = data_hash;
    card["flags"] = {{"pd_off", pd_off}, {"ia_off", ia_off}};
    card["sep_parameterization"] =
        "two-piece skew exponential power: pdf ~ exp(-(asym|z|)^shape) left of the location, "
        "exp(-(z/asym)^shape) right, z = (x-loc)/scale, normalized via Gamma(1/shape)";
    card["fit"] = {{"log_likelihood", report.log_likelihood},
                   {"iterations", report.iterations},
                   {"converged", report.converged}};
    card["params"] = {
        {"reservation", linear_to_json(p.reservation)},
        {"reservation_sd", p.reservation_sd},
        {"sep", {{"location", p.dealer_sep.location},
                 {"scale", p.dealer_sep.scale},
                 {"shape", p.dealer_sep.shape},
                 {"asym", p.dealer_sep.asym}}},
        {"dealer_shift", linear_to_json(p.dealer_shift)},
        {"pd_logit", logit_to_json(p.pd_model)},
        {"ia_logit", logit_to_json(p.ia_model)},
        {"p_quote", p.p_quote},
        {"drift", p.drift},
        {"horizon", p.horizon},
        {"tie_break", p.tie_break},
    };
    if (report.standard_errors) card["standard_errors"] = *report.standard_errors;
    if (!report.parameter_names.empty()) card["parameter_names"] = report.parameter_names;
    write_card(card, path);
}

void save_logistic(const LogisticModel& model, std::uint64_t seed, std::uint64_t data_hash,
                   const std::string& path) {
    json card;
    card["version"] = kModelCardVersion;
    card["kind"] = "logistic";
    card["seed"] = seed;
    card["data_hash"] = data_hash;
    card["n_client"] = model.layout.n_client;
    card["weights"] = model.weights;
    card["intercept"] = model.intercept;
    card["l2_penalty"] = model.l2_penalty;
    card["class_weights"] = {model.class_weights.w0, model.class_weights.w1};
    card["standardizer"] = {{"mean", model.standardizer.mean}, {"sd", model.standardizer.sd}};
    card["feature_names"] = model.layout.names();
    write_card(card, path);
}

void save_gbdt(const GbdtModel& model, std::uint64_t seed, std::uint64_t data_hash,
               const std::string& path) {
    json card;
    card["version"] = kModelCardVersion;
    card["kind"] = "gbdt";
    card["seed"] = seed;
    card["data_hash"] = data_hash;
    card["n_client"] = model.layout.n_client;
    card["learning_rate"] = model.learning_rate;
    card["base_score"] = model.base_score;
    card["feature_gain"] = model.feature_gain;
    card["hyperparams"] = {{"n_estimators", model.hyperparams.n_estimators},
                           {"num_leaves", model.hyperparams.num_leaves},
                           {"min_child_samples", model.hyperparams.min_child_samples},
                           {"subsample", model.hyperparams.subsample},
                           {"colsample_bytree", model.hyperparams.colsample_bytree},
                           {"lambda_leaf", model.hyperparams.lambda_leaf}};
    json trees = json::array();
    for (const auto& t : model.trees) {
        json nodes = json::array();
        for (const auto& n : t.nodes)
            nodes.push_back({{"f", n.feature},
                             {"t", n.threshold},
                             {"l", n.left},
                             {"r", n.right},
                             {"v", n.value},
                             {"g", n.gain}});
        trees.push_back(std::move(nodes));
    }
    card["trees"] = std::move(trees);
    write_card(card, path);
}

LoadedModel load_model(const std::string& path) {
    const json card = read_card(path);
    LoadedModel out;
    out.kind = card.at("kind");
    out.seed = card.value("seed", 0ULL);
    out.data_hash = card.value("data_hash", 0ULL);
    if (out.kind == "generative") {
        const auto& pj = card.at("params");
        GenerativeParams p;
        p.reservation = linear_from_json(pj.at("reservation"));
        p.reservation_sd = pj.at("reservation_sd");
        p.dealer_sep = {pj.at("sep").at("location"), pj.at("sep").at("scale"),
                        pj.at("sep").at("shape"), pj.at("sep").at("asym")};
        p.dealer_shift = linear_from_json(pj.at("dealer_shift"));
        p.pd_model = logit_from_json(pj.at("pd_logit"));
        p.ia_model = logit_from_json(pj.at("ia_logit"));
        p.p_quote = pj.at("p_quote");
        p.drift = pj.at("drift");
        p.horizon = pj.at("horizon");
        p.tie_break = pj.at("tie_break");
        const bool pd_off = card.at("flags").at("pd_off");
        const bool ia_off = card.at("flags").at("ia_off");
        out.model = std::make_unique<GenerativePredictor>(std::move(p), pd_off, ia_off);
    } else if (out.kind == "logistic") {
        auto m = std::make_unique<LogisticModel>();
        m->layout.n_client = card.at("n_client");
        m->weights = card.at("weights").get<std::vector<double>>();
        m->intercept = card.at("intercept");
        m->l2_penalty = card.at("l2_penalty");
        m->class_weights.w0 = card.at("class_weights")[0];
        m->class_weights.w1 = card.at("class_weights")[1];
        m->standardizer.mean = card.at("standardizer").at("mean").get<std::vector<double>>();
        m->standardizer.sd = card.at("standardizer").at("sd").get<std::vector<double>>();
        out.model = std::move(m);
    } else if (out.kind == "gbdt") {
        auto m = std::make_unique<GbdtModel>();
        m->layout.n_client = card.at("n_client");
        m->learning_rate = card.at("learning_rate");
        m->base_score = card.at("base_score");
        m->feature_gain = card.at("feature_gain").get<std::vector<double>>();
        for (const auto& tj : card.at("trees")) {
            GbdtTree t;
            for (const auto& nj : tj)
                t.nodes.push_back({nj.at("f"), nj.at("t"), nj.at("l"), nj.at("r"), nj.at("v"),
                                   nj.at("g")});
            m->trees.push_back(std::move(t));
        }
        out.model = std::move(m);
    } else {
        throw InvalidConfig("unknown model kind: " + out.kind);
    }
    return out;
}

} // namespace rfq
