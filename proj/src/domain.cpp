#include "rfqlab/domain.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rfq {

StatusGroup group_status(RawStatus raw) {
    switch (raw) {
        case RawStatus::Done:
        case RawStatus::TiedDone:
            return StatusGroup::Hit;
        case RawStatus::TiedTradedAway:
        case RawStatus::Covered:
        case RawStatus::OtherTradedAway:
            return StatusGroup::Missed;
        case RawStatus::Passed:
            return StatusGroup::Passed;
    }
    return StatusGroup::Passed; // unreachable, enum is closed
}

std::string to_string(RawStatus s) {
    switch (s) {
        case RawStatus::Done: return "Done";
        case RawStatus::TiedDone: return "TiedDone";
        case RawStatus::TiedTradedAway: return "TiedTradedAway";
        case RawStatus::Covered: return "Covered";
        case RawStatus::OtherTradedAway: return "OtherTradedAway";
        case RawStatus::Passed: return "Passed";
    }
    return "Passed";
}

RawStatus raw_status_from_string(const std::string& s) {
    if (s == "Done") return RawStatus::Done;
    if (s == "TiedDone") return RawStatus::TiedDone;
    if (s == "TiedTradedAway") return RawStatus::TiedTradedAway;
    if (s == "Covered") return RawStatus::Covered;
    if (s == "OtherTradedAway") return RawStatus::OtherTradedAway;
    if (s == "Passed") return RawStatus::Passed;
    throw CsvError("unknown status: " + s);
}

int FeatureBundle::n_dealers() const {
    if (rfq.empty()) throw DimensionMismatch("FeatureBundle: rfq features empty");
    return static_cast<int>(std::lround(rfq[0]));
}

void FeatureBundle::validate() const {
    auto check_finite = [](const std::vector<double>& v, const char* what) {
        for (double x : v)
            if (!std::isfinite(x)) throw InvalidParams(std::string("FeatureBundle: non-finite ") + what);
    };
    check_finite(client, "client feature");
    check_finite(bond, "bond feature");
    check_finite(rfq, "rfq feature");
    if (!std::isfinite(volatility) || volatility < 0.0)
        throw InvalidParams("FeatureBundle: volatility must be finite and >= 0");
    if (!rfq.empty() && rfq[0] < 0.0)
        throw InvalidParams("FeatureBundle: dealer count must be >= 0");
}

RevenueObservation revenue(const RfqRecord& record, RevenueKind kind, double horizon) {
    const bool is_hit = record.hit();
    if (kind == RevenueKind::Instantaneous)
        return {kind, is_hit ? record.volume * record.delta_currency() : 0.0, 0.0};
    if (kind == RevenueKind::RoundTrip)
        throw InvalidParams("revenue: round trips need the paired record, use round_trip_revenue");
    if (!(horizon > 0.0)) throw NonPositiveHorizon("revenue: horizon must be positive");
    if (!is_hit) return {kind, 0.0, horizon};
    if (!record.mid_path) throw MissingMidPath("revenue: record has no mid-price path");
    const double move = record.mid_path->second - record.mid_path->first;
    const double value =
        record.volume * record.delta_currency() + side_sign(record.side) * record.volume * move;
    return {kind, value, horizon};
}

RevenueObservation round_trip_revenue(const RfqRecord& open, const RfqRecord& close) {
    if (!open.mid_path || !close.mid_path)
        throw MissingMidPath("round_trip_revenue: both records need mid prices");
    const double v = open.volume;
    const double move = close.mid_path->first - open.mid_path->first;
    const double value = v * close.delta_currency() - v * open.delta_currency() +
                         side_sign(open.side) * v * move;
    return {RevenueKind::RoundTrip, value, close.timestamp - open.timestamp};
}

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_num(const std::string& s, const char* col) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw CsvError("");
        return v;
    } catch (...) {
        throw CsvError(std::string("bad numeric value '") + s + "' in column " + col);
    }
}

} // namespace

void write_csv(const Dataset& records, const std::string& path) {
    std::size_t n_client = records.empty() ? 0 : records.front().features.client.size();
    std::ofstream out(path);
    if (!out) throw CsvError("cannot open " + path + " for writing");
    out << "timestamp,side,volume,n_dealers,sigma,dv01,days_to_maturity,freq_buy,freq_sell,"
           "avg_dealers,dv01_exposure";
    for (std::size_t i = 0; i < n_client; ++i) out << ",client_f" << (i + 1);
    out << ",delta_norm,delta_benchmark,status,cover_norm,call,axe,mid_t,mid_end\n";
    for (const auto& r : records) {
        const auto& f = r.features;
        if (f.bond.size() != kBondFeatureCount || f.rfq.size() != kRfqFeatureCount ||
            f.client.size() != n_client)
            throw DimensionMismatch("write_csv: inconsistent feature layout");
        out << fmt(r.timestamp) << ',' << static_cast<int>(r.side) << ',' << fmt(r.volume) << ','
            << f.n_dealers() << ',' << fmt(f.volatility);
        for (double b : f.bond) out << ',' << fmt(b);
        out << ',' << fmt(f.rfq[1]);
        for (double c : f.client) out << ',' << fmt(c);
        out << ',' << fmt(r.delta_norm) << ',' << fmt(r.delta_benchmark) << ','
            << to_string(r.status) << ',';
        if (r.cover_norm) out << fmt(*r.cover_norm);
        out << ',' << (r.call ? 1 : 0) << ',' << (r.axe ? 1 : 0) << ',';
        if (r.mid_path) out << fmt(r.mid_path->first);
        out << ',';
        if (r.mid_path) out << fmt(r.mid_path->second);
        out << '\n';
    }
}

Dataset read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw CsvError("empty file: " + path);
    const auto header = split_line(line);
    std::size_t n_client = 0;
    for (const auto& h : header)
        if (h.rfind("client_f", 0) == 0) ++n_client;
    const std::size_t expected = 11 + n_client + 8;
    if (header.size() != expected) throw CsvError("unexpected column count in " + path);

    Dataset records;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cols = split_line(line);
        if (cols.size() != expected)
            throw CsvError("row " + std::to_string(lineno) + ": wrong column count");
        RfqRecord r;
        std::size_t i = 0;
        r.timestamp = parse_num(cols[i++], "timestamp");
        const int side = static_cast<int>(parse_num(cols[i++], "side"));
        if (side != -1 && side != 1) throw CsvError("side must be -1 or +1");
        r.side = static_cast<Side>(side);
        r.volume = parse_num(cols[i++], "volume");
        if (!(r.volume > 0.0)) throw CsvError("volume must be > 0");
        const double n_dealers = parse_num(cols[i++], "n_dealers");
        r.features.volatility = parse_num(cols[i++], "sigma");
        r.features.bond.resize(kBondFeatureCount);
        for (auto& b : r.features.bond) b = parse_num(cols[i++], "bond");
        r.features.rfq = {n_dealers, parse_num(cols[i++], "dv01_exposure")};
        r.features.client.resize(n_client);
        for (auto& x : r.features.client) x = parse_num(cols[i++], "client");
        r.delta_norm = parse_num(cols[i++], "delta_norm");
        r.delta_benchmark = parse_num(cols[i++], "delta_benchmark");
        if (!(r.delta_benchmark > 0.0)) throw CsvError("delta_benchmark must be > 0");
        r.status = raw_status_from_string(cols[i++]);
        if (!cols[i].empty()) r.cover_norm = parse_num(cols[i], "cover_norm");
        ++i;
        r.call = parse_num(cols[i++], "call") != 0.0;
        r.axe = parse_num(cols[i++], "axe") != 0.0;
        const std::string& mid_t = cols[i++];
        const std::string& mid_end = cols[i++];
        if (!mid_t.empty() && !mid_end.empty())
            r.mid_path = {parse_num(mid_t, "mid_t"), parse_num(mid_end, "mid_end")};
        else if (mid_t.empty() != mid_end.empty())
            throw CsvError("mid_t and mid_end must both be present or both empty");
        r.features.validate();
        records.push_back(std::move(r));
    }
    return records;
}

} // namespace rfq
