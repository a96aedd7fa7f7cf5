#pragma once

// Core RfQ vocabulary shared by every other module. Spread convention:
// delta is the dealer's half-spread margin over the reference mid,
// P = P_m + s*delta, stored normalized by the liquidity benchmark Delta.
// The client prefers a smaller delta on both sides, so a hit requires
// delta <= min competing quote and delta <= the reservation spread.
// All types are immutable value objects; operations are pure.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rfqlab/errors.hpp"

namespace rfq {

enum class Side : int { Buy = -1, Sell = +1 };

inline double side_sign(Side s) { return static_cast<double>(static_cast<int>(s)); }

enum class RawStatus { Done, TiedDone, TiedTradedAway, Covered, OtherTradedAway, Passed };

enum class StatusGroup { Hit, Missed, Passed };

StatusGroup group_status(RawStatus raw);

std::string to_string(RawStatus s);
RawStatus raw_status_from_string(const std::string& s);

// Feature layout is fixed per dataset: bond = [dv01, days_to_maturity,
// freq_buy, freq_sell, avg_dealers], rfq = [n_dealers, dv01_exposure],
// client = [client_f1..fK].
struct FeatureBundle {
    std::vector<double> client;
    std::vector<double> bond;
    std::vector<double> rfq;
    double volatility = 0.0;

    int n_dealers() const;
    void validate() const;
};

inline constexpr std::size_t kBondFeatureCount = 5;
inline constexpr std::size_t kRfqFeatureCount = 2;

struct RfqRecord {
    double timestamp = 0.0;
    Side side = Side::Sell;
    double volume = 1.0;
    FeatureBundle features;
    double delta_norm = 0.0;
    double delta_benchmark = 1.0;
    RawStatus status = RawStatus::Passed;
    std::optional<double> cover_norm;
    bool call = false;
    bool axe = false;
    std::optional<std::pair<double, double>> mid_path; // (P_m at t, P_m at t+h or T)

    bool hit() const { return group_status(status) == StatusGroup::Hit; }
    // Half-spread in currency units.
    double delta_currency() const { return delta_norm * delta_benchmark; }
};

enum class RevenueKind { Instantaneous, RoundTrip, EndOfDay, ShortTerm };

struct RevenueObservation {
    RevenueKind kind = RevenueKind::Instantaneous;
    double value = 0.0;
    double horizon = 0.0; // seconds; 0 for Instantaneous
};

// Record-level flow value: Hit -> v*delta (+ s*v*(P_end - P_start) for the
// horizon kinds), otherwise 0. Throws MissingMidPath / NonPositiveHorizon.
RevenueObservation revenue(const RfqRecord& record, RevenueKind kind, double horizon = 0.0);

// Paired-trade round trip: v*delta_close - v*delta_open + s*v*(P_m moves),
// with volume and side taken from the opening record.
RevenueObservation round_trip_revenue(const RfqRecord& open, const RfqRecord& close);

using Dataset = std::vector<RfqRecord>;

// CSV schema (header mandatory, UTF-8, '.' decimal separator):
// timestamp,side,volume,n_dealers,sigma,dv01,days_to_maturity,freq_buy,
// freq_sell,avg_dealers,dv01_exposure,client_f1..fK,delta_norm,
// delta_benchmark,status,cover_norm,call,axe,mid_t,mid_end
// cover_norm and mid_* may be empty.
void write_csv(const Dataset& records, const std::string& path);
Dataset read_csv(const std::string& path);

} // namespace rfq
