#pragma once

// Config-file bindings for the CLI: sections mirror ScenarioConfig,
// ExperimentSpec and PricingProblem. Key sets are documented in the README.

#include "rfqlab/config.hpp"
#include "rfqlab/pipeline.hpp"
#include "rfqlab/pricing.hpp"
#include "rfqlab/revenue.hpp"
#include "rfqlab/simulator.hpp"

namespace rfq {

ScenarioConfig scenario_from_config(const Config& cfg);
ExperimentSpec experiment_from_config(const Config& cfg);
PricingProblem pricing_from_config(const Config& cfg);
RevenuePotentialQuery revenue_query_from_config(const Config& cfg);
FeatureBundle context_from_config(const Config& cfg, const std::string& section);

} // namespace rfq
