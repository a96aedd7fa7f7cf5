#pragma once

// Versioned model cards (JSON): all coefficients, the SEP parameterization
// note, benchmark flags, seed and a hash of the training rows. Loading
// restores a usable HitModel.

#include <cstdint>
#include <memory>
#include <string>

#include "rfqlab/discriminative.hpp"
#include "rfqlab/generative_fit.hpp"

namespace rfq {

inline constexpr int kModelCardVersion = 1;

std::uint64_t dataset_hash(const Dataset& records);

void save_generative(const GenerativeFitReport& report, bool pd_off, bool ia_off,
                     std::uint64_t seed, std::uint64_t data_hash, const std::string& path);
void save_logistic(const LogisticModel& model, std::uint64_t seed, std::uint64_t data_hash,
                   const std::string& path);
void save_gbdt(const GbdtModel& model, std::uint64_t seed, std::uint64_t data_hash,
               const std::string& path);

struct LoadedModel {
    std::unique_ptr<HitModel> model;
    std::string kind;
    std::uint64_t seed = 0;
    std::uint64_t data_hash = 0;
};

LoadedModel load_model(const std::string& path);

} // namespace rfq
