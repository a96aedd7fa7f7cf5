#pragma once

#include <stdexcept>
#include <string>

namespace rfq {

struct InvalidParams : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidConfig : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct LayoutMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct MissingMidPath : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonPositiveHorizon : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Carries the index of the record whose likelihood term went non-finite.
struct NonFiniteLikelihood : std::runtime_error {
    std::size_t record_index;
    explicit NonFiniteLikelihood(std::size_t idx)
        : std::runtime_error("non-finite likelihood at record " + std::to_string(idx)),
          record_index(idx) {}
};

struct InvalidInit : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidHyperparams : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NoBracket : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidProbability : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidQuery : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnknownTarget : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingleClass : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateWeight : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IncompatibleMethod : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct TooFewRecords : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace rfq
