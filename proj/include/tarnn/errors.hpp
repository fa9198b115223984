#pragma once

#include <stdexcept>
#include <string>

namespace tarnn {

// Violated call contract (bad argument combinations, scalar expected, ...).
struct ContractError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Tensor shape mismatch; the message names both shapes.
struct DimensionError : ContractError {
    using ContractError::ContractError;
};

// Invalid configuration values or missing required settings.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, units, schema).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite loss, NaN gradients and similar numeric breakdowns.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace tarnn
