// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace nlcancel {

// Argument-contract violations throw std::invalid_argument directly. The types
// below mark numerical failures a caller may want to handle separately.

struct CountOverflowError : std::overflow_error {
    using std::overflow_error::overflow_error;
};

// A dictionary column evaluated to all zeros (e.g. an all-zero source block).
struct DegenerateInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fewer observations than unknowns.
struct UnderdeterminedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gram matrix not positive definite even after diagonal loading.
struct SingularDictionaryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Candidate column is (numerically) inside the span of the current support.
struct DegenerateColumnError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace nlcancel
