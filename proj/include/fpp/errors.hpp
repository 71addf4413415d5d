#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fpp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-domain input (even modulus, negative value, ...).
struct InvalidInput : Error {
    using Error::Error;
};

// A factorization or order computation ran out of its configured budget.
struct BudgetExceeded : Error {
    using Error::Error;
};

// Exact powering refused: exponent above the configured coordinate-growth bound.
struct GrowthBoundExceeded : Error {
    using Error::Error;
};

// No admissible radicand c below the configured cutoff.
struct CutoffExceeded : Error {
    CutoffExceeded(const std::string& msg, uint64_t last_c)
        : Error(msg), last_c_tried(last_c) {}
    uint64_t last_c_tried;
};

// The supplied radicand has Jacobi symbol +1, where -1 is required.
struct NonResidueRequired : Error {
    using Error::Error;
};

// A shared factor with the modulus was found where coprimality is required.
struct SharedFactor : Error {
    SharedFactor(const std::string& msg, std::string factor_dec)
        : Error(msg), factor(std::move(factor_dec)) {}
    std::string factor;  // decimal
};

} // namespace fpp
