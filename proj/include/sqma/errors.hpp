#pragma once

#include <stdexcept>
#include <string>

namespace sqma {

/// Malformed state, subset, circuit or instance text.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configurable size cap (brute-force dimension, circuit width, ...) was exceeded.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An operation was invoked outside its stated precondition, e.g. rewinding a
/// verifier whose optimum is not exactly 1/2.
class PreconditionViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sqma
