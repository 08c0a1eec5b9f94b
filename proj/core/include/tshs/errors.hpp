#pragma once

#include <stdexcept>
#include <string>

namespace tshs {

// Bad run configuration or malformed config file. CLI maps this to exit 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or insufficient input data. CLI maps this to exit 3.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// No bout satisfies a needle request (class, length, exclusion).
struct NeedleUnavailable : DataError {
    explicit NeedleUnavailable(const std::string& msg) : DataError(msg) {}
};

// Requested bout layout cannot fit in the background.
struct PlacementInfeasible : DataError {
    explicit PlacementInfeasible(const std::string& msg) : DataError(msg) {}
};

} // namespace tshs
