#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace unhap {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Raised for invalid user-facing configuration (bad parameters, unknown names).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when internal state is inconsistent (misaligned vectors, stale caches).
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Raised on malformed input files.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// floor(a / b) tolerant to representation error, e.g. floor(1 / 0.01) == 100.
inline std::int64_t grid_count(double a, double b) {
    return static_cast<std::int64_t>(std::floor(a / b + 1e-9));
}

}  // namespace unhap
