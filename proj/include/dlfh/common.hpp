#ifndef DLFH_COMMON_HPP
#define DLFH_COMMON_HPP

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dlfh {

using Index = std::int64_t;

// Contract breach: caller passed arguments violating a documented precondition.
struct ContractViolation : std::logic_error {
    explicit ContractViolation(const std::string &msg) : std::logic_error(msg) {}
};

// A file could not be read/parsed or failed validation.
struct LoadError : std::runtime_error {
    explicit LoadError(const std::string &msg) : std::runtime_error(msg) {}
};

// User-supplied configuration is inconsistent (bad ranges, m > n, ...).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

// Numerical failure inside a solver.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string &msg) : std::runtime_error(msg) {}
};

// Singular normal equations; advise a positive ridge parameter.
struct SingularSystemError : NumericalError {
    explicit SingularSystemError(const std::string &msg) : NumericalError(msg) {}
};

}  // namespace dlfh

#define DLFH_REQUIRE(cond, msg_expr)                        \
    do {                                                    \
        if (!(cond)) {                                      \
            std::ostringstream dlfh_oss_;                   \
            dlfh_oss_ << msg_expr;                          \
            throw ::dlfh::ContractViolation(dlfh_oss_.str()); \
        }                                                   \
    } while (0)

#endif  // DLFH_COMMON_HPP
