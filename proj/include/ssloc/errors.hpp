#pragma once

#include <stdexcept>
#include <string>

namespace ssloc {

// Bad configuration or arguments; CLI maps this to exit code 1.
struct validation_error : std::invalid_argument {
    explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Frame contains no usable signal (power below the energy floor).
struct signal_absent : std::runtime_error {
    explicit signal_absent(const std::string& msg) : std::runtime_error(msg) {}
};

// Filter state or covariance left the representable range; exit code 2.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An estimation phase did not meet its convergence gate; exit code 3.
struct non_convergence : std::runtime_error {
    explicit non_convergence(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ssloc
