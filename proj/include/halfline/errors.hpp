#pragma once

#include <stdexcept>
#include <string>

namespace halfline {

struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct invalid_parameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct grid_mismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised when a dense kernel would exceed the configured node cap.
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct empty_band : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct rank_deficiency : std::runtime_error {
    rank_deficiency(const std::string& what, double cond)
        : std::runtime_error(what), condition(cond) {}
    double condition;
};

struct degenerate_subspace : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct config_error : std::runtime_error {
    config_error(std::string ptr, const std::string& msg)
        : std::runtime_error(ptr + ": " + msg), pointer(std::move(ptr)) {}
    std::string pointer;
};

}  // namespace halfline
