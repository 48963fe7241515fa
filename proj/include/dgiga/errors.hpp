#pragma once

#include <stdexcept>
#include <string>

namespace dgiga {

/// Configuration or domain-validation failure (CLI exit code 2).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Singular or inverted geometry map.
struct degenerate_geometry_error : std::runtime_error {
    explicit degenerate_geometry_error(const std::string& what) : std::runtime_error(what) {}
};

/// Linear solver did not meet its residual contract (CLI exit code 3).
struct solver_error : std::runtime_error {
    explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace dgiga
