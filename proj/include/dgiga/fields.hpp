#pragma once

#include <array>
#include <functional>
#include <span>

namespace dgiga {

/// Scalar function of a physical point (length-d span).
using ScalarField = std::function<double(std::span<const double>)>;

/// Gradient of a scalar function at a physical point.
using GradientField = std::function<std::array<double, 3>(std::span<const double>)>;

} // namespace dgiga
